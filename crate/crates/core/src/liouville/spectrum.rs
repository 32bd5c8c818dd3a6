//! Closed-form and numeric spectra of the effective Liouvillian.
//!
//! Labeling: E₁, E₂ belong to eigenvectors supported on (ρ₊₊, ρ₋₋) with
//! E₁ the one closer to zero; E₃, E₄ belong to eigenvectors supported on
//! (ρ₊₋, ρ₋₊). With the principal square root,
//! E₃,₄ = E₂/2 + L_φ ∓ iα²√((Δp₂⁻)² − κ²), so above the exceptional point
//! Im E₃ < Im E₄ and below it Re E₃ > Re E₄.
//!
//! Gauge: ρ_ss has unit trace; ρ₂, ρ₃, ρ₄ are scaled so that their
//! largest-magnitude entry equals 1. Entries whose magnitude is within a
//! relative 1e-9 of the largest count as tied and the first one in
//! (ρ₊₊, ρ₊₋, ρ₋₊, ρ₋₋) order wins.

use nalgebra::{Matrix2, Matrix4, Schur, Vector2, Vector4};

use crate::error::{Error, Result};
use crate::C64;

use super::matrix::{unvec, vec, EffectiveLiouvillian};
use super::params::{CatBasisParams, SystemParams};

/// Relative distance from Δ_LEP2 treated as sitting on the exceptional point.
pub const EP_REL_TOL: f64 = 1e-9;

const GAUGE_TIE_TOL: f64 = 1e-9;
const SCHUR_MAX_ITER: usize = 10_000;

/// Labeled eigenvalues and eigenmatrices of the effective Liouvillian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiouvillianSpectrum {
    pub e1: C64,
    pub e2: C64,
    pub e3: C64,
    pub e4: C64,
    pub rho_ss: Matrix2<C64>,
    pub rho2: Matrix2<C64>,
    pub rho3: Matrix2<C64>,
    pub rho4: Matrix2<C64>,
    pub at_ep: bool,
}

impl LiouvillianSpectrum {
    pub fn eigenvalues(&self) -> [C64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }

    pub fn eigenmatrices(&self) -> [Matrix2<C64>; 4] {
        [self.rho_ss, self.rho2, self.rho3, self.rho4]
    }

    fn from_parts(values: [C64; 4], matrices: [Matrix2<C64>; 4], at_ep: bool) -> Self {
        Self {
            e1: values[0],
            e2: values[1],
            e3: values[2],
            e4: values[3],
            rho_ss: matrices[0],
            rho2: matrices[1],
            rho3: matrices[2],
            rho4: matrices[3],
            at_ep,
        }
    }

    /// Reorder so that each eigenvalue lands on the label of the nearest
    /// eigenvalue of `reference` (minimum total distance over all
    /// assignments; ties keep the current order).
    pub fn relabel_to(&self, reference: &LiouvillianSpectrum) -> LiouvillianSpectrum {
        let values = self.eigenvalues();
        let targets = reference.eigenvalues();
        let cost = |perm: &[usize; 4]| -> f64 {
            (0..4).map(|k| (values[perm[k]] - targets[k]).norm()).sum()
        };
        let identity = [0, 1, 2, 3];
        let mut best = identity;
        let mut best_cost = cost(&identity);
        for perm in permutations4() {
            let c = cost(&perm);
            if c < best_cost * (1.0 - 1e-12) {
                best = perm;
                best_cost = c;
            }
        }
        let matrices = self.eigenmatrices();
        Self::from_parts(best.map(|k| values[k]), best.map(|k| matrices[k]), self.at_ep)
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|k| p.contains(&k)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Scale so that the largest-magnitude entry becomes exactly 1.
pub fn gauge_fix(m: &Matrix2<C64>) -> Matrix2<C64> {
    let v = vec(m);
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return *m;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - GAUGE_TIE_TOL))
        .expect("maximum is attained");
    let scale = v[pivot];
    let mut out = v.map(|z| z / scale);
    out[pivot] = C64::new(1.0, 0.0);
    unvec(&out)
}

fn unit_trace(m: &Matrix2<C64>) -> Matrix2<C64> {
    m / m.trace()
}

/// Closed-form eigenvector of the coherence block
/// [[c + iΔ', g], [g, c − iΔ']] for eigenvalue c + μ.
fn coherence_vector(mu: C64, rot: f64, g: f64, fallback: usize) -> Vector2<C64> {
    let i_rot = C64::new(0.0, rot);
    let va = Vector2::new(C64::new(g, 0.0), mu - i_rot);
    let vb = Vector2::new(mu + i_rot, C64::new(g, 0.0));
    let v = if va.norm() >= vb.norm() { va } else { vb };
    if v.norm() == 0.0 {
        // g = 0 and μ = ±iΔ' = 0: the block vanishes, any basis works
        let mut e = Vector2::zeros();
        e[fallback] = C64::new(1.0, 0.0);
        e
    } else {
        v
    }
}

fn coherence_matrix(v: Vector2<C64>) -> Matrix2<C64> {
    let z = C64::new(0.0, 0.0);
    Matrix2::new(z, v[0], v[1], z)
}

/// Whether |Δ| sits on κ/p₂⁻ within [`EP_REL_TOL`].
pub fn is_at_ep(params: &SystemParams) -> bool {
    if !(params.kappa > 0.0) {
        return false;
    }
    let cat = CatBasisParams::new(params);
    let lep = params.kappa / cat.p2_minus;
    (params.delta.abs() - lep).abs() <= EP_REL_TOL * lep
}

/// Eigenvalues and eigenmatrices from the analytic expressions.
///
/// On the exceptional point ([`is_at_ep`]) E₃ and E₄ are set equal and
/// both eigenmatrices are the merged one, ∝ (0, i, 1, 0) for Δ > 0.
pub fn closed_form_spectrum(params: &SystemParams) -> LiouvillianSpectrum {
    let cat = CatBasisParams::new(params);
    let a2 = cat.alpha * cat.alpha;
    let kappa = params.kappa;
    let e2 = -kappa * a2 * cat.p2_plus;
    let center = 0.5 * e2 + cat.l_phi;
    let rot = a2 * params.delta * cat.p2_minus;
    let g = a2 * kappa;
    let at_ep = is_at_ep(params);

    // E₃,₄ = c ∓ i·√(Δ'² − g²), principal root
    let root = if at_ep { C64::new(0.0, 0.0) } else { C64::new(rot * rot - g * g, 0.0).sqrt() };
    let i = C64::new(0.0, 1.0);
    let mu3 = -i * root;
    let mu4 = i * root;
    let c = C64::new(center, 0.0);

    let p_sq = cat.p * cat.p;
    let z = C64::new(0.0, 0.0);
    let rho_ss = unit_trace(&Matrix2::new(C64::new(1.0 / p_sq, 0.0), z, z, C64::new(p_sq, 0.0)));
    let rho2 = gauge_fix(&Matrix2::new(C64::new(-1.0, 0.0), z, z, C64::new(1.0, 0.0)));
    let rho3 = gauge_fix(&coherence_matrix(coherence_vector(mu3, rot, g, 0)));
    let rho4 = gauge_fix(&coherence_matrix(coherence_vector(mu4, rot, g, 1)));

    LiouvillianSpectrum::from_parts(
        [C64::new(0.0, 0.0), C64::new(e2, 0.0), c + mu3, c + mu4],
        [rho_ss, rho2, rho3, rho4],
        at_ep,
    )
}

/// Eigen-decomposition by complex Schur factorization and triangular
/// back-substitution, labeled and gauge-fixed like the closed form.
///
/// Eigenvectors are split along the invariant subspaces
/// {ρ₊₊, ρ₋₋} and {ρ₊₋, ρ₋₊} of the matrix; a mixed vector only arises when
/// a population and a coherence eigenvalue are degenerate, where each
/// part is itself an eigenvector (checked by residual).
pub fn numeric_spectrum(liouvillian: &EffectiveLiouvillian) -> Result<LiouvillianSpectrum> {
    numeric_spectrum_with(liouvillian, true)
}

/// [`numeric_spectrum`] with optional snapping of the pair on the EP.
/// Unsnapped eigenvalues keep their √eps-scale splitting, which is what a
/// sign test near the EP needs.
pub(crate) fn numeric_spectrum_with(liouvillian: &EffectiveLiouvillian, snap_ep: bool) -> Result<LiouvillianSpectrum> {
    let l = *liouvillian.matrix();
    let scale = l.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !scale.is_finite() {
        return Err(Error::NumericFailure("non-finite Liouvillian entry".into()));
    }
    let (values, vectors) = if scale == 0.0 {
        ([C64::new(0.0, 0.0); 4], Matrix4::identity())
    } else {
        eigen_decompose(&l, scale)?
    };

    // population weight of each eigenvector
    let weight = |k: usize| -> f64 {
        let v = vectors.column(k);
        let pop = v[0].norm_sqr() + v[3].norm_sqr();
        pop / (pop + v[1].norm_sqr() + v[2].norm_sqr())
    };
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| weight(b).total_cmp(&weight(a)));
    let (pop, coh) = ([order[0], order[1]], [order[2], order[3]]);

    let mut parts: [(C64, Vector4<C64>); 4] = [(C64::new(0.0, 0.0), Vector4::zeros()); 4];
    for (slot, (&k, keep)) in pop.iter().zip([[0, 3]; 2]).chain(coh.iter().zip([[1, 2]; 2])).enumerate() {
        let full = vectors.column(k).into_owned();
        let mut v = Vector4::zeros();
        for idx in keep {
            v[idx] = full[idx];
        }
        let norm = v.norm();
        if norm < 1e-6 * full.norm() {
            return Err(Error::NumericFailure(format!(
                "eigenvector {k} has no weight on its invariant subspace"
            )));
        }
        let v = v / C64::new(norm, 0.0);
        let residual = (l * v - v * values[k]).norm();
        if residual > 1e-6 * scale {
            return Err(Error::NumericFailure(format!(
                "eigenvector {k} residual {residual:e} exceeds tolerance"
            )));
        }
        parts[slot] = (values[k], v);
    }

    let (mut p1, mut p2) = (parts[0], parts[1]);
    if p2.0.re > p1.0.re {
        std::mem::swap(&mut p1, &mut p2);
    }
    let (mut c3, mut c4) = (parts[2], parts[3]);
    let d = c3.0 - c4.0;
    let swap = if d.im.abs() > d.re.abs() { c3.0.im > c4.0.im } else { c3.0.re < c4.0.re };
    if swap {
        std::mem::swap(&mut c3, &mut c4);
    }

    let rot = liouvillian.rotation();
    let g = liouvillian.coupling();
    let at_ep = g > 0.0 && (rot.abs() - g).abs() <= EP_REL_TOL * g;
    if at_ep && snap_ep {
        // The pair is defective: each Schur eigenvalue is off by ~√eps·g,
        // their mean and the block's null vector are well conditioned.
        let c = 0.5 * (c3.0 + c4.0);
        let mut v = Vector4::zeros();
        v[1] = l[(1, 2)];
        v[2] = c - l[(1, 1)];
        let v = v / C64::new(v.norm(), 0.0);
        c3 = (c, v);
        c4 = (c, v);
    }

    let ss = unvec(&p1.1);
    if ss.trace().norm() < 1e-12 {
        return Err(Error::NumericFailure("steady-state eigenvector has zero trace".into()));
    }
    Ok(LiouvillianSpectrum::from_parts(
        [p1.0, p2.0, c3.0, c4.0],
        [unit_trace(&ss), gauge_fix(&unvec(&p2.1)), gauge_fix(&unvec(&c3.1)), gauge_fix(&unvec(&c4.1))],
        at_ep,
    ))
}

/// Eigenvalues (Schur diagonal) and unit eigenvectors (columns).
fn eigen_decompose(l: &Matrix4<C64>, scale: f64) -> Result<([C64; 4], Matrix4<C64>)> {
    let schur = Schur::try_new(*l, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::NumericFailure("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let values = [t[(0, 0)], t[(1, 1)], t[(2, 2)], t[(3, 3)]];
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericFailure("non-finite eigenvalue".into()));
    }
    let smin = (f64::EPSILON * scale).max(f64::MIN_POSITIVE);
    let mut vectors = Matrix4::zeros();
    for k in 0..4 {
        let mut x = Vector4::zeros();
        x[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: C64 = (j + 1..=k).map(|m| t[(j, m)] * x[m]).sum();
            let mut denom = t[(j, j)] - t[(k, k)];
            if denom.norm() < smin {
                denom = C64::new(smin, 0.0);
            }
            x[j] = -s / denom;
        }
        let v = q * x;
        let norm = v.norm();
        vectors.set_column(k, &(v / C64::new(norm, 0.0)));
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SystemParams {
        SystemParams::reference()
    }

    #[test]
    fn gauge_makes_largest_entry_one() {
        let m = Matrix2::new(
            C64::new(0.1, 0.0),
            C64::new(0.0, -2.0),
            C64::new(1.0, 1.0),
            C64::new(0.0, 0.0),
        );
        let g = gauge_fix(&m);
        assert_eq!(g[(0, 1)], C64::new(1.0, 0.0));
        assert!((g[(1, 0)] - C64::new(1.0, 1.0) / C64::new(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn gauge_ties_go_to_first_entry() {
        let z = C64::new(0.0, 0.0);
        let g = gauge_fix(&Matrix2::new(z, C64::new(0.0, 1.0), C64::new(1.0, 0.0), z));
        assert_eq!(g[(0, 1)], C64::new(1.0, 0.0));
        assert!((g[(1, 0)] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn second_eigenmatrix_is_population_difference() {
        let s = closed_form_spectrum(&reference());
        let z = C64::new(0.0, 0.0);
        assert_eq!(s.rho2, Matrix2::new(C64::new(1.0, 0.0), z, z, C64::new(-1.0, 0.0)));
    }

    #[test]
    fn closed_form_eigenpairs_satisfy_the_matrix() {
        for rel in [0.0, 0.3, 0.999, 1.5, 4.0, -2.0] {
            let base = reference().with_kappa_phi(2e3);
            let lep = base.kappa / CatBasisParams::new(&base).p2_minus;
            let params = base.with_delta(rel * lep);
            let l = EffectiveLiouvillian::new(&params);
            let s = closed_form_spectrum(&params);
            let scale = l.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (e, m) in s.eigenvalues().into_iter().zip(s.eigenmatrices()) {
                let r = l.apply(&m) - m * e;
                assert!(r.iter().all(|z| z.norm() < 1e-9 * scale), "rel {rel}: {r}");
            }
        }
    }

    #[test]
    fn numeric_matches_closed_form_off_ep() {
        for rel in [0.0, 0.2, 0.7, 1.3, 3.0, -0.5, -2.5] {
            let base = reference();
            let lep = base.kappa / CatBasisParams::new(&base).p2_minus;
            let params = base.with_delta(rel * lep);
            let closed = closed_form_spectrum(&params);
            let numeric = numeric_spectrum(&EffectiveLiouvillian::new(&params)).unwrap();
            let g = CatBasisParams::new(&params).alpha.powi(2) * params.kappa;
            for (a, b) in closed.eigenvalues().iter().zip(numeric.eigenvalues()) {
                assert!((a - b).norm() <= 1e-9 * a.norm().max(g), "rel {rel}: {a} vs {b}");
            }
            for (a, b) in closed.eigenmatrices().iter().zip(numeric.eigenmatrices()) {
                assert!((a - b).iter().all(|z| z.norm() < 1e-7), "rel {rel}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn coalescence_at_ep() {
        let base = reference();
        let lep = base.kappa / CatBasisParams::new(&base).p2_minus;
        let params = base.with_delta(lep);
        let closed = closed_form_spectrum(&params);
        assert!(closed.at_ep);
        assert_eq!(closed.e3, closed.e4);
        let numeric = numeric_spectrum(&EffectiveLiouvillian::new(&params)).unwrap();
        assert!(numeric.at_ep);
        assert!((numeric.e3 - numeric.e4).norm() < 1e-6 * numeric.e2.norm());
        let v3 = vec(&numeric.rho3);
        let v4 = vec(&numeric.rho4);
        let overlap = v3.dotc(&v4).norm() / (v3.norm() * v4.norm());
        assert!(overlap > 1.0 - 1e-4);
    }

    #[test]
    fn dissipationless_spectrum() {
        let params = SystemParams::new(2.0, 1.0, 2.0, 0.0, 0.0).unwrap();
        let numeric = numeric_spectrum(&EffectiveLiouvillian::new(&params)).unwrap();
        let rot = 2.0 * 2.0 * CatBasisParams::new(&params).p2_minus;
        let mut got: Vec<C64> = numeric.eigenvalues().to_vec();
        got.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((got[0] - C64::new(0.0, -rot)).norm() < 1e-14);
        assert!(got[1].norm() < 1e-14 && got[2].norm() < 1e-14);
        assert!((got[3] - C64::new(0.0, rot)).norm() < 1e-14);
        assert!(!numeric.at_ep);
    }

    #[test]
    fn relabel_follows_nearest_reference() {
        let s = closed_form_spectrum(&reference());
        let mut swapped = s;
        std::mem::swap(&mut swapped.e3, &mut swapped.e4);
        std::mem::swap(&mut swapped.rho3, &mut swapped.rho4);
        let back = swapped.relabel_to(&s);
        assert_eq!(back.e3, s.e3);
        assert_eq!(back.rho4, s.rho4);
    }
}

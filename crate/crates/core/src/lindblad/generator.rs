use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{annihilation, hamiltonian, number, ComplexOperator, FockDensityMatrix, TruncatedSpace};
use crate::liouville::SystemParams;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A Lindblad jump operator with its rate folded in as √rate.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperator {
    operator: ComplexOperator,
    rate: f64,
}

impl JumpOperator {
    /// `bare` is the unscaled operator; the stored operator is √rate·bare.
    pub fn new(bare: &ComplexOperator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParams(vec![format!("jump rate must be >= 0 (got {rate})")]));
        }
        let scaled = bare.matrix() * C64::new(rate.sqrt(), 0.0);
        Ok(Self { operator: ComplexOperator::new(bare.space(), scaled)?, rate })
    }

    pub fn operator(&self) -> &ComplexOperator {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Single-photon loss √κ a and pure dephasing √κ_φ a†a; zero rates are
/// dropped.
pub fn standard_jumps(params: &SystemParams, space: TruncatedSpace) -> Vec<JumpOperator> {
    let mut jumps = Vec::new();
    if params.kappa > 0.0 {
        jumps.push(JumpOperator::new(&annihilation(space), params.kappa).expect("validated rate"));
    }
    if params.kappa_phi > 0.0 {
        jumps.push(JumpOperator::new(&number(space), params.kappa_phi).expect("validated rate"));
    }
    jumps
}

/// Operator stored by its nonzero diagonals; `values[i]` is M[i, i+offset]
/// (zero where i+offset falls outside the matrix).
#[derive(Clone, Debug)]
struct Banded {
    diagonals: Vec<(isize, Vec<C64>)>,
}

impl Banded {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows() as isize;
        let mut diagonals = Vec::new();
        for offset in -(dim - 1)..dim {
            let values: Vec<C64> = (0..dim)
                .map(|i| {
                    let k = i + offset;
                    if (0..dim).contains(&k) {
                        m[(i as usize, k as usize)]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            if values.iter().any(|z| *z != C64::new(0.0, 0.0)) {
                diagonals.push((offset, values));
            }
        }
        Self { diagonals }
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            diagonals: self
                .diagonals
                .iter()
                .map(|(d, v)| (*d, v.iter().map(|z| f(*z)).collect()))
                .collect(),
        }
    }
}

/// The Lindblad generator ρ ↦ −i[H,ρ] + Σ D[O]ρ in banded form.
///
/// Written as −i(H_eff ρ − ρ H_eff†) + Σ OρO† with
/// H_eff = H − (i/2) Σ O†O. States are flat row-major slices,
/// `rho[i*dim + j] = ρ[i, j]`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    space: TruncatedSpace,
    // −i·H_eff
    left: Banded,
    // i·conj(H_eff)
    right: Banded,
    jumps: Vec<(Banded, Banded)>,
}

impl LindbladGenerator {
    pub fn new(h: &ComplexOperator, jumps: &[JumpOperator]) -> Result<Self> {
        let space = h.space();
        let mut heff = h.matrix().clone();
        for jump in jumps {
            if jump.operator().space() != space {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: jump.operator().space().dim(),
                });
            }
            let o = jump.operator().matrix();
            heff -= (o.adjoint() * o) * C64::new(0.0, 0.5);
        }
        let heff = Banded::from_dense(&heff);
        Ok(Self {
            space,
            left: heff.map(|z| -I * z),
            right: heff.map(|z| I * z.conj()),
            jumps: jumps
                .iter()
                .map(|j| {
                    let b = Banded::from_dense(j.operator().matrix());
                    let c = b.map(|z| z.conj());
                    (b, c)
                })
                .collect(),
        })
    }

    /// Kerr-cat Hamiltonian with loss and dephasing.
    pub fn for_params(params: &SystemParams, space: TruncatedSpace) -> Self {
        Self::new(&hamiltonian(params, space), &standard_jumps(params, space))
            .expect("operators share one space")
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    /// out = L(rho) on flat row-major storage.
    pub fn apply(&self, rho: &[C64], out: &mut [C64]) {
        let dim = self.space.dim();
        assert_eq!(rho.len(), dim * dim);
        assert_eq!(out.len(), dim * dim);
        let n = dim as isize;
        out.fill(C64::new(0.0, 0.0));
        for i in 0..dim {
            let out_row = &mut out[i * dim..(i + 1) * dim];
            for (d, v) in &self.left.diagonals {
                let k = i as isize + d;
                if !(0..n).contains(&k) || v[i] == C64::new(0.0, 0.0) {
                    continue;
                }
                let c = v[i];
                let src = &rho[k as usize * dim..(k as usize + 1) * dim];
                for (o, s) in out_row.iter_mut().zip(src) {
                    *o += c * s;
                }
            }
            let row = &rho[i * dim..(i + 1) * dim];
            for (d, w) in &self.right.diagonals {
                let (lo, hi) = shifted_range(*d, n);
                let src = &row[(lo + d) as usize..(hi + d) as usize];
                for ((o, s), c) in out_row[lo as usize..hi as usize].iter_mut().zip(src).zip(&w[lo as usize..hi as usize]) {
                    *o += s * c;
                }
            }
            for (op, op_conj) in &self.jumps {
                for (d1, v1) in &op.diagonals {
                    let k = i as isize + d1;
                    if !(0..n).contains(&k) || v1[i] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let c = v1[i];
                    let src_row = &rho[k as usize * dim..(k as usize + 1) * dim];
                    for (d2, w) in &op_conj.diagonals {
                        let (lo, hi) = shifted_range(*d2, n);
                        let src = &src_row[(lo + d2) as usize..(hi + d2) as usize];
                        for ((o, s), cw) in out_row[lo as usize..hi as usize].iter_mut().zip(src).zip(&w[lo as usize..hi as usize]) {
                            *o += c * s * cw;
                        }
                    }
                }
            }
        }
    }

    /// L(ρ) for a dense matrix argument.
    pub fn apply_matrix(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let dim = self.space.dim();
        if rho.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: rho.nrows() });
        }
        let flat = to_row_major(rho);
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        self.apply(&flat, &mut out);
        Ok(from_row_major(&out, dim))
    }
}

/// j-range for which both j and j+d index into 0..n.
fn shifted_range(d: isize, n: isize) -> (isize, isize) {
    ((-d).max(0), n.min(n - d))
}

pub(crate) fn to_row_major(m: &DMatrix<C64>) -> Vec<C64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub(crate) fn from_row_major(flat: &[C64], dim: usize) -> DMatrix<C64> {
    DMatrix::from_row_slice(dim, dim, flat)
}

/// −i[H,ρ] + Σ_μ D[O_μ]ρ with D[O]ρ = OρO† − ½{O†O, ρ}.
pub fn lindblad_rhs(
    rho: &FockDensityMatrix,
    h: &ComplexOperator,
    jumps: &[JumpOperator],
) -> Result<DMatrix<C64>> {
    if rho.space() != h.space() {
        return Err(Error::DimensionMismatch { expected: h.space().dim(), found: rho.space().dim() });
    }
    LindbladGenerator::new(h, jumps)?.apply_matrix(rho.matrix())
}

//! Truncated Fock-space linear algebra.
//!
//! Everything here is dense: the oscillator is cut off at `dim` levels
//! (n = 0..dim-1) and operators are `dim × dim` complex matrices. The
//! displacement operator is built from its closed-form Laguerre matrix
//! elements, so its entries are exact (untruncated) values; only products
//! of truncated operators feel the cutoff.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouville::SystemParams;
use crate::C64;

/// Poisson tail mass allowed beyond the cutoff for coherent and cat states.
pub const STATE_TAIL_TOL: f64 = 1e-12;

/// Largest `|⟨dim-1|D(β)|0⟩|` accepted by [`displacement`].
pub const DISPLACEMENT_EDGE_TOL: f64 = 1e-10;

/// Number of Fock levels kept, n = 0..dim-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct TruncatedSpace {
    dim: usize,
}

impl TruncatedSpace {
    /// Default cutoff for cat amplitudes around 1.5 (n̄ ≈ 2.3).
    pub const DEFAULT_DIM: usize = 30;

    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpace { dim });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> ComplexOperator {
        ComplexOperator::from_parts(*self, DMatrix::identity(self.dim, self.dim))
    }

    pub fn zeros(&self) -> DMatrix<C64> {
        DMatrix::zeros(self.dim, self.dim)
    }

    /// Fock basis vector |n⟩.
    pub fn basis(&self, n: usize) -> DVector<C64> {
        assert!(n < self.dim, "Fock level {n} outside dim {}", self.dim);
        let mut v = DVector::zeros(self.dim);
        v[n] = C64::new(1.0, 0.0);
        v
    }

    /// Copy `matrix` into a (possibly larger) space, padding with zeros.
    pub fn embed(&self, matrix: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if matrix.nrows() > self.dim || !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: self.dim, found: matrix.nrows() });
        }
        let mut out = self.zeros();
        let n = matrix.nrows();
        out.view_mut((0, 0), (n, n)).copy_from(matrix);
        Ok(out)
    }
}

impl Default for TruncatedSpace {
    fn default() -> Self {
        Self { dim: Self::DEFAULT_DIM }
    }
}

impl TryFrom<usize> for TruncatedSpace {
    type Error = Error;

    fn try_from(dim: usize) -> Result<Self> {
        Self::new(dim)
    }
}

impl From<TruncatedSpace> for usize {
    fn from(space: TruncatedSpace) -> usize {
        space.dim
    }
}

/// A dense operator acting on a [`TruncatedSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexOperator {
    space: TruncatedSpace,
    matrix: DMatrix<C64>,
}

impl ComplexOperator {
    pub fn new(space: TruncatedSpace, matrix: DMatrix<C64>) -> Result<Self> {
        check_square(&matrix, space.dim)?;
        Ok(Self { space, matrix })
    }

    pub(crate) fn from_parts(space: TruncatedSpace, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.shape(), (space.dim, space.dim));
        Self { space, matrix }
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(self.space, self.matrix.adjoint())
    }

    pub fn compose(&self, rhs: &ComplexOperator) -> Self {
        assert_eq!(self.space, rhs.space, "operators live in different spaces");
        Self::from_parts(self.space, &self.matrix * &rhs.matrix)
    }

    pub fn apply(&self, psi: &DVector<C64>) -> DVector<C64> {
        &self.matrix * psi
    }

    /// ⟨ψ|M|ψ⟩ for a normalized ψ.
    pub fn expectation(&self, psi: &DVector<C64>) -> C64 {
        psi.dotc(&(&self.matrix * psi))
    }

    /// max|M − M†| relative to max|M| (0 for the zero operator).
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = max_abs(&self.matrix);
        if scale == 0.0 {
            return 0.0;
        }
        max_abs(&(&self.matrix - self.matrix.adjoint())) / scale
    }
}

/// The two cat parities: `Plus` is the even cat |C⁺⟩, `Minus` the odd one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatParity {
    Plus,
    Minus,
}

impl CatParity {
    fn keeps(self, n: usize) -> bool {
        match self {
            CatParity::Plus => n % 2 == 0,
            CatParity::Minus => n % 2 == 1,
        }
    }
}

/// Ladder operator `a` with ⟨n−1|a|n⟩ = √n.
pub fn annihilation(space: TruncatedSpace) -> ComplexOperator {
    let dim = space.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    ComplexOperator::from_parts(space, m)
}

pub fn creation(space: TruncatedSpace) -> ComplexOperator {
    annihilation(space).dagger()
}

/// a†a, built directly as diag(0, 1, …, dim−1).
pub fn number(space: TruncatedSpace) -> ComplexOperator {
    let dim = space.dim();
    let diag = DVector::from_fn(dim, |n, _| C64::new(n as f64, 0.0));
    ComplexOperator::from_parts(space, DMatrix::from_diagonal(&diag))
}

/// Photon-number parity e^{iπa†a} = diag((−1)ⁿ).
pub fn parity_operator(space: TruncatedSpace) -> ComplexOperator {
    let dim = space.dim();
    let diag = DVector::from_fn(dim, |n, _| C64::new(parity_sign(n), 0.0));
    ComplexOperator::from_parts(space, DMatrix::from_diagonal(&diag))
}

/// Kerr-cat Hamiltonian Δa†a + K a†²a² − P(a†² + a²).
///
/// The drive enters with a minus sign so that, at Δ = 0, the degenerate
/// ground manifold is spanned by |±α⟩ with real α = √(P/K); with the
/// opposite drive phase the lobes sit at ±iα and every cat-basis formula
/// would pick up a quarter-turn rotation.
pub fn hamiltonian(params: &SystemParams, space: TruncatedSpace) -> ComplexOperator {
    let dim = space.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        let nf = n as f64;
        m[(n, n)] = C64::new(params.delta * nf + params.kerr * nf * (nf - 1.0), 0.0);
        if n + 2 < dim {
            // ⟨n|a²|n+2⟩ = √((n+1)(n+2))
            let amp = -params.drive * ((nf + 1.0) * (nf + 2.0)).sqrt();
            m[(n, n + 2)] = C64::new(amp, 0.0);
            m[(n + 2, n)] = C64::new(amp, 0.0);
        }
    }
    ComplexOperator::from_parts(space, m)
}

/// Σ_{n ≥ from} e^{−mean} meanⁿ/n!, summed directly from the tail.
pub fn poisson_tail(mean: f64, from: usize) -> f64 {
    if mean == 0.0 {
        return if from == 0 { 1.0 } else { 0.0 };
    }
    let ln_mean = mean.ln();
    let mut ln_fact = 0.0;
    for k in 1..=from {
        ln_fact += (k as f64).ln();
    }
    let mut sum = 0.0;
    let mut n = from;
    loop {
        let term = (n as f64 * ln_mean - mean - ln_fact).exp();
        sum += term;
        if n as f64 > mean && term <= 1e-30 * sum.max(f64::MIN_POSITIVE) {
            break;
        }
        if n > from + 100_000 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    sum.min(1.0)
}

/// Smallest cutoff whose Poisson tail beyond it is below `tol`.
pub fn required_dim(mean: f64, tol: f64) -> usize {
    let mut dim = 2;
    while poisson_tail(mean, dim) >= tol {
        dim += 1;
    }
    dim
}

/// Coherent state |β⟩ truncated to `space` and renormalized.
pub fn coherent_state(beta: C64, space: TruncatedSpace) -> Result<DVector<C64>> {
    let mean = beta.norm_sqr();
    if poisson_tail(mean, space.dim()) >= STATE_TAIL_TOL {
        return Err(Error::TruncationTooSmall {
            dim: space.dim(),
            required: required_dim(mean, STATE_TAIL_TOL),
        });
    }
    let mut v = DVector::zeros(space.dim());
    let mut c = C64::new((-0.5 * mean).exp(), 0.0);
    for n in 0..space.dim() {
        if n > 0 {
            c *= beta / (n as f64).sqrt();
        }
        v[n] = c;
    }
    let norm = v.norm();
    Ok(v / C64::new(norm, 0.0))
}

/// Cat state N±(|α⟩ ± |−α⟩), supported on even (`Plus`) or odd (`Minus`)
/// Fock levels only.
pub fn cat_state(alpha: f64, parity: CatParity, space: TruncatedSpace) -> Result<DVector<C64>> {
    let mut v = coherent_state(C64::new(alpha, 0.0), space)?;
    for n in 0..space.dim() {
        if !parity.keeps(n) {
            v[n] = C64::new(0.0, 0.0);
        }
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidState(format!(
            "cat state with α = {alpha} and {parity:?} parity vanishes"
        )));
    }
    Ok(v / C64::new(norm, 0.0))
}

/// Displacement operator D(β) restricted to `space`.
///
/// Fails when the displaced vacuum still has amplitude above
/// [`DISPLACEMENT_EDGE_TOL`] on the top level, since products of truncated
/// displacements then stop being unitary.
pub fn displacement(beta: C64, space: TruncatedSpace) -> Result<ComplexOperator> {
    let edge = displaced_vacuum_edge(beta.norm_sqr(), space.dim());
    if edge >= DISPLACEMENT_EDGE_TOL {
        let mut required = space.dim() + 1;
        while displaced_vacuum_edge(beta.norm_sqr(), required) >= DISPLACEMENT_EDGE_TOL {
            required += 1;
        }
        return Err(Error::TruncationTooSmall { dim: space.dim(), required });
    }
    Ok(ComplexOperator::from_parts(space, displacement_elements(beta, space.dim())))
}

/// |⟨dim−1|D(β)|0⟩| for |β|² = `mean`, only meaningful past the peak.
fn displaced_vacuum_edge(mean: f64, dim: usize) -> f64 {
    let n = dim - 1;
    if (n as f64) <= mean {
        return 1.0;
    }
    if mean == 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    (0.5 * (n as f64 * mean.ln() - mean - ln_fact)).exp()
}

/// Exact matrix elements ⟨m|D(γ)|n⟩ for 0 ≤ m, n < dim.
///
/// For m ≥ n: √(n!/m!) γ^{m−n} e^{−|γ|²/2} L_n^{(m−n)}(|γ|²), and the
/// m < n half follows with γ → −γ*. Laguerre polynomials come from the
/// upward three-term recurrence in n at fixed order.
pub fn displacement_elements(gamma: C64, dim: usize) -> DMatrix<C64> {
    let x = gamma.norm_sqr();
    if x == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let mut ln_fact = vec![0.0; dim];
    for n in 1..dim {
        ln_fact[n] = ln_fact[n - 1] + (n as f64).ln();
    }
    let ln_abs = gamma.norm().ln();
    let unit = gamma / gamma.norm();
    let anti_unit = -unit.conj();

    let mut d = DMatrix::zeros(dim, dim);
    let mut phase = C64::new(1.0, 0.0);
    let mut anti_phase = C64::new(1.0, 0.0);
    for order in 0..dim {
        let k = order as f64;
        let (mut l_prev, mut l) = (0.0_f64, 1.0_f64);
        for n in 0..dim - order {
            if n == 1 {
                l_prev = l;
                l = 1.0 + k - x;
            } else if n > 1 {
                let nf = n as f64;
                let next = ((2.0 * nf - 1.0 + k - x) * l - (nf - 1.0 + k) * l_prev) / nf;
                l_prev = l;
                l = next;
            }
            let m = n + order;
            let mag = (0.5 * (ln_fact[n] - ln_fact[m]) + k * ln_abs - 0.5 * x).exp() * l;
            d[(m, n)] = phase * mag;
            if order > 0 {
                d[(n, m)] = anti_phase * mag;
            }
        }
        phase *= unit;
        anti_phase *= anti_unit;
    }
    d
}

/// D(β) Π D(β)† = D(2β) Π, with exact matrix elements.
///
/// `(2/π) Tr[ρ · displaced_parity(β)]` is the Wigner function at β.
pub fn displaced_parity(beta: C64, dim: usize) -> DMatrix<C64> {
    let mut d = displacement_elements(beta * 2.0, dim);
    for n in (1..dim).step_by(2) {
        for m in 0..dim {
            d[(m, n)] = -d[(m, n)];
        }
    }
    d
}

/// A truncated-oscillator density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensityMatrix {
    space: TruncatedSpace,
    matrix: DMatrix<C64>,
}

impl FockDensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-8;
    pub const POSITIVITY_TOL: f64 = 1e-8;

    /// Validating constructor: Hermitian, unit trace, positive up to noise.
    pub fn new(space: TruncatedSpace, matrix: DMatrix<C64>) -> Result<Self> {
        check_square(&matrix, space.dim())?;
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian: max|ρ−ρ†| = {herm:e}")));
        }
        let rho = Self { space, matrix };
        let tr = rho.trace();
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = rho.min_eigenvalue();
        if min < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(space: TruncatedSpace, matrix: DMatrix<C64>) -> Self {
        Self { space, matrix }
    }

    /// |ψ⟩⟨ψ| for a state vector (normalized here).
    pub fn from_pure(space: TruncatedSpace, psi: &DVector<C64>) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: psi.len() });
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        Ok(Self { space, matrix: &psi * psi.adjoint() })
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = hermitian_part(&self.matrix);
        SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Tr[ρ M].
    pub fn expectation(&self, op: &ComplexOperator) -> C64 {
        (&self.matrix * op.matrix()).trace()
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn overlap(&self, psi: &DVector<C64>) -> C64 {
        psi.dotc(&(&self.matrix * psi))
    }

    /// Population of the top `levels` Fock levels.
    pub fn edge_population(&self, levels: usize) -> f64 {
        let dim = self.space.dim();
        (dim.saturating_sub(levels)..dim).map(|n| self.matrix[(n, n)].re).sum()
    }
}

pub(crate) fn parity_sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn check_square(matrix: &DMatrix<C64>, dim: usize) -> Result<()> {
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if matrix.nrows() != dim { matrix.nrows() } else { matrix.ncols() },
        });
    }
    Ok(())
}

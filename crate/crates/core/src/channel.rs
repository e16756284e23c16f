//! Quantum operations in Kraus form and the quantities that measure how far
//! they are from unital: the contraction operator Γ, the parameter η and the
//! affine representation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::linalg::{
    check_square, frobenius, hermitian_eigenvalues, hermiticity_residual, identity, max_abs,
    trace_of_product, unitarity_residual, Operator, ZERO,
};
use crate::torus::TorusSpace;
use crate::{Error, Result};

/// Trace-preservation tolerance enforced when a channel is built.
pub const TP_TOLERANCE: f64 = 1e-10;
/// Largest N for which the N²×N² superoperator matrix is materialized.
pub const SUPEROPERATOR_MAX_N: usize = 64;
/// Largest N for the full affine representation.
pub const AFFINE_MAX_N: usize = 32;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_SLACK: f64 = -1e-8;

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        check_square(&op)?;
        let herm = hermiticity_residual(&op);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:.2e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = hermitian_eigenvalues(&op)[0];
        if min_eig < POSITIVITY_SLACK {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { op })
    }

    pub(crate) fn new_unchecked(op: Operator) -> Self {
        Self { op }
    }

    /// `ρ_I = I/N`
    pub fn maximally_mixed(n: usize) -> Self {
        Self::new_unchecked(identity(n).unscale(n as f64))
    }

    pub fn pure(state: &crate::StateVector) -> Self {
        Self::new_unchecked(state.projector())
    }

    /// Random full-rank state `G G†/tr(G G†)` from a complex Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let rho = &g * g.adjoint();
        let tr = rho.trace().re;
        Self::new_unchecked(crate::linalg::hermitian_part(&rho.unscale(tr)))
    }

    pub fn dim(&self) -> usize {
        self.op.nrows()
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// `tr[ρ²]`
    pub fn purity(&self) -> f64 {
        trace_of_product(&self.op, &self.op).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.op)[0]
    }
}

/// A completely positive, trace-preserving map `ρ ↦ Σ_μ M_μ ρ M_μ†`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    space: TorusSpace,
    kraus: Vec<Operator>,
}

impl KrausChannel {
    /// Validates dimensions, the operator count (1 to N²) and trace preservation.
    pub fn new(space: TorusSpace, kraus: Vec<Operator>) -> Result<Self> {
        let n = space.dim();
        if kraus.is_empty() || kraus.len() > n * n {
            return Err(Error::KrausCount {
                count: kraus.len(),
                max: n * n,
            });
        }
        Self::validated(space, kraus)
    }

    pub(crate) fn validated(space: TorusSpace, kraus: Vec<Operator>) -> Result<Self> {
        for m in &kraus {
            let d = check_square(m)?;
            if d != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: d,
                });
            }
        }
        let ch = Self { space, kraus };
        let residual = ch.tp_residual();
        if residual.is_nan() || residual > TP_TOLERANCE {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(ch)
    }

    pub fn identity(space: TorusSpace) -> Self {
        Self {
            space,
            kraus: vec![identity(space.dim())],
        }
    }

    /// Single-Kraus channel `ρ ↦ U ρ U†`; `U` must be unitary within 1e−10.
    pub fn from_unitary(space: TorusSpace, u: Operator) -> Result<Self> {
        let d = check_square(&u)?;
        if d != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: d,
            });
        }
        let residual = unitarity_residual(&u);
        if residual > TP_TOLERANCE {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self {
            space,
            kraus: vec![u],
        })
    }

    pub fn space(&self) -> &TorusSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn kraus(&self) -> &[Operator] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    /// More Kraus operators than the N² needed for a minimal representation;
    /// happens after [`compose`](Self::compose), which does not reduce the list.
    pub fn is_overcomplete(&self) -> bool {
        self.kraus.len() > self.dim() * self.dim()
    }

    /// `‖Σ_μ M_μ†M_μ − I‖_max`
    pub fn tp_residual(&self) -> f64 {
        let n = self.dim();
        let mut acc = DMatrix::from_element(n, n, ZERO);
        for m in &self.kraus {
            acc.gemm_ad(Complex64::new(1.0, 0.0), m, m, Complex64::new(1.0, 0.0));
        }
        max_abs(&(acc - identity(n)))
    }

    /// `Σ_μ M_μ X M_μ†` for an arbitrary operator `X`.
    pub fn apply_operator(&self, x: &Operator) -> Result<Operator> {
        let n = self.dim();
        let d = check_square(x)?;
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
        let term = |m: &Operator| m * x * m.adjoint();
        // Terms are computed in parallel and summed in list order so the
        // result does not depend on thread scheduling.
        let terms: Vec<Operator> = if n >= 32 && self.kraus.len() > 2 {
            self.kraus.par_iter().map(term).collect()
        } else {
            self.kraus.iter().map(term).collect()
        };
        let mut out = DMatrix::from_element(n, n, ZERO);
        for t in &terms {
            out += t;
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_operator(rho.op())
            .map(DensityMatrix::new_unchecked)
    }

    /// `Γ = S(ρ_I) − ρ_I = (1/N) Σ_μ [M_μ, M_μ†]`, traceless and Hermitian.
    pub fn gamma(&self) -> Operator {
        let n = self.dim();
        let one = Complex64::new(1.0, 0.0);
        let mut acc = DMatrix::from_element(n, n, ZERO);
        for m in &self.kraus {
            acc.gemm(one, m, &m.adjoint(), one);
            acc.gemm_ad(-one, m, m, one);
        }
        acc.unscale(n as f64)
    }

    /// `η = N tr[Γ²]`
    pub fn eta(&self) -> f64 {
        let g = self.gamma();
        self.dim() as f64 * trace_of_product(&g, &g).re
    }

    /// `(p₁ − p₀)/p₀` with `p_n` the purity of `S^n(ρ_I)`.
    pub fn eta_from_purity(&self) -> f64 {
        let n = self.dim();
        let p0 = 1.0 / n as f64;
        let rho1 = self
            .apply(&DensityMatrix::maximally_mixed(n))
            .expect("dimensions agree");
        (rho1.purity() - p0) / p0
    }

    /// `‖S(ρ_I) − ρ_I‖_max < tol`
    pub fn is_unital(&self, tol: f64) -> bool {
        let n = self.dim();
        let rho_i = DensityMatrix::maximally_mixed(n);
        let out = self.apply(&rho_i).expect("dimensions agree");
        max_abs(&(out.op() - rho_i.op())) < tol
    }

    /// Kraus list `{A_μ B_ν}` of `outer ∘ inner`. No rank reduction is done.
    pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
        if outer.space != inner.space {
            return Err(Error::SpaceMismatch);
        }
        let kraus = outer
            .kraus
            .iter()
            .flat_map(|a| inner.kraus.iter().map(move |b| a * b))
            .collect();
        Self::validated(outer.space, kraus)
    }

    /// N²×N² matrix acting on column-stacked operators, `Σ_μ conj(M_μ) ⊗ M_μ`.
    pub fn superoperator_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        if n > SUPEROPERATOR_MAX_N {
            return Err(Error::DimensionGuard {
                n,
                max: SUPEROPERATOR_MAX_N,
            });
        }
        let mut s = DMatrix::from_element(n * n, n * n, ZERO);
        for m in &self.kraus {
            s += m.conjugate().kronecker(m);
        }
        Ok(s)
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ S(|i⟩⟨j|)`, for debugging complete positivity.
    pub fn choi_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        if n > AFFINE_MAX_N {
            return Err(Error::DimensionGuard {
                n,
                max: AFFINE_MAX_N,
            });
        }
        let mut choi = DMatrix::from_element(n * n, n * n, ZERO);
        for i in 0..n {
            for j in 0..n {
                let mut e = DMatrix::from_element(n, n, ZERO);
                e[(i, j)] = Complex64::new(1.0, 0.0);
                let out = self.apply_operator(&e)?;
                choi.view_mut((i * n, j * n), (n, n)).copy_from(&out);
            }
        }
        Ok(choi)
    }

    /// First column of the affine representation below the corner entry:
    /// the components of `S(Λ_0)` on the traceless basis operators.
    pub fn affine_v1(&self) -> DVector<Complex64> {
        let n = self.dim();
        let s_lambda0 = self
            .apply_operator(&identity(n).unscale((n as f64).sqrt()))
            .expect("dimensions agree");
        let coeffs = translation_coefficients(&s_lambda0);
        coeffs.rows(1, n * n - 1).into_owned()
    }

    /// Matrix `[S]_{ij} = tr[Λ_i† S(Λ_j)]` in the orthonormal basis of
    /// normalized translations `Λ_{aN+b} = T_(a,b)/√N` (so `Λ_0 = I/√N`).
    pub fn affine_representation(&self) -> Result<AffineRep> {
        let n = self.dim();
        if n > AFFINE_MAX_N {
            return Err(Error::DimensionGuard {
                n,
                max: AFFINE_MAX_N,
            });
        }
        let norm = (n as f64).sqrt();
        let columns: Vec<DVector<Complex64>> = (0..n * n)
            .into_par_iter()
            .map(|j| {
                let basis = self
                    .space
                    .translation((j / n) as i64, (j % n) as i64)
                    .unscale(norm);
                let image = self.apply_operator(&basis).expect("dimensions agree");
                translation_coefficients(&image)
            })
            .collect();
        let full = DMatrix::from_columns(&columns);
        Ok(AffineRep::from_matrix(full))
    }
}

/// Components `tr[Λ_i† X]` of `X` on the normalized translation basis,
/// `i = aN + b`.
pub fn translation_coefficients(x: &Operator) -> DVector<Complex64> {
    let n = x.nrows();
    let norm = (n as f64).sqrt();
    let mut out = DVector::from_element(n * n, ZERO);
    for a in 0..n {
        for b in 0..n {
            let mut acc = ZERO;
            for j in 0..n {
                // conj(ω^{ab/2} ω^{bj}) X[(j+a) mod N, j]
                let e = (a * b + 2 * b * j) % (2 * n);
                let phase = Complex64::from_polar(1.0, -std::f64::consts::PI * e as f64 / n as f64);
                acc += phase * x[((j + a) % n, j)];
            }
            out[a * n + b] = acc / norm;
        }
    }
    out
}

/// Block form of a superoperator in an orthonormal operator basis with
/// `Λ_0 ∝ I`:
///
/// ```text
/// [ corner | v2 ]
/// [ v1     | M  ]
/// ```
///
/// Trace preservation makes `v2` vanish; unitality makes `v1` vanish.
#[derive(Debug, Clone)]
pub struct AffineRep {
    pub corner: Complex64,
    pub v1: DVector<Complex64>,
    pub v2: DVector<Complex64>,
    pub m: DMatrix<Complex64>,
}

impl AffineRep {
    fn from_matrix(full: DMatrix<Complex64>) -> Self {
        let d = full.nrows();
        Self {
            corner: full[(0, 0)],
            v1: full.view((1, 0), (d - 1, 1)).column(0).into_owned(),
            v2: full.view((0, 1), (1, d - 1)).row(0).transpose(),
            m: full.view((1, 1), (d - 1, d - 1)).into_owned(),
        }
    }

    /// `v1†v1`, which equals `η` for a trace-preserving channel.
    pub fn eta(&self) -> f64 {
        let inner = self.v1.dotc(&self.v1);
        debug_assert!(inner.im.abs() < 1e-12);
        inner.re
    }

    /// Reassembles the full `N²×N²` matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = self.v1.len() + 1;
        let mut full = DMatrix::from_element(d, d, ZERO);
        full[(0, 0)] = self.corner;
        full.view_mut((1, 0), (d - 1, 1)).copy_from(&self.v1);
        full.view_mut((0, 1), (1, d - 1))
            .copy_from(&self.v2.transpose());
        full.view_mut((1, 1), (d - 1, d - 1)).copy_from(&self.m);
        full
    }
}

/// Frobenius distance between two operators.
pub fn frobenius_distance(a: &Operator, b: &Operator) -> f64 {
    frobenius(&(a - b))
}

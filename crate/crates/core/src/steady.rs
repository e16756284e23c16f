//! Invariant states of channels.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, KrausChannel};
use crate::linalg::{frobenius, hermitian_part, trace_norm_hermitian, Operator, ONE};
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Largest dimension handled by [`invariant_state_spectral`].
pub const SPECTRAL_MAX_N: usize = 16;
/// Largest dimension for which a trace-norm residual is added to the report.
pub const TRACE_NORM_MAX_N: usize = 32;
const DEGENERACY_THRESHOLD: f64 = 1e-8;
const KRYLOV_MAX: usize = 64;
const WARMUP_STEPS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// `‖ρ_{k+1} − ρ_k‖_F` at the last step.
    pub final_residual: f64,
    pub converged: bool,
    pub tolerance: f64,
    pub max_iter: usize,
    pub purity_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_norm_residual: Option<f64>,
}

/// Iteration cap `⌈10·N/ε⌉` when the contraction strength `ε` is known,
/// otherwise 10 000.
pub fn default_max_iter(n: usize, eps: Option<f64>) -> usize {
    match eps {
        Some(e) if e > 0.0 => ((10 * n) as f64 / e).ceil() as usize,
        _ => 10_000,
    }
}

fn normalize(op: Operator) -> Operator {
    let h = hermitian_part(&op);
    let tr = h.trace().re;
    h.unscale(tr)
}

/// Repeats `ρ ← S(ρ)` from `rho0` (default `I/N`) until the Frobenius step
/// is below `tol`. The returned state is the last input of `S`, so on
/// convergence `‖S(ρ*) − ρ*‖_F < tol`. Running out of iterations is reported,
/// not raised.
pub fn invariant_state(
    ch: &KrausChannel,
    tol: f64,
    max_iter: usize,
    rho0: Option<&DensityMatrix>,
) -> Result<(DensityMatrix, ConvergenceReport)> {
    if !(tol > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "tol",
            value: tol,
            reason: "tolerance must be positive",
        });
    }
    if max_iter == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "max_iter",
            value: 0.0,
            reason: "at least one iteration is required",
        });
    }
    let n = ch.dim();
    let mut rho = match rho0 {
        Some(r) if r.dim() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.dim(),
            })
        }
        Some(r) => r.op().clone(),
        None => DensityMatrix::maximally_mixed(n).into_operator(),
    };
    let mut purity_trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let next = normalize(ch.apply_operator(&rho)?);
        iterations += 1;
        residual = frobenius(&(&next - &rho));
        purity_trace.push(next.iter().map(|z| z.norm_sqr()).sum());
        if residual < tol {
            converged = true;
            break;
        }
        rho = next;
    }
    let trace_norm_residual = if n <= TRACE_NORM_MAX_N {
        let step = hermitian_part(&(ch.apply_operator(&rho)? - &rho));
        Some(trace_norm_hermitian(&step))
    } else {
        None
    };
    let report = ConvergenceReport {
        iterations,
        final_residual: residual,
        converged,
        tolerance: tol,
        max_iter,
        purity_trace,
        trace_norm_residual,
    };
    Ok((DensityMatrix::new_unchecked(rho), report))
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(m.clone(), 1e-14, 10_000)
        .ok_or(Error::Numerical("Schur decomposition did not converge"))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Fixed point from the null space of `S − 1` in superoperator form.
/// Fails when eigenvalue 1 is degenerate.
pub fn invariant_state_spectral(ch: &KrausChannel) -> Result<DensityMatrix> {
    let n = ch.dim();
    if n > SPECTRAL_MAX_N {
        return Err(Error::DimensionGuard {
            n,
            max: SPECTRAL_MAX_N,
        });
    }
    let s = ch.superoperator_matrix()?;
    let near_one = eigenvalues(&s)?
        .iter()
        .filter(|l| (*l - ONE).norm() < DEGENERACY_THRESHOLD)
        .count();
    if near_one > 1 {
        return Err(Error::DegenerateFixedPoint(near_one));
    }
    let shifted = &s - DMatrix::identity(n * n, n * n);
    let svd = shifted.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or(Error::Numerical("SVD returned no right vectors"))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::Numerical("empty spectrum"))?;
    let v = v_t.row(idx).adjoint();
    let op = Operator::from_column_slice(n, n, v.as_slice());
    let tr = op.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::Numerical("fixed vector is traceless"));
    }
    let rho = normalize(op.map(|z| z / tr));
    Ok(DensityMatrix::new_unchecked(rho))
}

fn traceless(mut op: Operator) -> Operator {
    let n = op.nrows();
    let shift = op.trace() / n as f64;
    for i in 0..n {
        op[(i, i)] -= shift;
    }
    op
}

fn flatten(op: &Operator) -> DVector<Complex64> {
    DVector::from_column_slice(op.as_slice())
}

/// Largest modulus of the channel spectrum on traceless operators, from
/// Arnoldi iteration seeded with random traceless probes after a few power
/// steps. Exact once the Krylov space spans the traceless subspace (N ≤ 8).
pub fn subleading_modulus(ch: &KrausChannel, n_probes: usize) -> f64 {
    let n = ch.dim();
    let dim = n * n - 1;
    let m = dim.min(KRYLOV_MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let apply = |x: &Operator| -> Operator {
        traceless(
            ch.apply_operator(x)
                .expect("dimension checked by construction"),
        )
    };
    let mut best: f64 = 0.0;
    for _ in 0..n_probes.max(1) {
        let mut x = traceless(Operator::from_fn(n, n, |_, _| {
            Complex64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        }));
        x.unscale_mut(frobenius(&x));
        let mut dead = false;
        for _ in 0..WARMUP_STEPS {
            let y = apply(&x);
            let norm = frobenius(&y);
            if norm < 1e-13 {
                dead = true;
                break;
            }
            x = y.unscale(norm);
        }
        if dead {
            continue;
        }
        best = best.max(arnoldi_radius(&apply, x, m));
    }
    best
}

fn arnoldi_radius(apply: &impl Fn(&Operator) -> Operator, start: Operator, m: usize) -> f64 {
    let n = start.nrows();
    let mut basis: Vec<DVector<Complex64>> = vec![flatten(&start)];
    let mut h = DMatrix::from_element(m + 1, m, Complex64::new(0.0, 0.0));
    let mut size = m;
    for j in 0..m {
        let op = Operator::from_column_slice(n, n, basis[j].as_slice());
        let mut w = flatten(&apply(&op));
        let scale = w.norm();
        // two passes of Gram–Schmidt keep the basis orthogonal
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = v.dotc(&w);
                h[(i, j)] += c;
                w.axpy(-c, v, ONE);
            }
        }
        let beta = w.norm();
        if beta <= 1e-12 * scale.max(1e-300) {
            size = j + 1;
            break;
        }
        h[(j + 1, j)] = Complex64::new(beta, 0.0);
        if j + 1 < m {
            basis.push(w.unscale(beta));
        }
    }
    let square = h.view((0, 0), (size, size)).into_owned();
    match eigenvalues(&square) {
        Ok(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Err(_) => 0.0,
    }
}

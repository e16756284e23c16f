//! The quantized torus: position/momentum bases, discrete Fourier transform,
//! Schwinger translations, coherent states and Husimi functions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{check_square, max_abs, outer, Operator, ZERO};
use crate::{Error, Result};

/// Number of periodic images summed on each side when building coherent states.
const COHERENT_IMAGES: i64 = 2;

/// Hilbert space of dimension `N = 1/h` on the unit torus, with Floquet
/// boundary phases `theta_q`, `theta_p` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusSpace {
    n: usize,
    theta_q: f64,
    theta_p: f64,
}

impl TorusSpace {
    pub fn new(n: usize, theta_q: f64, theta_p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        for (name, v) in [("theta_q", theta_q), ("theta_p", theta_p)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::ParameterOutOfRange {
                    name,
                    value: v,
                    reason: "boundary phase must lie in [0, 1)",
                });
            }
        }
        Ok(Self {
            n,
            theta_q,
            theta_p,
        })
    }

    /// Periodic boundary conditions, `theta_q = theta_p = 0`.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 0.0, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn theta_q(&self) -> f64 {
        self.theta_q
    }

    pub fn theta_p(&self) -> f64 {
        self.theta_p
    }

    /// Effective Planck constant `1/(2πN)`.
    pub fn hbar_eff(&self) -> f64 {
        1.0 / (2.0 * PI * self.n as f64)
    }

    /// Position of the `j`-th basis state, `(j + theta_q)/N`.
    pub fn q_coord(&self, j: usize) -> f64 {
        (j as f64 + self.theta_q) / self.n as f64
    }

    /// Momentum of the `k`-th momentum eigenstate, `(k + theta_p)/N`.
    pub fn p_coord(&self, k: usize) -> f64 {
        (k as f64 + self.theta_p) / self.n as f64
    }

    /// `F_{nm} = exp(−2πi (n+θp)(m+θq)/N)/√N`, mapping position amplitudes
    /// to momentum amplitudes.
    pub fn fourier_matrix(&self) -> Operator {
        fourier_dim(self.n, self.theta_q, self.theta_p)
    }

    /// Momentum eigenstate `|p_k⟩` in position components.
    pub fn momentum_ket(&self, k: usize) -> DVector<Complex64> {
        let n = self.n as f64;
        let pk = k as f64 + self.theta_p;
        DVector::from_fn(self.n, |j, _| {
            let phase = 2.0 * PI * (j as f64 + self.theta_q) * pk / n;
            Complex64::from_polar(1.0 / n.sqrt(), phase)
        })
    }

    /// Converts an operator given in momentum-basis components to the position basis.
    pub fn from_momentum(&self, a_mom: &Operator) -> Operator {
        let f = self.fourier_matrix();
        f.adjoint() * a_mom * f
    }

    /// Converts a position-basis operator to momentum-basis components.
    pub fn to_momentum(&self, a: &Operator) -> Operator {
        let f = self.fourier_matrix();
        &f * a * f.adjoint()
    }

    /// `|p_k⟩⟨p_k|`
    pub fn momentum_projector(&self, k: usize) -> Operator {
        let v = self.momentum_ket(k);
        outer(&v, &v)
    }

    /// Cyclic momentum translation `V^s`, `V|p_k⟩ = |p_{k+1 mod N}⟩`.
    pub fn momentum_shift(&self, s: i64) -> Operator {
        let n = self.n;
        let s = s.rem_euclid(n as i64) as usize;
        let mut perm = DMatrix::from_element(n, n, ZERO);
        for k in 0..n {
            perm[((k + s) % n, k)] = Complex64::new(1.0, 0.0);
        }
        self.from_momentum(&perm)
    }

    /// Schwinger translation `T_(a,b) = ω^{ab/2} X^a Z^b`, `ω = e^{2πi/N}`, with
    /// `X|q_j⟩ = |q_{j+1}⟩` and `Z|q_j⟩ = ω^j |q_j⟩`, so `T_(a,b)† = T_(−a,−b)`.
    /// Shifting `a` by N changes the operator by the sign `(−1)^b`.
    pub fn translation(&self, a: i64, b: i64) -> Operator {
        let n = self.n;
        let two_n = 2 * n as i64;
        let mut t = DMatrix::from_element(n, n, ZERO);
        for j in 0..n {
            // ω^{ab/2} ω^{bj}; exponent reduced mod 2N to keep the phase argument small.
            let e = (a.rem_euclid(two_n) * b.rem_euclid(two_n)
                + 2 * b.rem_euclid(two_n) * j as i64)
                .rem_euclid(two_n);
            let row = (j as i64 + a).rem_euclid(n as i64) as usize;
            t[(row, j)] = Complex64::from_polar(1.0, PI * e as f64 / n as f64);
        }
        t
    }

    /// Normalized periodized Gaussian centered at `(q, p)`.
    pub fn coherent_state(&self, q: f64, p: f64) -> StateVector {
        StateVector::normalized(self.coherent_amplitudes(q, p))
            .expect("coherent state amplitudes are never all zero")
    }

    fn coherent_amplitudes(&self, q: f64, p: f64) -> DVector<Complex64> {
        let n = self.n as f64;
        DVector::from_fn(self.n, |j, _| {
            let qj = self.q_coord(j);
            (-COHERENT_IMAGES..=COHERENT_IMAGES)
                .map(|w| {
                    let x = qj - q + w as f64;
                    Complex64::from_polar((-PI * n * x * x).exp(), 2.0 * PI * n * p * x)
                })
                .sum()
        })
    }

    /// Husimi function `⟨z|A|z⟩` of a Hermitian operator on an `nq × np` grid of
    /// cell centers.
    pub fn husimi(&self, a: &Operator, nq: usize, np: usize) -> Result<HusimiGrid> {
        let dim = check_square(a)?;
        if dim != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: dim,
            });
        }
        let tol = 1e-10 * max_abs(a).max(1.0);
        let rows: Vec<Result<Vec<f64>>> = (0..nq)
            .into_par_iter()
            .map(|iq| {
                let q = grid_coord(iq, nq);
                let mut states = DMatrix::from_element(self.n, np, ZERO);
                for ip in 0..np {
                    let z = self.coherent_state(q, grid_coord(ip, np));
                    states.set_column(ip, z.amplitudes());
                }
                let az = a * &states;
                (0..np)
                    .map(|ip| {
                        let v = states.column(ip).dotc(&az.column(ip));
                        if v.im.abs() > tol {
                            Err(Error::NotHermitian {
                                residual: v.im.abs(),
                            })
                        } else {
                            Ok(v.re)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut values = DMatrix::zeros(nq, np);
        for (iq, row) in rows.into_iter().enumerate() {
            for (ip, v) in row?.into_iter().enumerate() {
                values[(iq, ip)] = v;
            }
        }
        Ok(HusimiGrid { values })
    }

    /// Husimi grid at the default 2N × 2N resolution.
    pub fn husimi_default(&self, a: &Operator) -> Result<HusimiGrid> {
        self.husimi(a, 2 * self.n, 2 * self.n)
    }
}

/// Fourier matrix for an arbitrary dimension (including the `N = 1` blocks
/// used by the baker map).
pub(crate) fn fourier_dim(n: usize, theta_q: f64, theta_p: f64) -> Operator {
    let nf = n as f64;
    DMatrix::from_fn(n, n, |r, c| {
        let phase = -2.0 * PI * (r as f64 + theta_p) * (c as f64 + theta_q) / nf;
        Complex64::from_polar(1.0 / nf.sqrt(), phase)
    })
}

/// Cell-center coordinate `(i + 1/2)/n`.
pub fn grid_coord(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

/// A unit-norm state in position components.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Normalizes `amps`; fails on the zero vector.
    pub fn normalized(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> Operator {
        outer(&self.amps, &self.amps)
    }

    pub fn apply(&self, u: &Operator) -> Result<StateVector> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.ncols(),
            });
        }
        StateVector::normalized(u * &self.amps)
    }
}

/// Real phase-space field sampled at cell centers `q_j = (j+½)/nq`,
/// `p_k = (k+½)/np`; `values[(j, k)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub values: DMatrix<f64>,
}

impl HusimiGrid {
    pub fn nq(&self) -> usize {
        self.values.nrows()
    }

    pub fn np(&self) -> usize {
        self.values.ncols()
    }

    pub fn qs(&self) -> Vec<f64> {
        (0..self.nq()).map(|j| grid_coord(j, self.nq())).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.np()).map(|k| grid_coord(k, self.np())).collect()
    }

    pub fn mean(&self) -> f64 {
        self.values.mean()
    }

    /// Fraction of grid points with value strictly below `threshold`.
    pub fn fraction_below(&self, threshold: f64) -> f64 {
        let count = self.values.iter().filter(|&&v| v < threshold).count();
        count as f64 / self.values.len() as f64
    }

    /// `(j, k)` of the largest value.
    pub fn argmax(&self) -> (usize, usize) {
        let (mut best, mut at) = (f64::NEG_INFINITY, (0, 0));
        for k in 0..self.np() {
            for j in 0..self.nq() {
                if self.values[(j, k)] > best {
                    best = self.values[(j, k)];
                    at = (j, k);
                }
            }
        }
        at
    }

    /// Weighted circular mean of both coordinates, each in `[0, 1)`. Meaningful
    /// for non-negative fields such as Husimi functions of states.
    pub fn circular_centroid(&self) -> (f64, f64) {
        let (qs, ps) = (self.qs(), self.ps());
        let mut sq = Complex64::new(0.0, 0.0);
        let mut sp = Complex64::new(0.0, 0.0);
        for j in 0..self.nq() {
            for k in 0..self.np() {
                let w = self.values[(j, k)];
                sq += Complex64::from_polar(w, 2.0 * PI * qs[j]);
                sp += Complex64::from_polar(w, 2.0 * PI * ps[k]);
            }
        }
        let wrap = |z: Complex64| (z.arg() / (2.0 * PI)).rem_euclid(1.0);
        (wrap(sq), wrap(sp))
    }

    /// Weighted mean of the momentum taken in `[−½, ½)`.
    pub fn signed_momentum_mean(&self) -> f64 {
        let ps = self.ps();
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..self.nq() {
            for (k, &p) in ps.iter().enumerate() {
                let w = self.values[(j, k)];
                num += w * if p >= 0.5 { p - 1.0 } else { p };
                den += w;
            }
        }
        num / den
    }
}

/// Signed distance between two points on the unit circle, in `[−½, ½)`.
pub fn circular_difference(a: f64, b: f64) -> f64 {
    (a - b + 0.5).rem_euclid(1.0) - 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, unitarity_residual};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn space_construction() {
        let s = TorusSpace::new(8, 0.0, 0.0).unwrap();
        assert!((s.hbar_eff() - 1.0 / (16.0 * PI)).abs() < 1e-15);
        assert!((s.hbar_eff() * 2.0 * PI * 8.0 - 1.0).abs() < 1e-15);
        let anti = TorusSpace::new(64, 0.5, 0.5).unwrap();
        assert_eq!(anti.theta_q(), 0.5);
        assert_eq!(
            TorusSpace::new(1, 0.0, 0.0),
            Err(Error::InvalidDimension(1))
        );
        assert!(TorusSpace::new(4, 1.0, 0.0).is_err());
    }

    #[test]
    fn two_point_fourier() {
        let f = TorusSpace::periodic(2).unwrap().fourier_matrix();
        let r = 1.0 / 2f64.sqrt();
        let expected =
            DMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]);
        assert!(max_abs(&(f - expected)) < 1e-15);
    }

    #[test]
    fn fourier_entry_n4() {
        let f = TorusSpace::periodic(4).unwrap().fourier_matrix();
        assert!((f[(1, 1)] - c(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn fourier_and_translations_unitary() {
        for n in 2..=128 {
            let s = TorusSpace::periodic(n).unwrap();
            assert!(unitarity_residual(&s.fourier_matrix()) < 1e-12, "F, n={n}");
            let anti = TorusSpace::new(n, 0.5, 0.5).unwrap();
            assert!(unitarity_residual(&anti.fourier_matrix()) < 1e-12);
            for (a, b) in [
                (1, 0),
                (0, 1),
                (3, 5),
                (-2, 7),
                (n as i64 - 1, n as i64 / 2),
            ] {
                assert!(unitarity_residual(&s.translation(a, b)) < 1e-12, "T n={n}");
            }
        }
    }

    #[test]
    fn translation_identity_and_adjoint() {
        let s = TorusSpace::periodic(5).unwrap();
        assert!(max_abs(&(s.translation(0, 0) - identity(5))) < 1e-15);
        assert!(max_abs(&(s.translation(5, -10) - identity(5))) < 1e-15);
        assert!(max_abs(&(s.translation(-1, 3) + s.translation(4, 3))) < 1e-12);
        for (a, b) in [(1, 2), (2, 3), (4, 4)] {
            assert!(unitarity_residual(&s.translation(a, b)) < 1e-12);
        }
        let even = TorusSpace::periodic(6).unwrap();
        for (a, b) in [(1, 2), (2, 3), (5, 1)] {
            let t = even.translation(a, b);
            assert!(max_abs(&(t.adjoint() - even.translation(-a, -b))) < 1e-12);
        }
    }

    #[test]
    fn translation_traces_n4() {
        let s = TorusSpace::periodic(4).unwrap();
        let t12 = s.translation(1, 2);
        let t21 = s.translation(2, 1);
        assert!(((t12.adjoint() * &t12).trace() - c(4.0, 0.0)).norm() < 1e-12);
        assert!((t12.adjoint() * &t21).trace().norm() < 1e-12);
    }

    #[test]
    fn translation_orthogonality_exhaustive() {
        for n in 2..=8usize {
            let s = TorusSpace::periodic(n).unwrap();
            let ts: Vec<_> = (0..n * n)
                .map(|i| s.translation((i / n) as i64, (i % n) as i64))
                .collect();
            for (i, ti) in ts.iter().enumerate() {
                for (j, tj) in ts.iter().enumerate() {
                    let tr = (ti.adjoint() * tj).trace();
                    let expected = if i == j { n as f64 } else { 0.0 };
                    assert!((tr - c(expected, 0.0)).norm() < 1e-10, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn fourier_diagonalizes_position_shift() {
        for n in [3, 8, 16] {
            let s = TorusSpace::periodic(n).unwrap();
            let f = s.fourier_matrix();
            let d = &f * s.translation(1, 0) * f.adjoint();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(d[(i, j)].norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn momentum_shift_moves_momentum_states() {
        let s = TorusSpace::new(8, 0.5, 0.5).unwrap();
        let v = s.momentum_shift(3);
        let moved = &v * s.momentum_ket(6);
        assert!((moved - s.momentum_ket(1)).norm() < 1e-12);
        assert!(unitarity_residual(&v) < 1e-12);
    }

    #[test]
    fn coherent_states() {
        let s = TorusSpace::periodic(64).unwrap();
        let z = s.coherent_state(0.3, 0.7);
        assert!((z.amplitudes().norm() - 1.0).abs() < 1e-12);
        let a = s.coherent_state(0.0, 0.0);
        let b = s.coherent_state(0.5, 0.0);
        assert!(a.inner(&b).norm() < 1e-6);
        assert!((a.inner(&a).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn husimi_of_identity_is_one() {
        let s = TorusSpace::periodic(8).unwrap();
        let h = s.husimi(&identity(8), 16, 16).unwrap();
        assert!(h.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn husimi_of_zero_momentum_peaks_at_p_zero() {
        let s = TorusSpace::periodic(32).unwrap();
        let h = s.husimi(&s.momentum_projector(0), 64, 64).unwrap();
        let (_, k) = h.argmax();
        assert!(k == 0 || k == 63, "row {k}");
    }

    #[test]
    fn husimi_dimension_errors() {
        let s = TorusSpace::periodic(8).unwrap();
        assert!(matches!(
            s.husimi(&identity(4), 4, 4),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            s.husimi(&DMatrix::from_element(8, 4, ZERO), 4, 4),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn husimi_linearity() {
        let s = TorusSpace::periodic(8).unwrap();
        let a = s.momentum_projector(2);
        let b = s.coherent_state(0.2, 0.6).projector();
        let (alpha, beta) = (0.7, -1.3);
        let combined = s.husimi(&(a.scale(alpha) + b.scale(beta)), 12, 10).unwrap();
        let ha = s.husimi(&a, 12, 10).unwrap();
        let hb = s.husimi(&b, 12, 10).unwrap();
        let diff = combined.values - (ha.values * alpha + hb.values * beta);
        assert!(diff.amax() < 1e-10);
    }

    #[test]
    fn centroid_wraps() {
        let s = TorusSpace::periodic(32).unwrap();
        let h = s
            .husimi(&s.coherent_state(0.98, 0.02).projector(), 64, 64)
            .unwrap();
        let (q, p) = h.circular_centroid();
        assert!(circular_difference(q, 0.98).abs() < 0.02);
        assert!(circular_difference(p, 0.02).abs() < 0.02);
    }
}

//! Quantized baker and standard maps, and the classical dissipative standard
//! map with its attractor histogram.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::linalg::{Operator, ZERO};
use crate::torus::{fourier_dim, TorusSpace};
use crate::{Error, Result};

/// Balazs–Voros baker `B = F_N† · diag(F_{N/2}, F_{N/2})`; needs even N and
/// antiperiodic boundary phases `(½, ½)`.
pub fn quantum_baker(space: &TorusSpace) -> Result<Operator> {
    let n = space.dim();
    if n % 2 != 0 {
        return Err(Error::OddDimension { n });
    }
    if space.theta_q() != 0.5 || space.theta_p() != 0.5 {
        return Err(Error::ParameterOutOfRange {
            name: "theta",
            value: space.theta_q(),
            reason: "the baker map is built on the antiperiodic torus (1/2, 1/2)",
        });
    }
    let half = n / 2;
    let fh = fourier_dim(half, 0.5, 0.5);
    let mut blocks = DMatrix::from_element(n, n, ZERO);
    blocks.view_mut((0, 0), (half, half)).copy_from(&fh);
    blocks.view_mut((half, half), (half, half)).copy_from(&fh);
    Ok(space.fourier_matrix().adjoint() * blocks)
}

/// Kicked-rotor quantization `U = U_kin · U_kick` with
/// `U_kick = exp(2πiNk cos(2πq))` (position diagonal) and
/// `U_kin = exp(−iπ n²/N)` (momentum diagonal, `n` taken in `[−N/2, N/2)`).
pub fn quantum_standard_map(space: &TorusSpace, k: f64) -> Operator {
    let n = space.dim();
    let nf = n as f64;
    let kick = DVector::from_fn(n, |j, _| {
        Complex64::from_polar(1.0, TAU * nf * k * (TAU * space.q_coord(j)).cos())
    });
    let kinetic = DVector::from_fn(n, |m, _| {
        let signed = if m >= n.div_ceil(2) {
            m as f64 - nf
        } else {
            m as f64
        } + space.theta_p();
        Complex64::from_polar(1.0, -PI * signed * signed / nf)
    });
    let f = space.fourier_matrix();
    // F† diag(kinetic) F diag(kick)
    let mut right = f.clone();
    for (mut row, phase) in right.row_iter_mut().zip(kinetic.iter()) {
        row *= *phase;
    }
    let mut u = f.adjoint() * right;
    for (mut col, phase) in u.column_iter_mut().zip(kick.iter()) {
        col *= *phase;
    }
    u
}

/// `ρ ↦ U ρ U†`
pub fn unitary_channel(space: &TorusSpace, u: Operator) -> Result<KrausChannel> {
    KrausChannel::from_unitary(*space, u)
}

/// Point of the classical torus, `q ∈ [0, 1)`, `p ∈ [−½, ½)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPoint {
    pub q: f64,
    pub p: f64,
}

impl ClassicalPoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self {
            q: q.rem_euclid(1.0),
            p: reduce_momentum(p),
        }
    }
}

fn reduce_momentum(p: f64) -> f64 {
    let r = (p + 0.5).rem_euclid(1.0) - 0.5;
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// One step of the dissipative standard map: `p' = δp − 2πk sin(2πq)`,
/// then `q' = q + p'`.
pub fn classical_step(pt: ClassicalPoint, k: f64, delta: f64) -> ClassicalPoint {
    let p = reduce_momentum(delta * pt.p - TAU * k * (TAU * pt.q).sin());
    ClassicalPoint {
        q: (pt.q + p).rem_euclid(1.0),
        p,
    }
}

/// Counts on an `nq × np` grid over `q ∈ [0,1)`, `p ∈ [−½, ½)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseHistogram {
    pub nq: usize,
    pub np: usize,
    /// Row-major in `q`: `counts[iq * np + ip]`.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl PhaseHistogram {
    pub fn empty(nq: usize, np: usize) -> Self {
        Self {
            nq,
            np,
            counts: vec![0; nq * np],
            total: 0,
        }
    }

    pub fn record(&mut self, pt: ClassicalPoint) {
        let iq = ((pt.q * self.nq as f64) as usize).min(self.nq - 1);
        let ip = (((pt.p + 0.5) * self.np as f64) as usize).min(self.np - 1);
        self.counts[iq * self.np + ip] += 1;
        self.total += 1;
    }

    pub fn count(&self, iq: usize, ip: usize) -> u64 {
        self.counts[iq * self.np + ip]
    }

    pub fn merge(&mut self, other: &PhaseHistogram) -> Result<()> {
        if (self.nq, self.np) != (other.nq, other.np) {
            return Err(Error::GridMismatch(self.nq, self.np, other.nq, other.np));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn occupied_fraction(&self) -> f64 {
        self.counts.iter().filter(|&&c| c > 0).count() as f64 / self.counts.len() as f64
    }

    /// Counts as an `nq × np` field in the centered layout (`p` from −½ upward).
    pub fn centered_field(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.nq, self.np, |iq, ip| self.count(iq, ip) as f64)
    }

    /// Counts rearranged so that momentum bin `k` covers `[k/np, (k+1)/np)`,
    /// the layout of [`crate::HusimiGrid`]. Needs an even `np`.
    pub fn unit_field(&self) -> Result<DMatrix<f64>> {
        if self.np % 2 != 0 {
            return Err(Error::OddDimension { n: self.np });
        }
        let half = self.np / 2;
        Ok(DMatrix::from_fn(self.nq, self.np, |iq, k| {
            self.count(iq, (k + half) % self.np) as f64
        }))
    }
}

/// Parameters of a classical attractor run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorParams {
    pub k: f64,
    pub delta: f64,
    pub trajectories: usize,
    pub steps: usize,
    pub transient: usize,
    pub nq: usize,
    pub np: usize,
    pub seed: u64,
}

/// Iterates uniformly random initial points and bins every step after the
/// transient. Each trajectory draws from its own stream of a seeded ChaCha
/// generator, so the result does not depend on thread count.
pub fn classical_attractor(params: &AttractorParams) -> Result<PhaseHistogram> {
    if params.transient >= params.steps {
        return Err(Error::ParameterOutOfRange {
            name: "transient",
            value: params.transient as f64,
            reason: "transient must be shorter than the run",
        });
    }
    if !(params.delta > 0.0 && params.delta <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "delta",
            value: params.delta,
            reason: "friction factor must lie in (0, 1]",
        });
    }
    if params.nq == 0 || params.np == 0 {
        return Err(Error::GridMismatch(params.nq, params.np, 1, 1));
    }
    let run = |traj: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(traj as u64);
        let mut pt = ClassicalPoint::new(rng.random::<f64>(), rng.random::<f64>() - 0.5);
        let mut hist = PhaseHistogram::empty(params.nq, params.np);
        for step in 0..params.steps {
            pt = classical_step(pt, params.k, params.delta);
            if step >= params.transient {
                hist.record(pt);
            }
        }
        hist
    };
    let hist = (0..params.trajectories).into_par_iter().map(run).reduce(
        || PhaseHistogram::empty(params.nq, params.np),
        |mut a, b| {
            a.merge(&b).expect("same grid");
            a
        },
    );
    Ok(hist)
}

//! Noise families on the torus: random unitary (diffusive) processes, the
//! sloppy-baker measurement noise, generalized amplitude damping and the
//! simple dissipation channel `D_{ε,α}`.
//!
//! Transition operators `P_ij = |i⟩⟨j|` act on momentum eigenstates; the
//! returned operators are in position components like everything else.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{DensityMatrix, KrausChannel};
use crate::linalg::{identity, max_abs, outer, Operator, ZERO};
use crate::torus::TorusSpace;
use crate::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-12;

/// `P_ij = |p_i⟩⟨p_j|`
pub fn transition_op(space: &TorusSpace, i: usize, j: usize) -> Result<Operator> {
    let n = space.dim();
    for index in [i, j] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    Ok(outer(&space.momentum_ket(i), &space.momentum_ket(j)))
}

/// Non-negative matrix `p_ij` (probability of the transition `j → i`) whose
/// columns sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticCoefficients {
    p: DMatrix<f64>,
}

impl StochasticCoefficients {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        if p.nrows() != p.ncols() {
            return Err(Error::NotSquare {
                rows: p.nrows(),
                cols: p.ncols(),
            });
        }
        if let Some(&v) = p.iter().find(|&&v| !(v >= 0.0)) {
            return Err(Error::ParameterOutOfRange {
                name: "p_ij",
                value: v,
                reason: "coefficients must be non-negative",
            });
        }
        for (j, col) in p.column_iter().enumerate() {
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::Spec(format!("column {j} sums to {sum}, not 1")));
            }
        }
        Ok(Self { p })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Rows also sum to one; the corresponding channel is then unital.
    pub fn is_doubly_stochastic(&self) -> bool {
        self.p
            .row_iter()
            .all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= STOCHASTIC_TOL)
    }
}

/// `D_ε(ρ) = (1−ε)ρ + ε Σ_ij p_ij P_ij ρ P_ij†`
pub fn s_model_channel(
    space: &TorusSpace,
    eps: f64,
    coeffs: &StochasticCoefficients,
) -> Result<KrausChannel> {
    check_eps(eps)?;
    let n = space.dim();
    if coeffs.p.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coeffs.p.nrows(),
        });
    }
    let mut kraus = Vec::new();
    if eps < 1.0 {
        kraus.push(identity(n).scale((1.0 - eps).sqrt()));
    }
    if eps > 0.0 {
        let kets: Vec<_> = (0..n).map(|k| space.momentum_ket(k)).collect();
        for j in 0..n {
            for i in 0..n {
                let w = coeffs.p[(i, j)];
                if w > 0.0 {
                    kraus.push(outer(&kets[i], &kets[j]).scale((eps * w).sqrt()));
                }
            }
        }
    }
    KrausChannel::validated(*space, kraus)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::ParameterOutOfRange {
            name: "eps",
            value: eps,
            reason: "coupling must lie in [0, 1]",
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            reason: "alpha must lie in [0, 1]",
        });
    }
    Ok(())
}

/// Target index `[α i] = floor(α i)` of each source momentum `i = 0..N−1`.
pub fn sdc_index_map(n: usize, alpha: f64) -> Vec<usize> {
    (0..n)
        .map(|i| ((alpha * i as f64).floor() as usize).min(n - 1))
        .collect()
}

/// Stochastic matrix of `D_{ε,α}`: a single 1 at `([αi], i)` in each column.
pub fn sdc_coefficients(n: usize, alpha: f64) -> Result<StochasticCoefficients> {
    check_alpha(alpha)?;
    let mut p = DMatrix::zeros(n, n);
    for (i, t) in sdc_index_map(n, alpha).into_iter().enumerate() {
        p[(t, i)] = 1.0;
    }
    StochasticCoefficients::new(p)
}

/// Simple dissipation channel `D_{ε,α}`: identity with weight `1−ε`, and
/// momentum transitions `i → [αi]` with weight `ε`.
pub fn sdc_channel(space: &TorusSpace, eps: f64, alpha: f64) -> Result<KrausChannel> {
    let coeffs = sdc_coefficients(space.dim(), alpha)?;
    s_model_channel(space, eps, &coeffs)
}

fn target_multiplicities(n: usize, alpha: f64) -> Vec<usize> {
    let mut mult = vec![0usize; n];
    for t in sdc_index_map(n, alpha) {
        mult[t] += 1;
    }
    mult
}

/// `η = (ε²/N)(Σ_t mult(t)² − N)`, with `mult(t)` the number of sources sent to `t`.
pub fn sdc_eta_exact(space: &TorusSpace, eps: f64, alpha: f64) -> Result<f64> {
    check_eps(eps)?;
    check_alpha(alpha)?;
    let n = space.dim();
    let sum_sq: usize = target_multiplicities(n, alpha).iter().map(|m| m * m).sum();
    Ok(eps * eps / n as f64 * (sum_sq as f64 - n as f64))
}

/// Continuum approximation `η ≈ ε²(1−α)/α`.
pub fn sdc_eta_analytic(eps: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            reason: "the continuum formula needs 0 < alpha <= 1",
        });
    }
    Ok(eps * eps * (1.0 - alpha) / alpha)
}

/// `Γ = (ε/N) Σ_i (P_{[αi][αi]} − P_ii)`, built directly from the index map.
pub fn sdc_gamma(space: &TorusSpace, eps: f64, alpha: f64) -> Result<Operator> {
    check_eps(eps)?;
    check_alpha(alpha)?;
    let n = space.dim();
    let mut diag = DMatrix::from_element(n, n, ZERO);
    for (i, t) in sdc_index_map(n, alpha).into_iter().enumerate() {
        diag[(t, t)] += Complex64::new(1.0, 0.0);
        diag[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    Ok(space.from_momentum(&diag).scale(eps / n as f64))
}

/// Projective half-torus measurement in momentum followed, on the upper half,
/// by a momentum translation of `Δ/2`: Kraus operators `{Π_b, V^{−s} Π_t}`
/// with `s = NΔ/2`.
pub fn sloppy_noise(space: &TorusSpace, delta: f64) -> Result<KrausChannel> {
    let n = space.dim();
    if n % 2 != 0 {
        return Err(Error::OddDimension { n });
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::ParameterOutOfRange {
            name: "delta",
            value: delta,
            reason: "delta must lie in [0, 1]",
        });
    }
    let s = n as f64 * delta / 2.0;
    if (s - s.round()).abs() > 1e-9 {
        return Err(Error::ParameterQuantization {
            name: "delta",
            value: delta,
            n,
        });
    }
    let shift = s.round() as i64;
    let (bottom, top) = half_projectors(space);
    let moved = space.momentum_shift(-shift) * top;
    KrausChannel::new(*space, vec![bottom, moved])
}

/// Projectors onto momentum indices `0..N/2` and `N/2..N`.
pub fn half_projectors(space: &TorusSpace) -> (Operator, Operator) {
    let n = space.dim();
    let mut bottom = DMatrix::from_element(n, n, ZERO);
    let mut top = DMatrix::from_element(n, n, ZERO);
    for k in 0..n {
        let target = if k < n / 2 { &mut bottom } else { &mut top };
        target[(k, k)] = Complex64::new(1.0, 0.0);
    }
    (space.from_momentum(&bottom), space.from_momentum(&top))
}

/// Coefficients `c_n^k` of a generalized amplitude damping model, with Kraus
/// operators `A_k = Σ_n c_n^k |n⟩⟨n+k|` in the momentum basis.
///
/// In a clipped model every `(n, k)` must satisfy `0 ≤ n+k < N`; a periodic
/// model reduces `k` and `n+k` mod N.
#[derive(Debug, Clone, PartialEq)]
pub struct GadModel {
    n: usize,
    periodic: bool,
    coeffs: BTreeMap<(usize, i64), Complex64>,
}

impl GadModel {
    pub fn new(
        n: usize,
        coeffs: impl IntoIterator<Item = ((usize, i64), Complex64)>,
        periodic: bool,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let mut map = BTreeMap::new();
        for ((idx, k), c) in coeffs {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
            let k = if periodic {
                k.rem_euclid(n as i64)
            } else {
                let target = idx as i64 + k;
                if target < 0 || target >= n as i64 {
                    return Err(Error::IndexOutOfRange {
                        index: target.unsigned_abs() as usize,
                        n,
                    });
                }
                k
            };
            *map.entry((idx, k)).or_insert(ZERO) += c;
        }
        let model = Self {
            n,
            periodic,
            coeffs: map,
        };
        let residual = model.tp_residual();
        if residual > STOCHASTIC_TOL {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(model)
    }

    /// Random clipped model: each source level `i` spreads its population over
    /// all levels with random weights and random phases.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = Vec::new();
        for i in 0..n {
            let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            for (l, w) in weights.into_iter().enumerate() {
                let phase = rng.random::<f64>() * std::f64::consts::TAU;
                let k = i as i64 - l as i64;
                coeffs.push(((l, k), Complex64::from_polar((w / total).sqrt(), phase)));
            }
        }
        Self::new(n, coeffs, false)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn coefficient(&self, idx: usize, k: i64) -> Complex64 {
        let k = if self.periodic {
            k.rem_euclid(self.n as i64)
        } else {
            k
        };
        self.coeffs.get(&(idx, k)).copied().unwrap_or(ZERO)
    }

    fn wrap(&self, idx: i64) -> Option<usize> {
        let n = self.n as i64;
        if self.periodic {
            Some(idx.rem_euclid(n) as usize)
        } else if (0..n).contains(&idx) {
            Some(idx as usize)
        } else {
            None
        }
    }

    /// `m^a_{i,l} = c_l^{i−l} conj(c_{l−a}^{i−l})`: the image of `|i⟩⟨i−a|`
    /// has weight `m^a_{i,l}` on `|l⟩⟨l−a|`.
    pub fn m_matrix(&self, skewness: i64) -> DMatrix<Complex64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, l| {
            let k = i as i64 - l as i64;
            match (
                self.wrap(i as i64 - skewness),
                self.wrap(l as i64 - skewness),
            ) {
                (Some(_), Some(l_shift)) => {
                    self.coefficient(l, k) * self.coefficient(l_shift, k).conj()
                }
                _ => ZERO,
            }
        })
    }

    /// Transition probabilities `m⁰_{i,l} = |c_l^{i−l}|²`.
    pub fn m0(&self) -> DMatrix<f64> {
        self.m_matrix(0).map(|z| z.re)
    }

    /// `max_i |Σ_l m⁰_{i,l} − 1|`
    pub fn tp_residual(&self) -> f64 {
        self.m0()
            .row_iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Kraus form of a generalized amplitude damping model.
pub fn gad_channel(space: &TorusSpace, model: &GadModel) -> Result<KrausChannel> {
    let n = space.dim();
    if model.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: model.n,
        });
    }
    let mut by_k: BTreeMap<i64, DMatrix<Complex64>> = BTreeMap::new();
    for (&(idx, k), &c) in &model.coeffs {
        let col = model
            .wrap(idx as i64 + k)
            .expect("validated at construction");
        by_k.entry(k)
            .or_insert_with(|| DMatrix::from_element(n, n, ZERO))[(idx, col)] += c;
    }
    let kraus = by_k.values().map(|a| space.from_momentum(a)).collect();
    KrausChannel::new(*space, kraus)
}

/// `η = (1/N) Σ_l (Σ_i m⁰_{i,l})² − 1`
pub fn gad_eta(model: &GadModel) -> f64 {
    let m0 = model.m0();
    let n = model.n as f64;
    let sum_sq: f64 = m0
        .column_iter()
        .map(|col| col.iter().sum::<f64>().powi(2))
        .sum();
    sum_sq / n - 1.0
}

/// Outcome of [`gad_translation_diagonal`].
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationDiagonal {
    pub diagonal: bool,
    /// `weights[s]` multiplies `V^s ρ V^{−s}`, with `V` the unit momentum
    /// translation. For a periodic model with `c_n^k = c(k)` this is `|c(−s)|²`.
    pub weights: Vec<f64>,
}

/// Tests whether the model is an incoherent mixture of momentum translations,
/// which is the case when `m⁰_{i,l}` depends only on `(i−l) mod N`. The
/// candidate mixture is re-synthesized and compared with the channel.
pub fn gad_translation_diagonal(
    space: &TorusSpace,
    model: &GadModel,
) -> Result<TranslationDiagonal> {
    let n = space.dim();
    let channel = gad_channel(space, model)?;
    let m0 = model.m0();
    let circulant =
        (0..n).all(|i| (0..n).all(|l| (m0[(i, l)] - m0[((i + n - l) % n, 0)]).abs() <= 1e-12));
    if !circulant {
        return Ok(TranslationDiagonal {
            diagonal: false,
            weights: Vec::new(),
        });
    }
    // Population moves i → l = i + s with probability m⁰_{i,i+s} = m⁰_{0,s}.
    let weights: Vec<f64> = (0..n).map(|s| m0[(0, s)]).collect();
    let kraus: Vec<Operator> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(s, &w)| space.momentum_shift(s as i64).scale(w.sqrt()))
        .collect();
    let mixture = KrausChannel::new(*space, kraus)?;
    let matches = if n <= 16 {
        let diff = channel.superoperator_matrix()? - mixture.superoperator_matrix()?;
        max_abs(&diff) < 1e-8
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..8).all(|_| {
            let rho = DensityMatrix::random(n, &mut rng);
            let a = channel.apply(&rho).expect("dimensions agree");
            let b = mixture.apply(&rho).expect("dimensions agree");
            max_abs(&(a.op() - b.op())) < 1e-8
        })
    };
    Ok(TranslationDiagonal {
        diagonal: matches,
        weights: if matches { weights } else { Vec::new() },
    })
}

/// Signed representative of `a mod N` in `[−N/2, N/2)`.
fn symmetric_displacement(a: usize, n: usize) -> i64 {
    let a = a as i64;
    let n = n as i64;
    if a >= (n + 1) / 2 {
        a - n
    } else {
        a
    }
}

/// Random unitary process: Gaussian-weighted mixture of Schwinger translations,
/// `c_ab ∝ exp(−(d(a)² + d(b)²)/(2σ²N²))`.
pub fn rup_gaussian(space: &TorusSpace, sigma: f64) -> Result<KrausChannel> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "sigma",
            value: sigma,
            reason: "width must be positive",
        });
    }
    let n = space.dim();
    let scale = 2.0 * sigma * sigma * (n * n) as f64;
    let mut weights = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (da, db) = (
                symmetric_displacement(a, n) as f64,
                symmetric_displacement(b, n) as f64,
            );
            weights.push(((a, b), (-(da * da + db * db) / scale).exp()));
        }
    }
    // Negligible weights are dropped; the rest are renormalized so the
    // mixture stays exactly trace preserving.
    let cutoff = 1e-30;
    weights.retain(|&(_, w)| w > cutoff);
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    let kraus = weights
        .into_iter()
        .map(|((a, b), w)| {
            space
                .translation(a as i64, b as i64)
                .scale((w / total).sqrt())
        })
        .collect();
    KrausChannel::new(*space, kraus)
}

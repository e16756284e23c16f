//! JSON descriptions of channels and maps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::linalg::Operator;
use crate::maps::{quantum_baker, quantum_standard_map};
use crate::noise::{gad_channel, rup_gaussian, sdc_channel, sloppy_noise, GadModel};
use crate::torus::TorusSpace;
use crate::{Error, Result};

/// `{"type": "sdc", "n": 64, "eps": 0.5, "alpha": 0.25}` and friends. The
/// dimension is optional; a command-line `--n` fills or overrides it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Sdc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        eps: f64,
        alpha: f64,
    },
    Sloppy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        delta: f64,
    },
    Rup {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        sigma: f64,
    },
    /// Entries `[n, k, re, im]` for `c_n^k`.
    Gad {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        c: Vec<(usize, i64, f64, f64)>,
        #[serde(default)]
        periodic: bool,
    },
    /// Each operator is a row-major list of `[re, im]` pairs.
    Kraus {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        ops: Vec<Vec<[f64; 2]>>,
    },
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Identity { n }
            | Self::Sdc { n, .. }
            | Self::Sloppy { n, .. }
            | Self::Rup { n, .. }
            | Self::Gad { n, .. }
            | Self::Kraus { n, .. } => *n,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        match &mut self {
            Self::Identity { n }
            | Self::Sdc { n, .. }
            | Self::Sloppy { n, .. }
            | Self::Rup { n, .. }
            | Self::Gad { n, .. }
            | Self::Kraus { n, .. } => *n = Some(dim),
        }
        self
    }

    /// Contraction strength used for iteration caps.
    pub fn strength(&self) -> Option<f64> {
        match self {
            Self::Sdc { eps, .. } => Some(*eps),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity { .. })
    }

    pub fn build(&self, space: &TorusSpace) -> Result<KrausChannel> {
        if let Some(n) = self.dim() {
            if n != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: n,
                });
            }
        }
        match self {
            Self::Identity { .. } => Ok(KrausChannel::identity(*space)),
            Self::Sdc { eps, alpha, .. } => sdc_channel(space, *eps, *alpha),
            Self::Sloppy { delta, .. } => sloppy_noise(space, *delta),
            Self::Rup { sigma, .. } => rup_gaussian(space, *sigma),
            Self::Gad { c, periodic, .. } => {
                let coeffs = c
                    .iter()
                    .map(|&(idx, k, re, im)| ((idx, k), Complex64::new(re, im)));
                let model = GadModel::new(space.dim(), coeffs, *periodic)?;
                gad_channel(space, &model)
            }
            Self::Kraus { ops, .. } => {
                let n = space.dim();
                let kraus = ops
                    .iter()
                    .map(|flat| {
                        if flat.len() != n * n {
                            return Err(Error::DimensionMismatch {
                                expected: n * n,
                                found: flat.len(),
                            });
                        }
                        Ok(Operator::from_row_iterator(
                            n,
                            n,
                            flat.iter().map(|&[re, im]| Complex64::new(re, im)),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                KrausChannel::new(*space, kraus)
            }
        }
    }
}

/// `{"type": "standard", "k": 0.065}` or `{"type": "baker"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    Standard { k: f64 },
    Baker,
}

impl MapSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    /// The baker lives on the antiperiodic torus, the standard map on the
    /// periodic one.
    pub fn space(&self, n: usize) -> Result<TorusSpace> {
        match self {
            Self::Standard { .. } => TorusSpace::periodic(n),
            Self::Baker => TorusSpace::new(n, 0.5, 0.5),
        }
    }

    pub fn unitary(&self, space: &TorusSpace) -> Result<Operator> {
        match self {
            Self::Standard { k } => Ok(quantum_standard_map(space, *k)),
            Self::Baker => quantum_baker(space),
        }
    }
}

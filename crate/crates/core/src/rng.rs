//! Counter-based deterministic random numbers.
//!
//! Every random quantity in the toolkit is a pure function of (seed, index),
//! so parallel evaluation order can never change a result. The generator is
//! splitmix64 applied to a mixed key; densities are sampled by inverse CDF.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// splitmix64 finalizer: a single well-mixed u64 from a u64.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in [0,1), pure in (seed, stream, index).
pub fn uniform01(seed: u64, stream: u64, index: u64) -> f64 {
    let k = splitmix64(seed ^ splitmix64(stream.wrapping_mul(0xA076_1D64_78BD_642F)));
    let z = splitmix64(k ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB));
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Standard normal via Box-Muller on two counter draws.
pub fn normal(seed: u64, stream: u64, index: u64) -> f64 {
    let u1 = uniform01(seed, stream, 2 * index).max(1e-300);
    let u2 = uniform01(seed, stream, 2 * index + 1);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Coefficient density for the iid bump amplitudes.
///
/// `half_width` scales the canonical supports: uniform on [-w, w],
/// raised cosine (density (1+cos(pi x/w))/(2w)) on [-w, w].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Density {
    Uniform { half_width: f64 },
    RaisedCosine { half_width: f64 },
}

impl Density {
    pub fn from_name(name: &str, half_width: f64) -> Result<Density> {
        match name {
            "uniform" => Ok(Density::Uniform { half_width }),
            "raised-cosine" => Ok(Density::RaisedCosine { half_width }),
            other => Err(Error::UnknownDensity(other.to_string())),
        }
    }

    pub fn half_width(&self) -> f64 {
        match self {
            Density::Uniform { half_width } | Density::RaisedCosine { half_width } => *half_width,
        }
    }

    /// Support is [-half_width, half_width] for both families.
    pub fn support(&self) -> (f64, f64) {
        let w = self.half_width();
        (-w, w)
    }

    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn variance(&self) -> f64 {
        let w = self.half_width();
        match self {
            Density::Uniform { .. } => w * w / 3.0,
            // integral of x^2 (1+cos pi x)/2 over [-1,1], scaled by w^2
            Density::RaisedCosine { .. } => {
                w * w * (1.0 / 3.0 - 2.0 / (std::f64::consts::PI * std::f64::consts::PI))
            }
        }
    }

    /// Inverse CDF at u in [0,1).
    pub fn quantile(&self, u: f64) -> f64 {
        let w = self.half_width();
        match self {
            Density::Uniform { .. } => w * (2.0 * u - 1.0),
            Density::RaisedCosine { .. } => {
                // CDF on [-1,1]: F(x) = (x+1)/2 + sin(pi x)/(2 pi); solve by bisection.
                let (mut lo, mut hi) = (-1.0f64, 1.0f64);
                for _ in 0..64 {
                    let mid = 0.5 * (lo + hi);
                    let f = 0.5 * (mid + 1.0)
                        + (std::f64::consts::PI * mid).sin() / (2.0 * std::f64::consts::PI);
                    if f < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                w * 0.5 * (lo + hi)
            }
        }
    }

    /// Coefficient j of the stream: pure in (seed, j).
    pub fn sample(&self, seed: u64, index: u64) -> f64 {
        self.quantile(uniform01(seed, 0x5eed_c0ef, index))
    }
}

//! Linear and band scales.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::RenderError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Scale {
    Linear {
        domain: (f64, f64),
        range: (f64, f64),
    },
    Band {
        domain: Vec<String>,
        range: (f64, f64),
        padding: f64,
    },
}

/// Smallest 1/2/5 × 10^k not below `v`.
pub fn nice_ceil(v: f64) -> f64 {
    if v <= 0.0 {
        return if v == 0.0 { 0.0 } else { -nice_floor(-v) };
    }
    let mag = libm::pow(10.0, libm::floor(libm::log10(v)));
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * mag >= v * (1.0 - 1e-12) {
            return m * mag;
        }
    }
    10.0 * mag
}

/// Largest 1/2/5 × 10^k not above `v`.
pub fn nice_floor(v: f64) -> f64 {
    if v <= 0.0 {
        return if v == 0.0 { 0.0 } else { -nice_ceil(-v) };
    }
    let mag = libm::pow(10.0, libm::floor(libm::log10(v)));
    for m in [5.0, 2.0, 1.0] {
        if m * mag <= v * (1.0 + 1e-12) {
            return m * mag;
        }
    }
    mag
}

impl Scale {
    /// Zero-baseline scale for sizes; the largest value maps to the far end
    /// of `range`.
    pub fn size(values: &[f64], range: (f64, f64)) -> Result<Scale, RenderError> {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(RenderError::EmptyDomain);
        }
        let hi = if max > 0.0 { max } else { 1.0 };
        Ok(Scale::Linear {
            domain: (0.0, hi),
            range,
        })
    }

    /// Position scale over the nice-rounded data extent.
    pub fn position(values: &[f64], range: (f64, f64)) -> Result<Scale, RenderError> {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        if !lo.is_finite() {
            return Err(RenderError::EmptyDomain);
        }
        if hi - lo <= 0.0 {
            return Err(RenderError::AllValuesEqual(lo));
        }
        Ok(Scale::Linear {
            domain: (nice_floor(lo), nice_ceil(hi)),
            range,
        })
    }

    pub fn band(domain: Vec<String>, range: (f64, f64), padding: f64) -> Scale {
        Scale::Band {
            domain,
            range,
            padding,
        }
    }

    /// Maps a numeric value; band scales return NaN.
    pub fn map(&self, v: f64) -> f64 {
        match self {
            Scale::Linear {
                domain: (d0, d1),
                range: (r0, r1),
            } => {
                if d1 == d0 {
                    return *r0;
                }
                r0 + (v - d0) / (d1 - d0) * (r1 - r0)
            }
            Scale::Band { .. } => f64::NAN,
        }
    }

    pub fn invert(&self, px: f64) -> f64 {
        match self {
            Scale::Linear {
                domain: (d0, d1),
                range: (r0, r1),
            } => {
                if r1 == r0 {
                    return *d0;
                }
                d0 + (px - r0) / (r1 - r0) * (d1 - d0)
            }
            Scale::Band { .. } => f64::NAN,
        }
    }

    /// Distance between consecutive band starts.
    pub fn step(&self) -> f64 {
        match self {
            Scale::Band {
                domain,
                range,
                padding,
            } => {
                let n = domain.len() as f64;
                (range.1 - range.0) / (n + padding).max(1e-12)
            }
            Scale::Linear { .. } => 0.0,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        match self {
            Scale::Band { padding, .. } => self.step() * (1.0 - padding),
            Scale::Linear { .. } => 0.0,
        }
    }

    /// Start of the band holding `category`.
    pub fn band_start(&self, category: &str) -> Option<f64> {
        match self {
            Scale::Band {
                domain,
                range,
                padding,
            } => {
                let i = domain.iter().position(|c| c == category)?;
                Some(range.0 + self.step() * (padding + i as f64))
            }
            Scale::Linear { .. } => None,
        }
    }
}

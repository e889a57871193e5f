use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Fractional bits of the fixed-point weight representation.
pub const WEIGHT_FRAC_BITS: u32 = 16;
pub const WEIGHT_SCALE: f64 = (1u64 << WEIGHT_FRAC_BITS) as f64;
/// Largest accepted weight magnitude; keeps every window sum inside `i64`.
pub const MAX_ABS_WEIGHT: f64 = 1.0e6;

pub const WINDOW: usize = 8;
pub const FEATURE_LEN: usize = WINDOW * WINDOW;

/// Per-scale affine calibration `slope * score + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub slope: f64,
    pub offset: f64,
}

impl Calibration {
    pub const IDENTITY: Calibration = Calibration {
        slope: 1.0,
        offset: 0.0,
    };

    pub fn apply(&self, score: f64) -> f64 {
        self.slope * score + self.offset
    }
}

impl Default for Calibration {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Linear window classifier: 64 weights over the row-major 8x8 gradient window
/// plus optional per-scale calibration.
///
/// Weights are held in Q16 fixed point so window scores are exact integers
/// independent of summation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    weights: [i64; FEATURE_LEN],
    calib: BTreeMap<u32, Calibration>,
}

fn quantize(w: f64) -> Option<i64> {
    (w.is_finite() && w.abs() <= MAX_ABS_WEIGHT).then(|| (w * WEIGHT_SCALE).round() as i64)
}

impl SvmModel {
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.len() != FEATURE_LEN {
            return Err(Error::InvalidArgument(format!(
                "expected {FEATURE_LEN} weights, got {}",
                weights.len()
            )));
        }
        let mut raw = [0i64; FEATURE_LEN];
        for (slot, &w) in raw.iter_mut().zip(weights) {
            *slot = quantize(w).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "weight {w} is not finite or exceeds {MAX_ABS_WEIGHT}"
                ))
            })?;
        }
        Ok(Self {
            weights: raw,
            calib: BTreeMap::new(),
        })
    }

    pub fn from_integer_weights(weights: [i32; FEATURE_LEN]) -> Self {
        Self {
            weights: weights.map(|w| i64::from(w) << WEIGHT_FRAC_BITS),
            calib: BTreeMap::new(),
        }
    }

    pub fn zeros() -> Self {
        Self::from_integer_weights([0; FEATURE_LEN])
    }

    pub fn with_calibration(mut self, scale_id: u32, calib: Calibration) -> Self {
        self.calib.insert(scale_id, calib);
        self
    }

    /// Raw Q16 weights, row-major over the window.
    pub fn raw_weights(&self) -> &[i64; FEATURE_LEN] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * WINDOW + col] as f64 / WEIGHT_SCALE
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|&w| w as f64 / WEIGHT_SCALE)
            .collect()
    }

    /// Calibration entries present in the model file.
    pub fn calibrations(&self) -> &BTreeMap<u32, Calibration> {
        &self.calib
    }

    /// Calibration for `scale_id`, identity when unspecified.
    pub fn calibration(&self, scale_id: u32) -> Calibration {
        self.calib.get(&scale_id).copied().unwrap_or_default()
    }

    /// Serializes to the text model format; parsing the result yields an equal model.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in self.weights() {
            writeln!(out, "{w}").unwrap();
        }
        for (id, c) in &self.calib {
            writeln!(out, "{id} {} {}", c.slope, c.offset).unwrap();
        }
        out
    }
}

pub fn load_svm_model(path: impl AsRef<Path>) -> Result<SvmModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_svm_model(&text)
}

pub fn save_svm_model(model: &SvmModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_text()).map_err(|e| Error::io(path, e))
}

fn parse_f64(text: &str, line: usize, what: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Model {
            line,
            msg: format!("invalid {what} {text:?}"),
        })
}

/// Parses 64 weight lines followed by optional `scale_id slope offset` lines.
/// Blank lines are ignored.
pub fn parse_svm_model(text: &str) -> Result<SvmModel> {
    let mut weights = Vec::with_capacity(FEATURE_LEN);
    let mut calib = BTreeMap::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.len() {
            0 => continue,
            1 if weights.len() < FEATURE_LEN => {
                let w = parse_f64(tokens[0], line, "weight")?;
                weights.push(quantize(w).ok_or_else(|| Error::Model {
                    line,
                    msg: format!("weight {w} exceeds {MAX_ABS_WEIGHT}"),
                })?);
            }
            1 => {
                return Err(Error::Model {
                    line,
                    msg: format!("expected {FEATURE_LEN} weights, found more"),
                })
            }
            3 if weights.len() == FEATURE_LEN => {
                let scale_id: u32 = tokens[0].parse().map_err(|_| Error::Model {
                    line,
                    msg: format!("invalid scale id {:?}", tokens[0]),
                })?;
                let c = Calibration {
                    slope: parse_f64(tokens[1], line, "slope")?,
                    offset: parse_f64(tokens[2], line, "offset")?,
                };
                if calib.insert(scale_id, c).is_some() {
                    return Err(Error::Model {
                        line,
                        msg: format!("duplicate calibration for scale {scale_id}"),
                    });
                }
            }
            3 => {
                return Err(Error::Model {
                    line,
                    msg: format!("expected {FEATURE_LEN} weights, found {}", weights.len()),
                })
            }
            n => {
                return Err(Error::Model {
                    line,
                    msg: format!("expected 1 or 3 fields, found {n}"),
                })
            }
        }
    }
    if weights.len() != FEATURE_LEN {
        return Err(Error::Model {
            line: last_line,
            msg: format!("expected {FEATURE_LEN} weights, found {}", weights.len()),
        });
    }
    Ok(SvmModel {
        weights: weights.try_into().expect("length checked"),
        calib,
    })
}

//! Quantities with explicit units.
//!
//! Lengths: `"0.5 m"`, `"12 mm"`, `"0.25 lambda"` (needs a reference
//! frequency) or `"0.25 lambda @ 26 GHz"`. Frequencies: `Hz` through `GHz`.
//! Wavenumbers: `rad/m`, or a frequency converted through `k = 2 pi f / c`.
//! Angles: `deg` or `rad`. Bare numbers are rejected.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CliError;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A config value that must carry a unit. Bare numbers deserialize so that
/// the error can name the key instead of surfacing as a type mismatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Text(String),
    Bare(f64),
}

impl Quantity {
    pub fn text(s: impl Into<String>) -> Self {
        Quantity::Text(s.into())
    }

    /// Meters, formatted so that re-parsing gives the same value.
    pub fn meters(v: f64) -> Self {
        Quantity::Text(format!("{v} m"))
    }

    pub fn degrees(v: f64) -> Self {
        Quantity::Text(format!("{v} deg"))
    }

    pub fn rad_per_m(v: f64) -> Self {
        Quantity::Text(format!("{v} rad/m"))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Text(s) => f.write_str(s),
            Quantity::Bare(v) => write!(f, "{v}"),
        }
    }
}

fn split<'a>(q: &'a Quantity, key: &str, expected: &str) -> Result<(f64, &'a str), CliError> {
    let text = match q {
        Quantity::Bare(v) => {
            return Err(CliError::config(
                key,
                format!("value {v} has no unit; expected {expected}"),
            ))
        }
        Quantity::Text(s) => s.trim(),
    };
    let end = text
        .find(|c: char| c.is_whitespace() || (c.is_ascii_alphabetic() && c != 'e' && c != 'E'))
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(end);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| CliError::config(key, format!("cannot parse number in `{text}`")))?;
    if !value.is_finite() {
        return Err(CliError::config(key, format!("`{text}` is not finite")));
    }
    let unit = unit.trim();
    if unit.is_empty() {
        return Err(CliError::config(
            key,
            format!("`{text}` has no unit; expected {expected}"),
        ));
    }
    Ok((value, unit))
}

fn frequency_scale(unit: &str) -> Option<f64> {
    match unit {
        "Hz" | "hz" => Some(1.0),
        "kHz" | "khz" => Some(1e3),
        "MHz" | "mhz" => Some(1e6),
        "GHz" | "ghz" => Some(1e9),
        _ => None,
    }
}

fn parse_frequency_text(text: &str, key: &str) -> Result<f64, CliError> {
    let q = Quantity::text(text);
    let (v, unit) = split(&q, key, "a frequency such as `26 GHz`")?;
    let scale = frequency_scale(unit)
        .ok_or_else(|| CliError::config(key, format!("unknown frequency unit `{unit}`")))?;
    let f = v * scale;
    if f <= 0.0 {
        return Err(CliError::config(key, "frequency must be > 0"));
    }
    Ok(f)
}

/// Frequency in Hz.
pub fn frequency(q: &Quantity, key: &str) -> Result<f64, CliError> {
    match q {
        Quantity::Text(t) => parse_frequency_text(t, key),
        Quantity::Bare(_) => split(q, key, "a frequency such as `26 GHz`").map(|_| 0.0),
    }
}

/// Length in meters. `reference` is the frequency (Hz) that gives `lambda`
/// its meaning when the value does not carry its own `@ f`.
pub fn length(q: &Quantity, key: &str, reference: Option<f64>) -> Result<f64, CliError> {
    let expected = "a length such as `0.5 m`, `12 mm` or `0.25 lambda @ 26 GHz`";
    let (head, at) = match q {
        Quantity::Text(t) => match t.split_once('@') {
            Some((h, f)) => (Quantity::text(h.trim()), Some(parse_frequency_text(f.trim(), key)?)),
            None => (q.clone(), None),
        },
        Quantity::Bare(_) => (q.clone(), None),
    };
    let (v, unit) = split(&head, key, expected)?;
    let meters = match unit {
        "m" => v,
        "cm" => v * 1e-2,
        "mm" => v * 1e-3,
        "um" => v * 1e-6,
        "lambda" | "wavelength" | "wavelengths" => {
            let f = at.or(reference).ok_or_else(|| {
                CliError::config(
                    key,
                    "`lambda` needs a reference frequency (`@ 26 GHz` or top-level `reference_frequency`)",
                )
            })?;
            v * SPEED_OF_LIGHT / f
        }
        other => return Err(CliError::config(key, format!("unknown length unit `{other}`"))),
    };
    if at.is_some() && !matches!(unit, "lambda" | "wavelength" | "wavelengths") {
        return Err(CliError::config(key, "`@ frequency` only applies to `lambda`"));
    }
    Ok(meters)
}

/// Wavenumber in rad/m.
pub fn wavenumber(q: &Quantity, key: &str) -> Result<f64, CliError> {
    let (v, unit) = split(q, key, "a wavenumber such as `10 rad/m` or a frequency")?;
    let k = match unit {
        "rad/m" | "1/m" => v,
        u => match frequency_scale(u) {
            Some(s) => 2.0 * PI * v * s / SPEED_OF_LIGHT,
            None => return Err(CliError::config(key, format!("unknown wavenumber unit `{u}`"))),
        },
    };
    if k <= 0.0 {
        return Err(CliError::config(key, "wavenumber must be > 0"));
    }
    Ok(k)
}

/// Angle in radians.
pub fn angle(q: &Quantity, key: &str) -> Result<f64, CliError> {
    let (v, unit) = split(q, key, "an angle such as `90 deg`")?;
    match unit {
        "deg" | "degree" | "degrees" => Ok(v.to_radians()),
        "rad" => Ok(v),
        other => Err(CliError::config(key, format!("unknown angle unit `{other}`"))),
    }
}

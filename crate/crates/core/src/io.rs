//! File formats and serde helpers shared by the library and the CLI.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Frequency;
use crate::spectral::{Phasor, PhasorMode, SolenoidalField};
use crate::wide::WideReal;

pub const FIELD_SCHEMA: &str = "sparse-steady/field/v1";

/// Exact rational from `"p/q"`, an integer or a finite decimal such as `"0.125"`.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Format(format!("expected a rational like 1/2, got {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Format(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, den);
    Ok(if neg { -r } else { r })
}

pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_to_wide(r: &BigRational) -> WideReal {
    WideReal::from_ratio(r.numer(), r.denom())
}

/// `BigInt` as a decimal string.
pub(crate) mod bigint_str {
    use super::*;

    pub fn serialize<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        n.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `BigRational` as `"p/q"`.
pub(crate) mod ratio_str {
    use super::*;

    pub fn serialize<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        format_ratio(r).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        parse_ratio(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ModeRecord {
    k: Frequency,
    a: WideReal,
    b: WideReal,
}

#[derive(Serialize, Deserialize)]
struct FieldFile {
    schema: String,
    modes: Vec<ModeRecord>,
}

pub fn field_to_json(f: &SolenoidalField) -> Result<String> {
    let file = FieldFile {
        schema: FIELD_SCHEMA.into(),
        modes: f
            .iter()
            .map(|(k, p)| ModeRecord {
                k: k.clone(),
                a: p.a,
                b: p.b,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

/// Parses a field file. Non-canonical or repeated frequencies are accepted
/// and merged; the schema tag is optional.
pub fn field_from_json(s: &str) -> Result<SolenoidalField> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    if let Some(tag) = v.get("schema") {
        if tag.as_str() != Some(FIELD_SCHEMA) {
            return Err(Error::Format(format!("unsupported field schema {tag}")));
        }
    }
    let modes = v
        .get("modes")
        .ok_or_else(|| Error::Format("field file has no \"modes\" array".into()))?;
    let modes: Vec<ModeRecord> = serde_json::from_value(modes.clone())?;
    let mut f = SolenoidalField::new();
    for m in modes {
        if m.k.is_zero() {
            return Err(Error::InvalidFrequency("zero frequency in field file".into()));
        }
        f.add_raw(&m.k, Phasor::new(m.a, m.b))?;
    }
    Ok(f)
}

pub fn read_field(path: &Path) -> Result<SolenoidalField> {
    field_from_json(&fs::read_to_string(path)?)
}

pub fn write_field(path: &Path, f: &SolenoidalField) -> Result<()> {
    fs::write(path, field_to_json(f)?)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_pretty(value)?)?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Modes as `(k, ρ, θ)` rows, handy for printing.
pub fn polar_rows(f: &SolenoidalField) -> Vec<(Frequency, WideReal, f64)> {
    f.modes()
        .map(|PhasorMode { freq, phasor }| (freq, phasor.rho(), phasor.angle()))
        .collect()
}

//! Parsers for half-integers, complex numbers and module labels on the
//! command line.

use spinnet::spin21::Class3;
use spinnet::{HalfInt, RepLabel3, C64};

/// Malformed user input, reported with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn bad(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub fn half(s: &str) -> anyhow::Result<HalfInt> {
    HalfInt::parse(s).ok_or_else(|| bad(format!("`{s}` is not a half-integer")))
}

/// Accepts `0.25`, `2.5i`, `-0.5+1i`, `0.4-1.1i`, `i`, `-i`.
pub fn complex(s: &str) -> anyhow::Result<C64> {
    let err = || bad(format!("`{s}` is not a complex number"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(t.parse().map_err(|_| err())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> anyhow::Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| err()),
        }
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse().map_err(|_| err())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

pub fn label_with_class(class: Class3, j: &str, eps: HalfInt) -> anyhow::Result<RepLabel3> {
    let real = |j: &str| -> anyhow::Result<HalfInt> {
        let h = half(j)?;
        let min = if class == Class3::Finite { 0 } else { -1 };
        if h.0 < min {
            return Err(bad(format!("{}_{h} is not a module label", class.tag())));
        }
        Ok(h)
    };
    Ok(match class {
        Class3::Finite => RepLabel3::finite(real(j)?),
        Class3::DiscretePlus => RepLabel3::dplus(real(j)?),
        Class3::DiscreteMinus => RepLabel3::dminus(real(j)?),
        Class3::Continuous => RepLabel3::continuous_raw(complex(j)?, eps)?,
    })
}

/// `F:3/2`, `D+:1`, `D-:1/2`, `C0:-0.5+1i`, `C1/2:0.3i`; a bare value takes
/// `default`.
pub fn label(s: &str, default: Class3) -> anyhow::Result<RepLabel3> {
    let s = s.trim();
    let Some((tag, j)) = s.split_once(':') else {
        return label_with_class(default, s, HalfInt::ZERO);
    };
    if let Some(e) = tag.strip_prefix('C').or_else(|| tag.strip_prefix('c')) {
        let eps = if e.is_empty() { HalfInt::ZERO } else { half(e)? };
        return label_with_class(Class3::Continuous, j, eps);
    }
    let class = Class3::parse(tag).ok_or_else(|| bad(format!("unknown class `{tag}`")))?;
    label_with_class(class, j, HalfInt::ZERO)
}

pub fn class(s: &str) -> anyhow::Result<Class3> {
    Class3::parse(s).ok_or_else(|| bad(format!("unknown class `{s}` (F, D+, D-, C)")))
}

pub fn list<T>(s: &str, f: impl Fn(&str) -> anyhow::Result<T>) -> anyhow::Result<Vec<T>> {
    s.split(',').map(|x| f(x.trim())).collect()
}

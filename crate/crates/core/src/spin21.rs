//! Irreducible (g,K)-modules of Spin(2,1): labels, weight supports and the
//! action of J0, J+, J- and the Casimir on truncated weight windows.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::numeric::{csqrt, C64, I};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class3 {
    DiscretePlus,
    DiscreteMinus,
    Continuous,
    Finite,
}

impl Class3 {
    pub fn tag(self) -> &'static str {
        match self {
            Class3::DiscretePlus => "D+",
            Class3::DiscreteMinus => "D-",
            Class3::Continuous => "C",
            Class3::Finite => "F",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "D+" | "d+" | "DiscretePlus" => Some(Class3::DiscretePlus),
            "D-" | "d-" | "DiscreteMinus" => Some(Class3::DiscreteMinus),
            "C" | "c" | "Continuous" => Some(Class3::Continuous),
            "F" | "f" | "Finite" => Some(Class3::Finite),
            _ => None,
        }
    }
}

/// Module label. `j` is real and half-integral except for the continuous
/// class; `eps` is only meaningful for the continuous class.
#[derive(Clone, Copy, Debug)]
pub struct RepLabel3 {
    pub class: Class3,
    pub j: C64,
    pub eps: HalfInt,
}

impl PartialEq for RepLabel3 {
    fn eq(&self, o: &Self) -> bool {
        self.class == o.class && self.j == o.j && self.eps == o.eps
    }
}

impl Eq for RepLabel3 {}

impl Hash for RepLabel3 {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.class.hash(h);
        (self.j.re + 0.0).to_bits().hash(h);
        (self.j.im + 0.0).to_bits().hash(h);
        self.eps.hash(h);
    }
}

impl Serialize for RepLabel3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RepLabel3", 3)?;
        st.serialize_field("class", self.class.tag())?;
        st.serialize_field("j", &[self.j.re, self.j.im])?;
        st.serialize_field("epsilon", &self.eps.to_string())?;
        st.end()
    }
}

impl fmt::Display for RepLabel3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class {
            Class3::Continuous => write!(
                f,
                "C^{}_({}{:+}i)",
                self.eps, self.j.re, self.j.im
            ),
            c => write!(f, "{}_{}", c.tag(), self.jh()),
        }
    }
}

impl RepLabel3 {
    pub fn finite(j: HalfInt) -> Self {
        assert!(j.0 >= 0, "finite label needs j >= 0");
        Self { class: Class3::Finite, j: C64::new(j.f(), 0.0), eps: HalfInt::ZERO }
    }

    pub fn dplus(j: HalfInt) -> Self {
        assert!(j.0 >= -1, "discrete label needs j >= -1/2");
        Self { class: Class3::DiscretePlus, j: C64::new(j.f(), 0.0), eps: HalfInt::ZERO }
    }

    pub fn dminus(j: HalfInt) -> Self {
        assert!(j.0 >= -1, "discrete label needs j >= -1/2");
        Self { class: Class3::DiscreteMinus, j: C64::new(j.f(), 0.0), eps: HalfInt::ZERO }
    }

    pub fn discrete(sign: i8, j: HalfInt) -> Self {
        if sign >= 0 {
            Self::dplus(j)
        } else {
            Self::dminus(j)
        }
    }

    /// Continuous label, canonicalised under `j ~ -j-1`.
    pub fn continuous(j: C64, eps: HalfInt) -> Result<Self> {
        let eps = HalfInt(eps.0.rem_euclid(2));
        if let Some(h) = real_half(j) {
            if (h - eps).is_integer() {
                return Err(Error::InvalidLabel(format!(
                    "continuous label with j = {h} and eps = {eps} is reducible"
                )));
            }
        }
        let mut j = j;
        if j.re < -0.5 || (j.re == -0.5 && j.im < 0.0) {
            j = -j - 1.0;
        }
        Ok(Self { class: Class3::Continuous, j, eps })
    }

    /// Continuous label without canonicalisation, so `Γ±(j, m)` uses `j` as given.
    pub fn continuous_raw(j: C64, eps: HalfInt) -> Result<Self> {
        let l = Self { class: Class3::Continuous, j, eps: HalfInt(eps.0.rem_euclid(2)) };
        l.validate()?;
        Ok(l)
    }

    pub fn with_class_j(class: Class3, j: HalfInt) -> Self {
        match class {
            Class3::Finite => Self::finite(j),
            Class3::DiscretePlus => Self::dplus(j),
            Class3::DiscreteMinus => Self::dminus(j),
            Class3::Continuous => panic!("continuous labels carry a parity"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.class {
            Class3::Continuous => {
                RepLabel3::continuous(self.j, self.eps)?;
                Ok(())
            }
            _ => {
                let h = real_half(self.j).ok_or_else(|| {
                    Error::InvalidLabel(format!("{} needs a half-integral j", self.class.tag()))
                })?;
                let min = if self.class == Class3::Finite { 0 } else { -1 };
                if h.0 < min {
                    return Err(Error::InvalidLabel(format!("j = {h} out of range")));
                }
                Ok(())
            }
        }
    }

    /// Half-integral spin; panics for continuous labels with complex j.
    pub fn jh(&self) -> HalfInt {
        real_half(self.j).unwrap_or_else(|| panic!("label {:?} has no half-integral j", self))
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.class, Class3::DiscretePlus | Class3::DiscreteMinus)
    }

    /// Whether `m` belongs to the weight set of the module.
    pub fn contains(&self, m: HalfInt) -> bool {
        match self.class {
            Class3::Finite => {
                let j = self.jh();
                m.abs() <= j && (j - m).is_integer()
            }
            Class3::DiscretePlus => {
                let j = self.jh();
                m >= j + HalfInt::ONE && (m - j).is_integer()
            }
            Class3::DiscreteMinus => {
                let j = self.jh();
                m <= -j - HalfInt::ONE && (m + j).is_integer()
            }
            Class3::Continuous => (m - self.eps).is_integer(),
        }
    }

    /// Weight parity: `m - parity()` is always an integer.
    pub fn parity(&self) -> HalfInt {
        match self.class {
            Class3::Continuous => self.eps,
            _ => HalfInt(self.jh().0.rem_euclid(2)),
        }
    }

    /// Weights of the module inside `[lo, hi]`.
    pub fn weights_in(&self, lo: HalfInt, hi: HalfInt) -> Vec<HalfInt> {
        let p = self.parity();
        let mut start = lo;
        if !(start - p).is_integer() {
            start += HalfInt::HALF;
        }
        start.range_to(hi).filter(|m| self.contains(*m)).collect()
    }

    pub fn casimir(&self) -> C64 {
        -self.j * (self.j + 1.0)
    }
}

fn real_half(j: C64) -> Option<HalfInt> {
    if j.im != 0.0 {
        return None;
    }
    HalfInt::from_f64(j.re)
}

/// `Gamma_s(j, m) = i sqrt(j - s m) sqrt(j + s m + 1)` with principal roots.
pub fn gamma(j: C64, m: HalfInt, sign: i8) -> C64 {
    let m = m.f();
    if sign > 0 {
        I * csqrt(j - m) * csqrt(j + m + 1.0)
    } else {
        I * csqrt(j + m) * csqrt(j - m + 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    J0,
    JPlus,
    JMinus,
    Q,
}

/// Amplitudes over the weights of one module inside `[m_lo, m_hi]`.
#[derive(Clone, Debug)]
pub struct WeightWindow {
    pub label: RepLabel3,
    pub m_lo: HalfInt,
    pub m_hi: HalfInt,
    pub amps: BTreeMap<HalfInt, C64>,
    /// Sum of moduli pushed outside the window by the last operation.
    pub leakage: f64,
}

impl WeightWindow {
    pub fn new(label: RepLabel3, m_lo: HalfInt, m_hi: HalfInt) -> Self {
        Self { label, m_lo, m_hi, amps: BTreeMap::new(), leakage: 0.0 }
    }

    pub fn basis(label: RepLabel3, m_lo: HalfInt, m_hi: HalfInt, m: HalfInt) -> Self {
        let mut w = Self::new(label, m_lo, m_hi);
        w.set(m, C64::new(1.0, 0.0));
        w
    }

    pub fn weights(&self) -> Vec<HalfInt> {
        self.label.weights_in(self.m_lo, self.m_hi)
    }

    pub fn set(&mut self, m: HalfInt, v: C64) {
        assert!(self.label.contains(m) && m >= self.m_lo && m <= self.m_hi);
        self.amps.insert(m, v);
    }

    pub fn get(&self, m: HalfInt) -> C64 {
        self.amps.get(&m).copied().unwrap_or_default()
    }

    pub fn is_interior(&self, m: HalfInt) -> bool {
        m >= self.m_lo + HalfInt::ONE && m <= self.m_hi - HalfInt::ONE
    }

    fn add(&mut self, m: HalfInt, v: C64) {
        if self.label.contains(m) && m >= self.m_lo && m <= self.m_hi {
            *self.amps.entry(m).or_default() += v;
        } else if self.label.contains(m) {
            self.leakage += v.norm();
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut w = self.clone();
        for v in w.amps.values_mut() {
            *v *= s;
        }
        w
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut w = self.clone();
        for (m, v) in &o.amps {
            *w.amps.entry(*m).or_default() -= *v;
        }
        w
    }

    /// Largest modulus over interior weights.
    pub fn interior_max(&self) -> f64 {
        self.amps
            .iter()
            .filter(|(m, _)| self.is_interior(**m))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }
}

pub fn apply_generator(gen: Generator, s: &WeightWindow) -> WeightWindow {
    let mut out = WeightWindow::new(s.label, s.m_lo, s.m_hi);
    let j = s.label.j;
    for (&m, &v) in &s.amps {
        match gen {
            Generator::J0 => out.add(m, v * m.f()),
            Generator::JPlus => out.add(m + HalfInt::ONE, v * gamma(j, m, 1)),
            Generator::JMinus => out.add(m - HalfInt::ONE, v * gamma(j, m, -1)),
            Generator::Q => out.add(m, v * s.label.casimir()),
        }
    }
    out
}

pub fn dual_label(l: &RepLabel3) -> RepLabel3 {
    let mut d = *l;
    d.class = match l.class {
        Class3::DiscretePlus => Class3::DiscreteMinus,
        Class3::DiscreteMinus => Class3::DiscretePlus,
        c => c,
    };
    d
}

/// `|j,m> -> (-1)^m |j,-m>` into the dual module, with `(-1)^m = exp(i pi m)`.
pub fn dual_map(s: &WeightWindow) -> WeightWindow {
    let mut out = WeightWindow::new(dual_label(&s.label), -s.m_hi, -s.m_lo);
    for (&m, &v) in &s.amps {
        out.amps.insert(-m, v * minus_one_pow(m));
    }
    out
}

pub fn minus_one_pow(m: HalfInt) -> C64 {
    match m.0.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

pub fn is_unitary(l: &RepLabel3) -> bool {
    match l.class {
        Class3::DiscretePlus | Class3::DiscreteMinus => true,
        Class3::Finite => l.jh() == HalfInt::ZERO,
        Class3::Continuous => {
            let principal = (l.j.re + 0.5).abs() < 1e-12 && l.j.im != 0.0;
            let complementary =
                l.j.im == 0.0 && l.j.re > -1.0 && l.j.re < 0.0 && l.eps == HalfInt::ZERO;
            principal || complementary
        }
    }
}

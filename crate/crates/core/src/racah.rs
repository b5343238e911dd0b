//! Racah coefficients built from Clebsch–Gordan contractions.
//!
//! `R{j1 j2 j12; j3 j j23}` relates the two coupling orders of three
//! modules into `j`. It is computed as
//!
//! ```text
//! Σ A(j1,m1; j23,m23 | j,m) A(j2,m2; j3,m3 | j23,m23)
//!   B(j12,m12 | j1,m1; j2,m2) B(j,m | j12,m12; j3,m3)
//! ```
//!
//! at a reference weight `m` and cross-checked at a second weight.
//!
//! Continuous labels must be given in the raw form `j + ν` produced by the
//! coupling that creates them (see [`fx_couplings`]); `j` and `-j-1` label
//! the same module but differ in the phases of their weight vectors.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use crate::cg::{decompose_capped, engine, fx_couplings, fx_decomposable, Measure};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::numeric::{csqrt, re, C64};
use crate::spin21::{minus_one_pow, Class3, RepLabel3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RacahKey {
    pub j1: RepLabel3,
    pub j2: RepLabel3,
    pub j12: RepLabel3,
    pub j3: RepLabel3,
    pub j: RepLabel3,
    pub j23: RepLabel3,
}

impl RacahKey {
    pub fn new(j1: RepLabel3, j2: RepLabel3, j12: RepLabel3, j3: RepLabel3, j: RepLabel3, j23: RepLabel3) -> Self {
        Self { j1, j2, j12, j3, j, j23 }
    }

    /// The four couplings `(a, b, c)` with `c ∈ a ⊗ b` the coefficient needs.
    pub fn couplings(&self) -> [(RepLabel3, RepLabel3, RepLabel3); 4] {
        [
            (self.j1, self.j2, self.j12),
            (self.j12, self.j3, self.j),
            (self.j2, self.j3, self.j23),
            (self.j1, self.j23, self.j),
        ]
    }
}

impl std::fmt::Display for RacahKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{} {} {}; {} {} {}}}", self.j1, self.j2, self.j12, self.j3, self.j, self.j23)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RacahValue {
    #[serde(serialize_with = "ser_c64")]
    pub value: C64,
    pub m_used: HalfInt,
    /// `|R(m) - R(m')|` for a second weight `m'`; zero when `j` has one weight.
    pub m_residual: f64,
    /// Number of `(m1, m12)` terms in the sum at `m_used`.
    pub terms: usize,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// `D(j) = sqrt(2j + 1)`.
pub fn dim_factor(l: &RepLabel3) -> C64 {
    csqrt(l.j * 2.0 + 1.0)
}

fn same(a: &RepLabel3, b: &RepLabel3) -> bool {
    a.class == b.class && (a.j - b.j).norm() < 1e-12 && (a.class != Class3::Continuous || a.eps == b.eps)
}

fn cap_for(a: &RepLabel3, b: &RepLabel3, top: f64) -> i64 {
    (top - a.j.re - b.j.re).max(0.0).ceil() as i64 + 3
}

/// `𝒟(a, b | c)`: whether `c` occurs as a discrete summand of `a ⊗ b`.
pub fn admissible(a: &RepLabel3, b: &RepLabel3, c: &RepLabel3) -> bool {
    match decompose_capped(a, b, cap_for(a, b, c.j.re)) {
        Ok(d) => d.contains(c),
        Err(_) => false,
    }
}

/// Discrete summands of `a ⊗ b` with `Re j ≤ top`, continuous ones in raw form.
///
/// Fails when the product contains a direct integral, since sums over such
/// labels are not discrete.
pub fn internal_labels(a: &RepLabel3, b: &RepLabel3, top: f64) -> Result<Vec<RepLabel3>> {
    if a.class == Class3::Finite || b.class == Class3::Finite {
        let (f, x) = if a.class == Class3::Finite { (a, b) } else { (b, a) };
        if !fx_decomposable(f.jh(), x) {
            return Ok(Vec::new());
        }
        return Ok(fx_couplings(f.jh(), x).into_iter().filter(|l| l.j.re <= top + 1e-9).collect());
    }
    let d = match decompose_capped(a, b, cap_for(a, b, top)) {
        Ok(d) => d,
        Err(Error::NotDecomposable(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    if d.members.iter().any(|m| m.measure == Measure::Integral) {
        return Err(Error::UnsupportedCoupling(format!("{a} ⊗ {b} contains a direct integral")));
    }
    Ok(d.members.iter().map(|m| m.label).filter(|l| l.j.re <= top + 1e-9).collect())
}

#[derive(Clone, Copy, Debug)]
struct Bounds {
    lo: Option<HalfInt>,
    hi: Option<HalfInt>,
}

impl Bounds {
    fn of(l: &RepLabel3) -> Self {
        match l.class {
            Class3::Finite => Bounds { lo: Some(-l.jh()), hi: Some(l.jh()) },
            Class3::DiscretePlus => Bounds { lo: Some(l.jh() + HalfInt::ONE), hi: None },
            Class3::DiscreteMinus => Bounds { lo: None, hi: Some(-l.jh() - HalfInt::ONE) },
            Class3::Continuous => Bounds { lo: None, hi: None },
        }
    }

    /// `{c - x : x in self}`.
    fn reflect(self, c: HalfInt) -> Self {
        Bounds { lo: self.hi.map(|h| c - h), hi: self.lo.map(|l| c - l) }
    }

    /// Minkowski sum with `o`.
    fn plus(self, o: Bounds) -> Self {
        let add = |a: Option<HalfInt>, b: Option<HalfInt>| Some(a? + b?);
        Bounds { lo: add(self.lo, o.lo), hi: add(self.hi, o.hi) }
    }

    fn meet(self, o: Bounds) -> Self {
        let pick = |a: Option<HalfInt>, b: Option<HalfInt>, f: fn(HalfInt, HalfInt) -> HalfInt| match (a, b) {
            (Some(x), Some(y)) => Some(f(x, y)),
            (x, None) => x,
            (None, y) => y,
        };
        Bounds { lo: pick(self.lo, o.lo, std::cmp::max), hi: pick(self.hi, o.hi, std::cmp::min) }
    }

    fn closed(self) -> Option<(HalfInt, HalfInt)> {
        Some((self.lo?, self.hi?))
    }
}

fn reference_weights(l: &RepLabel3) -> (HalfInt, Option<HalfInt>) {
    match l.class {
        Class3::Finite => {
            let j = l.jh();
            (-j, (j.0 > 0).then(|| -j + HalfInt::ONE))
        }
        Class3::DiscretePlus => {
            let m = l.jh() + HalfInt::ONE;
            (m, Some(m + HalfInt::ONE))
        }
        Class3::DiscreteMinus => {
            let m = -l.jh() - HalfInt::ONE;
            (m, Some(m - HalfInt::ONE))
        }
        Class3::Continuous => (l.eps, Some(l.eps + HalfInt::ONE)),
    }
}

fn contract(k: &RacahKey, m: HalfInt) -> Result<(C64, usize)> {
    let eng = engine();
    let unbounded = || Error::UnsupportedCoupling(format!("internal weight sum of {k} is unbounded"));
    let b12 = Bounds::of(&k.j12).meet(Bounds::of(&k.j3).reflect(m));
    let b1 = Bounds::of(&k.j1)
        .meet(Bounds::of(&k.j23).reflect(m))
        .meet(b12.plus(Bounds::of(&k.j2).reflect(HalfInt::ZERO)));
    let (lo1, hi1) = b1.closed().ok_or_else(unbounded)?;
    let mut total = re(0.0);
    let mut terms = 0;
    for m1 in k.j1.weights_in(lo1, hi1) {
        let m23 = m - m1;
        if !k.j23.contains(m23) {
            continue;
        }
        let a1 = eng.coefficient(&k.j, &k.j1, m1, &k.j23, m23)?;
        if a1 == re(0.0) {
            continue;
        }
        let (lo12, hi12) = b12
            .meet(Bounds::of(&k.j2).plus(Bounds { lo: Some(m1), hi: Some(m1) }))
            .closed()
            .ok_or_else(unbounded)?;
        for m12 in k.j12.weights_in(lo12, hi12) {
            let (m2, m3) = (m12 - m1, m - m12);
            if !k.j2.contains(m2) || !k.j3.contains(m3) {
                continue;
            }
            let a2 = eng.coefficient(&k.j23, &k.j2, m2, &k.j3, m3)?;
            let b1 = eng.coefficient(&k.j12, &k.j1, m1, &k.j2, m2)?;
            let b2 = eng.coefficient(&k.j, &k.j12, m12, &k.j3, m3)?;
            total += a1 * a2 * b1 * b2;
            terms += 1;
        }
    }
    Ok((total, terms))
}

fn compute(k: &RacahKey) -> Result<RacahValue> {
    for l in [k.j1, k.j2, k.j12, k.j3, k.j, k.j23] {
        l.validate()?;
    }
    let (m0, m1) = reference_weights(&k.j);
    if k.couplings().iter().any(|(a, b, c)| !admissible(a, b, c)) {
        return Ok(RacahValue { value: re(0.0), m_used: m0, m_residual: 0.0, terms: 0 });
    }
    let (value, terms) = contract(k, m0)?;
    let m_residual = match m1 {
        Some(m1) => (contract(k, m1)?.0 - value).norm(),
        None => 0.0,
    };
    Ok(RacahValue { value, m_used: m0, m_residual, terms })
}

fn cache() -> &'static RwLock<HashMap<RacahKey, RacahValue>> {
    static C: OnceLock<RwLock<HashMap<RacahKey, RacahValue>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Racah coefficient; zero when any of the four couplings is inadmissible.
pub fn racah(k: &RacahKey) -> Result<RacahValue> {
    if let Some(v) = cache().read().unwrap().get(k) {
        return Ok(*v);
    }
    let v = compute(k)?;
    cache().write().unwrap().entry(*k).or_insert(v);
    Ok(v)
}

/// Shorthand for the value of `R{a b c; d e f}`.
pub fn r6(a: RepLabel3, b: RepLabel3, c: RepLabel3, d: RepLabel3, e: RepLabel3, f: RepLabel3) -> Result<C64> {
    Ok(racah(&RacahKey::new(a, b, c, d, e, f))?.value)
}

fn sign_of(e: C64) -> C64 {
    HalfInt::from_f64(e.re).map(minus_one_pow).unwrap_or(C64::new(f64::NAN, 0.0))
}

/// Residuals `|LHS - RHS|` of the three reflection relations for Racah
/// coefficients with one `F_½` label, for spins `j1, j2, J` and neighbours
/// `k1, k2`:
///
/// ```text
/// R{j1 ½ k1; j2 J k2} = (-1)^(j1+j2-k1-k2) D(k1)D(k2)/(D(j1)D(j2)) R{k1 ½ j1; k2 J j2}
/// R{½ j1 k1; J j2 k2} = (-1)^(j1+j2-k1-k2) D(k1)D(k2)/(D(j1)D(j2)) R{½ k1 j1; J k2 j2}
/// R{J j1 j2; ½ k2 k1} = (-1)^(j1+k2-k1-j2) D(k1)D(j2)/(D(j1)D(k2)) R{J k1 k2; ½ j2 j1}
/// ```
pub fn racah_symmetry_residuals(
    j1: RepLabel3,
    j2: RepLabel3,
    jj: RepLabel3,
    k1: RepLabel3,
    k2: RepLabel3,
) -> Result<[f64; 3]> {
    let h = RepLabel3::finite(HalfInt::HALF);
    let d = dim_factor;
    let s12 = sign_of(j1.j + j2.j - k1.j - k2.j);
    let s3 = sign_of(j1.j + k2.j - k1.j - j2.j);
    let r1 = r6(j1, h, k1, j2, jj, k2)? - s12 * d(&k1) * d(&k2) / (d(&j1) * d(&j2)) * r6(k1, h, j1, k2, jj, j2)?;
    let r2 = r6(h, j1, k1, jj, j2, k2)? - s12 * d(&k1) * d(&k2) / (d(&j1) * d(&j2)) * r6(h, k1, j1, jj, k2, j2)?;
    let r3 = r6(jj, j1, j2, h, k2, k1)? - s3 * d(&k1) * d(&j2) / (d(&j1) * d(&k2)) * r6(jj, k1, k2, h, j2, j1)?;
    Ok([r1.norm(), r2.norm(), r3.norm()])
}

/// Labels of a five-module coupling tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PentagonLabels {
    pub j1: RepLabel3,
    pub j2: RepLabel3,
    pub j3: RepLabel3,
    pub j4: RepLabel3,
    pub j: RepLabel3,
    pub j12: RepLabel3,
    pub j123: RepLabel3,
    pub j23: RepLabel3,
    pub j234: RepLabel3,
    pub j34: RepLabel3,
}

impl PentagonLabels {
    fn all(&self) -> [RepLabel3; 10] {
        [self.j1, self.j2, self.j3, self.j4, self.j, self.j12, self.j123, self.j23, self.j234, self.j34]
    }

    fn top(&self) -> f64 {
        self.all().iter().map(|l| l.j.re).fold(f64::MIN, f64::max) + 2.0
    }

    // a = R{j1 j2 j12; j3 j123 j23}, b = R{j1 j23 j123; j4 j j234},
    // c = R{j2 j3 j23; j4 j234 j34}, d = R{j1 j2 j12; j34 j j234},
    // e = R{j12 j3 j123; j4 j j34}
    fn a(&self) -> Result<C64> {
        r6(self.j1, self.j2, self.j12, self.j3, self.j123, self.j23)
    }
    fn b(&self) -> Result<C64> {
        r6(self.j1, self.j23, self.j123, self.j4, self.j, self.j234)
    }
    fn c(&self) -> Result<C64> {
        r6(self.j2, self.j3, self.j23, self.j4, self.j234, self.j34)
    }
    fn d(&self) -> Result<C64> {
        r6(self.j1, self.j2, self.j12, self.j34, self.j, self.j234)
    }
    fn e(&self) -> Result<C64> {
        r6(self.j12, self.j3, self.j123, self.j4, self.j, self.j34)
    }

    /// Whether every coupling used by the five coefficients is admissible.
    pub fn is_admissible(&self) -> bool {
        let p = self;
        [
            (p.j1, p.j2, p.j12),
            (p.j12, p.j3, p.j123),
            (p.j2, p.j3, p.j23),
            (p.j1, p.j23, p.j123),
            (p.j123, p.j4, p.j),
            (p.j23, p.j4, p.j234),
            (p.j1, p.j234, p.j),
            (p.j3, p.j4, p.j34),
            (p.j2, p.j34, p.j234),
            (p.j12, p.j34, p.j),
        ]
        .iter()
        .all(|(a, b, c)| admissible(a, b, c))
    }
}

/// Both sides `(Σ, product)` of one of the five Biedenharn–Elliott forms.
///
/// Variant `k` sums over, in order, `j23`, `j123`, `j12`, `j34`, `j234`;
/// the given value of the summed label is ignored.
pub fn pentagon_sides(p: &PentagonLabels, variant: u8) -> Result<(C64, C64)> {
    let top = p.top();
    let (cands, rhs) = match variant {
        1 => (internal_labels(&p.j2, &p.j3, top)?, p.d()? * p.e()?),
        2 => (internal_labels(&p.j12, &p.j3, top)?, p.c()? * p.d()?),
        3 => (internal_labels(&p.j1, &p.j2, top)?, p.b()? * p.c()?),
        4 => (internal_labels(&p.j3, &p.j4, top)?, p.a()? * p.b()?),
        5 => (internal_labels(&p.j23, &p.j4, top)?, p.e()? * p.a()?),
        _ => return Err(Error::InvalidLabel(format!("pentagon variant {variant} is not in 1..=5"))),
    };
    let mut lhs = re(0.0);
    for l in cands {
        let mut q = *p;
        let term = match variant {
            1 => {
                q.j23 = l;
                q.a()? * q.b()? * q.c()?
            }
            2 => {
                q.j123 = l;
                q.e()? * q.a()? * q.b()?
            }
            3 => {
                q.j12 = l;
                q.d()? * q.e()? * q.a()?
            }
            4 => {
                q.j34 = l;
                q.c()? * q.d()? * q.e()?
            }
            _ => {
                q.j234 = l;
                q.b()? * q.c()? * q.d()?
            }
        };
        lhs += term;
    }
    Ok((lhs, rhs))
}

/// `|Σ - product|` for one of the five pentagon forms.
pub fn pentagon_residual(p: &PentagonLabels, variant: u8) -> Result<f64> {
    let (l, r) = pentagon_sides(p, variant)?;
    Ok((l - r).norm())
}

/// Which label is summed in the orthogonality relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pairing {
    /// `Σ_{j12} R{..j12..j23} R{..j12..j23'} = δ(j23, j23') 𝒟 𝒟`.
    SumJ12,
    /// `Σ_{j23} R{..j12..j23} R{..j12'..j23} = δ(j12, j12') 𝒟 𝒟`.
    SumJ23,
}

/// Largest deviation of the orthogonality relation over all pairs of
/// free labels.
pub fn racah_orthogonality_residual(
    j1: RepLabel3,
    j2: RepLabel3,
    j3: RepLabel3,
    j: RepLabel3,
    pairing: Pairing,
) -> Result<f64> {
    let top = [j1, j2, j3, j].iter().map(|l| l.j.re).fold(f64::MIN, f64::max) + 2.0;
    let l12 = internal_labels(&j1, &j2, top)?;
    let l23 = internal_labels(&j2, &j3, top)?;
    let (sum_over, free) = match pairing {
        Pairing::SumJ12 => (&l12, &l23),
        Pairing::SumJ23 => (&l23, &l12),
    };
    let r = |x: RepLabel3, y: RepLabel3| match pairing {
        Pairing::SumJ12 => r6(j1, j2, x, j3, j, y),
        Pairing::SumJ23 => r6(j1, j2, y, j3, j, x),
    };
    let dd = |y: &RepLabel3| match pairing {
        Pairing::SumJ12 => admissible(&j2, &j3, y) && admissible(&j1, y, &j),
        Pairing::SumJ23 => admissible(&j1, &j2, y) && admissible(y, &j3, &j),
    };
    let mut worst: f64 = 0.0;
    for (a, ya) in free.iter().enumerate() {
        for yb in &free[a..] {
            let mut s = re(0.0);
            for x in sum_over {
                s += r(*x, *ya)? * r(*x, *yb)?;
            }
            let want = if same(ya, yb) && dd(ya) { 1.0 } else { 0.0 };
            worst = worst.max((s - want).norm());
        }
    }
    Ok(worst)
}

//! Spin(3,1) modules `V_{λ,ρ}` as towers of SU(2) modules: generator
//! actions, the finite `(j1, j2)` dictionary, γ = ½ Clebsch–Gordan
//! coefficients, Casimir blocks on `V_J` and the spinor operators `T^A`,
//! `T̃^A`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::numeric::{csqrt, re, solve_eigen_general, CMat, CVec, TridiagonalMatrix, C64, I};

const EPS: f64 = 1e-12;

fn near(a: C64, b: C64) -> bool {
    (a - b).norm() <= EPS * a.norm().max(b.norm()).max(1.0)
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= EPS * z.norm().max(1.0)
}

fn rsqrt(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// Label `(λ, ρ)` of an irreducible module. The raw pair is kept as given;
/// `canonical` picks the representative of `(λ,ρ) ~ (−λ,−ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LabelJson", into = "LabelJson")]
pub struct Rep4Label {
    pub lambda: HalfInt,
    pub rho: C64,
}

#[derive(Serialize, Deserialize)]
struct LabelJson {
    lambda: [i64; 2],
    rho: [f64; 2],
}

impl From<Rep4Label> for LabelJson {
    fn from(l: Rep4Label) -> Self {
        let lambda = if l.lambda.is_integer() {
            [l.lambda.twice() / 2, 1]
        } else {
            [l.lambda.twice(), 2]
        };
        LabelJson { lambda, rho: [l.rho.re, l.rho.im] }
    }
}

impl TryFrom<LabelJson> for Rep4Label {
    type Error = Error;
    fn try_from(j: LabelJson) -> Result<Self> {
        let [n, d] = j.lambda;
        if d <= 0 || (2 * n) % d != 0 {
            return Err(Error::InvalidLabel(format!("lambda {n}/{d} is not a half-integer")));
        }
        Ok(Rep4Label::new(HalfInt(2 * n / d), C64::new(j.rho[0], j.rho[1])))
    }
}

impl fmt::Display for Rep4Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rho.im == 0.0 {
            write!(f, "({}, {})", self.lambda, self.rho.re)
        } else {
            write!(f, "({}, {}{:+}i)", self.lambda, self.rho.re, self.rho.im)
        }
    }
}

impl Rep4Label {
    pub fn new(lambda: HalfInt, rho: C64) -> Self {
        Self { lambda, rho }
    }

    /// Finite-dimensional module `(j1, j2)`.
    pub fn from_finite(j1: HalfInt, j2: HalfInt) -> Self {
        let lambda = (j1 - j2).abs();
        let s = j1.f() + j2.f() + 1.0;
        let rho = if j1 < j2 { s } else { -s };
        Self::new(lambda, re(rho))
    }

    /// Inverse of `from_finite`, `None` for infinite-dimensional modules.
    pub fn to_finite(&self) -> Option<(HalfInt, HalfInt)> {
        let omega = self.j_max()?;
        let l = if self.lambda < HalfInt::ZERO { -*self } else { *self };
        let b = if l.rho.re > 0.0 { 1 } else { -1 };
        let j1 = HalfInt((omega.twice() - b * l.lambda.twice()) / 2);
        let j2 = HalfInt((omega.twice() + b * l.lambda.twice()) / 2);
        Some((j1, j2))
    }

    /// Representative with `λ > 0`, or `λ = 0` and `Im ρ ≥ 0`.
    pub fn canonical(&self) -> Self {
        let flip = self.lambda < HalfInt::ZERO
            || (self.lambda == HalfInt::ZERO && self.rho.im < 0.0);
        if flip {
            -*self
        } else {
            *self
        }
    }

    /// Same module up to `(λ,ρ) ~ (−λ,−ρ)`.
    pub fn equivalent(&self, o: &Self) -> bool {
        let same = |a: &Self, b: &Self| a.lambda == b.lambda && near(a.rho, b.rho);
        same(self, o) || same(self, &-*o)
    }

    pub fn j_min(&self) -> HalfInt {
        self.lambda.abs()
    }

    /// `|ρ| − 1` when `ρ ∈ ±(|λ| + ℕ)`.
    pub fn j_max(&self) -> Option<HalfInt> {
        if !is_real(self.rho) {
            return None;
        }
        let t = 2.0 * self.rho.re.abs();
        let tr = t.round();
        if (t - tr).abs() > EPS * t.max(1.0) {
            return None;
        }
        let k2 = tr as i64 - self.lambda.abs().twice();
        if k2 >= 2 && k2 % 2 == 0 {
            Some(HalfInt(tr as i64 - 2))
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.j_max().is_some()
    }

    /// `(ω−|λ|+1)(ω+|λ|+1)` for finite modules.
    pub fn dim(&self) -> Option<usize> {
        let w = self.j_max()?;
        let l = self.j_min();
        Some(((w - l).f() as usize + 1) * ((w + l).f() as usize + 1))
    }

    /// `P⁻_{λ,ρ}(j)`; zero at the bottom of the tower.
    pub fn p_minus(&self, j: HalfInt) -> C64 {
        if j <= self.j_min() {
            return C64::new(0.0, 0.0);
        }
        let (jf, l) = (j.f(), self.lambda.f());
        csqrt(re(jf + l)) * csqrt(re(jf - l)) * csqrt(jf + self.rho) * csqrt(jf - self.rho)
            / (jf * (2.0 * jf + 1.0).sqrt() * (2.0 * jf - 1.0).sqrt())
    }

    pub fn p_plus(&self, j: HalfInt) -> C64 {
        self.p_minus(j + HalfInt::ONE)
    }

    pub fn p(&self, j: HalfInt) -> C64 {
        if j == HalfInt::ZERO {
            return C64::new(0.0, 0.0);
        }
        I * self.lambda.f() * self.rho / (j.f() * (j.f() + 1.0))
    }

    /// `(𝒞₁, 𝒞₂) = (iλρ, λ² + ρ² − 1)`.
    pub fn casimirs(&self) -> (C64, C64) {
        casimir_values(self)
    }

    /// Principal (`ρ ∈ iℝ`), complementary (`λ = 0`, `0 < |ρ| < 1`) or
    /// trivial (`λ = 0`, `ρ = ±1`).
    pub fn is_unitary(&self) -> bool {
        let r = self.rho;
        if r.re.abs() <= EPS {
            return true;
        }
        if self.lambda != HalfInt::ZERO || !is_real(r) {
            return false;
        }
        let a = r.re.abs();
        a < 1.0 || (a - 1.0).abs() <= EPS
    }
}

impl std::ops::Neg for Rep4Label {
    type Output = Rep4Label;
    fn neg(self) -> Rep4Label {
        Rep4Label::new(-self.lambda, -self.rho)
    }
}

pub fn casimir_values(l: &Rep4Label) -> (C64, C64) {
    let lam = l.lambda.f();
    (I * lam * l.rho, re(lam * lam - 1.0) + l.rho * l.rho)
}

/// Vector in `V_{λ,ρ}` truncated at `j ≤ j_cut`, stored as amplitudes on
/// `|(λ,ρ) j, m⟩`.
#[derive(Clone, Debug)]
pub struct SU2TowerState {
    pub label: Rep4Label,
    pub j_cut: HalfInt,
    amps: BTreeMap<(HalfInt, HalfInt), C64>,
}

impl SU2TowerState {
    pub fn new(label: Rep4Label, j_cut: HalfInt) -> Result<Self> {
        if j_cut < label.j_min() || !(j_cut - label.j_min()).is_integer() {
            return Err(Error::InvalidLabel(format!(
                "cutoff {j_cut} is not in the tower of {label}"
            )));
        }
        if let Some(w) = label.j_max() {
            if j_cut > w {
                return Err(Error::InvalidLabel(format!(
                    "cutoff {j_cut} exceeds j_max = {w} of {label}"
                )));
            }
        }
        Ok(Self::raw(label, j_cut))
    }

    fn raw(label: Rep4Label, j_cut: HalfInt) -> Self {
        Self { label, j_cut, amps: BTreeMap::new() }
    }

    /// `|λ| + 8`, capped at `j_max`.
    pub fn default_cut(label: &Rep4Label) -> HalfInt {
        let c = label.j_min() + HalfInt::int(8);
        label.j_max().map_or(c, |w| c.min(w))
    }

    pub fn basis(label: Rep4Label, j_cut: HalfInt, j: HalfInt, m: HalfInt) -> Result<Self> {
        let mut s = Self::new(label, j_cut)?;
        if !s.contains(j, m) {
            return Err(Error::InvalidLabel(format!("|{j}, {m}⟩ is not in the tower of {label}")));
        }
        s.amps.insert((j, m), re(1.0));
        Ok(s)
    }

    pub fn contains(&self, j: HalfInt, m: HalfInt) -> bool {
        j >= self.label.j_min()
            && j <= self.j_cut
            && (j - self.label.j_min()).is_integer()
            && m.abs() <= j
            && (j - m).is_integer()
    }

    /// All `(j, m)` in the truncated tower.
    pub fn keys(&self) -> Vec<(HalfInt, HalfInt)> {
        let mut out = vec![];
        for j in self.label.j_min().range_to(self.j_cut) {
            for m in (-j).range_to(j) {
                out.push((j, m));
            }
        }
        out
    }

    pub fn get(&self, j: HalfInt, m: HalfInt) -> C64 {
        self.amps.get(&(j, m)).copied().unwrap_or_default()
    }

    /// Adds `v` at `(j, m)`; components outside the tower are dropped.
    pub fn accumulate(&mut self, j: HalfInt, m: HalfInt, v: C64) {
        if self.contains(j, m) {
            *self.amps.entry((j, m)).or_default() += v;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((HalfInt, HalfInt), C64)> + '_ {
        self.amps.iter().map(|(k, v)| (*k, *v))
    }

    /// `j ≤ j_cut − 1`.
    pub fn is_interior(&self, j: HalfInt) -> bool {
        j + HalfInt::ONE <= self.j_cut
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.amps.values_mut() {
            *v *= s;
        }
        out
    }

    fn combine(&self, o: &Self, s: f64) -> Self {
        let mut out = Self::raw(self.label, self.j_cut.min(o.j_cut));
        for (&(j, m), &v) in &self.amps {
            out.accumulate(j, m, v);
        }
        for (&(j, m), &v) in &o.amps {
            out.accumulate(j, m, v * s);
        }
        out
    }

    /// Sum, truncated at the smaller cutoff.
    pub fn plus(&self, o: &Self) -> Self {
        self.combine(o, 1.0)
    }

    /// Difference, truncated at the smaller cutoff.
    pub fn minus(&self, o: &Self) -> Self {
        self.combine(o, -1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn interior_max(&self) -> f64 {
        self.amps
            .iter()
            .filter(|((j, _), _)| self.is_interior(*j))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator4 {
    J0,
    Jplus,
    Jminus,
    K0,
    Kplus,
    Kminus,
}

impl Generator4 {
    pub const ALL: [Generator4; 6] = [
        Generator4::J0,
        Generator4::Jplus,
        Generator4::Jminus,
        Generator4::K0,
        Generator4::Kplus,
        Generator4::Kminus,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Generator4::J0 => "J0",
            Generator4::Jplus => "J+",
            Generator4::Jminus => "J-",
            Generator4::K0 => "K0",
            Generator4::Kplus => "K+",
            Generator4::Kminus => "K-",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.tag() == s)
    }
}

fn c_pm(j: f64, m: f64, sign: f64) -> f64 {
    rsqrt(j - sign * m) * rsqrt(j + sign * m + 1.0)
}

/// Action of a rotation or boost generator. Components above `j_cut` are
/// dropped.
pub fn apply_generator(gen: Generator4, s: &SU2TowerState) -> SU2TowerState {
    let l = s.label;
    let mut out = SU2TowerState::raw(l, s.j_cut);
    let one = HalfInt::ONE;
    for ((j, m), c) in s.iter() {
        let (jf, mf) = (j.f(), m.f());
        match gen {
            Generator4::J0 => out.accumulate(j, m, c * mf),
            Generator4::Jplus => out.accumulate(j, m + one, c * c_pm(jf, mf, 1.0)),
            Generator4::Jminus => out.accumulate(j, m - one, c * c_pm(jf, mf, -1.0)),
            Generator4::K0 => {
                let up = rsqrt(jf + mf + 1.0) * rsqrt(jf - mf + 1.0);
                out.accumulate(j + one, m, c * l.p_plus(j) * up);
                out.accumulate(j, m, c * l.p(j) * mf);
                let dn = rsqrt(jf + mf) * rsqrt(jf - mf);
                out.accumulate(j - one, m, c * l.p_minus(j) * dn);
            }
            Generator4::Kplus | Generator4::Kminus => {
                let sg = if gen == Generator4::Kplus { 1.0 } else { -1.0 };
                let m2 = if sg > 0.0 { m + one } else { m - one };
                let up = rsqrt(jf + sg * mf + 1.0) * rsqrt(jf + sg * mf + 2.0);
                out.accumulate(j + one, m2, -c * sg * l.p_plus(j) * up);
                out.accumulate(j, m2, c * l.p(j) * c_pm(jf, mf, sg));
                let dn = rsqrt(jf - sg * mf) * rsqrt(jf - sg * mf - 1.0);
                out.accumulate(j - one, m2, c * sg * l.p_minus(j) * dn);
            }
        }
    }
    out
}

/// Boost generator action; same as `apply_generator`.
pub fn boost_apply(gen: Generator4, s: &SU2TowerState) -> SU2TowerState {
    apply_generator(gen, s)
}

/// Spinor operator `T^A_±` (`tilde = false`) or `T̃^A_±` (`tilde = true`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JsOp4 {
    pub tilde: bool,
    pub a: i8,
    pub plus: bool,
}

impl JsOp4 {
    pub fn t(a: i8, plus: bool) -> Self {
        Self { tilde: false, a, plus }
    }

    pub fn tt(a: i8, plus: bool) -> Self {
        Self { tilde: true, a, plus }
    }

    /// Parses `T+`, `T-`, `Tt+`, `Tt-` with a separate sign `A`.
    pub fn parse(s: &str, a: i8) -> Option<Self> {
        let (tilde, rest) = match s.strip_prefix("Tt") {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('T')?),
        };
        let plus = match rest {
            "+" => true,
            "-" => false,
            _ => return None,
        };
        Some(Self { tilde, a, plus })
    }

    /// Label reached from `l`.
    pub fn target(&self, l: &Rep4Label) -> Rep4Label {
        let (dl, dr) = if self.tilde { (HalfInt::HALF, 0.5) } else { (-HalfInt::HALF, -0.5) };
        Rep4Label::new(l.lambda + dl, l.rho + dr * self.a as f64)
    }
}

impl fmt::Display for JsOp4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.tilde { "Tt" } else { "T" };
        let s = if self.plus { '+' } else { '-' };
        let a = if self.a > 0 { '+' } else { '-' };
        write!(f, "{name}{s}^({a})")
    }
}

/// Checks `ρ ≠ ±λ` and `ρ ≠ ±(λ+1)`.
pub fn js4_supported(l: &Rep4Label) -> bool {
    let lam = l.lambda.f();
    ![lam, -lam, lam + 1.0, -lam - 1.0].iter().any(|&x| near(l.rho, re(x)))
}

/// Action of a spinor operator. The result lives on the shifted label with
/// cutoff `j_cut + ½`, so no component is lost.
pub fn js4_apply(op: JsOp4, s: &SU2TowerState) -> Result<SU2TowerState> {
    if op.a != 1 && op.a != -1 {
        return Err(Error::InvalidLabel(format!("A = {} is not ±1", op.a)));
    }
    let l = s.label;
    if !js4_supported(&l) {
        return Err(Error::UnsupportedLabel(format!(
            "{l}: spinor operators need ρ ≠ ±λ and ρ ≠ ±(λ+1)"
        )));
    }
    let target = op.target(&l);
    let mut out = SU2TowerState::raw(target, s.j_cut + HalfInt::HALF);
    let a = op.a as f64;
    let ia = I * a;
    let sg = if op.plus { 1.0 } else { -1.0 };
    let lam = l.lambda.f();
    let ar = l.rho * a;
    let h = HalfInt::HALF;
    for ((j, m), c) in s.iter() {
        let (jf, mf) = (j.f(), m.f());
        let m2 = if op.plus { m + h } else { m - h };
        let lower = j - h;
        if out.contains(lower, m2) {
            let geo = rsqrt(jf - sg * mf) / ((2.0 * jf).sqrt() * (2.0 * jf + 1.0).sqrt());
            let v = if op.tilde {
                -ia * sg * geo * rsqrt(jf - lam) * csqrt(jf - ar)
            } else {
                sg * geo * rsqrt(jf + lam) * csqrt(jf + ar)
            };
            out.accumulate(lower, m2, c * v);
        }
        let upper = j + h;
        if out.contains(upper, m2) {
            let geo = rsqrt(jf + sg * mf + 1.0) / ((2.0 * jf + 1.0).sqrt() * (2.0 * jf + 2.0).sqrt());
            let v = if op.tilde {
                geo * rsqrt(jf + lam + 1.0) * csqrt(jf + ar + 1.0)
            } else {
                ia * geo * rsqrt(jf - lam + 1.0) * csqrt(jf - ar + 1.0)
            };
            out.accumulate(upper, m2, c * v);
        }
    }
    Ok(out)
}

fn tower_basis(l: Rep4Label, cut: HalfInt) -> Result<Vec<SU2TowerState>> {
    let s = SU2TowerState::new(l, cut)?;
    s.keys()
        .into_iter()
        .filter(|(j, _)| s.is_interior(*j) || l.is_finite())
        .map(|(j, m)| SU2TowerState::basis(l, cut, j, m))
        .collect()
}

/// Largest interior violation of the oscillator relations
/// `[T^A_±, T̃^B_∓] = ±δ_AB`, `[T̃^A_±, T^B_∓] = ±δ_AB` and the vanishing
/// commutators, over the basis of `V_(λ,ρ)` up to `cut`.
pub fn js4_heisenberg_residual(l: Rep4Label, cut: HalfInt) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for b in tower_basis(l, cut)? {
        let comm = |x: JsOp4, y: JsOp4| -> Result<SU2TowerState> {
            Ok(js4_apply(x, &js4_apply(y, &b)?)?.minus(&js4_apply(y, &js4_apply(x, &b)?)?))
        };
        for a in [1i8, -1] {
            for bb in [1i8, -1] {
                let d = if a == bb { 1.0 } else { 0.0 };
                let pairs = [
                    (JsOp4::t(a, true), JsOp4::tt(bb, false), d),
                    (JsOp4::tt(a, true), JsOp4::t(bb, false), d),
                    (JsOp4::t(a, false), JsOp4::tt(bb, true), -d),
                    (JsOp4::tt(a, false), JsOp4::t(bb, true), -d),
                    (JsOp4::t(a, true), JsOp4::tt(bb, true), 0.0),
                    (JsOp4::t(a, false), JsOp4::tt(bb, false), 0.0),
                ];
                for (x, y, k) in pairs {
                    worst = worst.max(comm(x, y)?.minus(&b.scaled(re(k))).interior_max());
                }
                for p in [true, false] {
                    for q in [true, false] {
                        for tilde in [false, true] {
                            let x = JsOp4 { tilde, a, plus: p };
                            let y = JsOp4 { tilde, a: bb, plus: q };
                            worst = worst.max(comm(x, y)?.interior_max());
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Largest interior difference between `½(J − iA K)` and its spinor
/// bilinear, for both `A` and the three components.
pub fn js4_reconstruction_residual(l: Rep4Label, cut: HalfInt) -> Result<f64> {
    use Generator4::*;
    let mut worst: f64 = 0.0;
    for b in tower_basis(l, cut)? {
        for a in [1i8, -1] {
            let ia = I * a as f64;
            let m = |j: Generator4, k: Generator4| {
                apply_generator(j, &b).minus(&apply_generator(k, &b).scaled(ia)).scaled(re(0.5))
            };
            let js = |x: JsOp4, y: JsOp4| -> Result<SU2TowerState> { js4_apply(x, &js4_apply(y, &b)?) };
            let mp = js(JsOp4::t(a, true), JsOp4::tt(a, true))?;
            let mm = js(JsOp4::t(a, false), JsOp4::tt(a, false))?.scaled(re(-1.0));
            let m0 = js(JsOp4::t(a, false), JsOp4::tt(a, true))?
                .plus(&js(JsOp4::t(a, true), JsOp4::tt(a, false))?)
                .scaled(re(-0.5));
            for (got, want) in [(mp, m(Jplus, Kplus)), (mm, m(Jminus, Kminus)), (m0, m(J0, K0))] {
                worst = worst.max(got.minus(&want).interior_max());
            }
        }
    }
    Ok(worst)
}

/// Lowest `J` in `𝒥(λ, γ) = max(ε, |λ| − γ) + ℕ₀`.
pub fn j_support_min(lambda: HalfInt, gamma: HalfInt) -> HalfInt {
    let eps = if (lambda + gamma).is_integer() { HalfInt::ZERO } else { HalfInt::HALF };
    eps.max(lambda.abs() - gamma)
}

pub fn in_j_support(big_j: HalfInt, lambda: HalfInt, gamma: HalfInt) -> bool {
    let lo = j_support_min(lambda, gamma);
    big_j >= lo && (big_j - lo).is_integer()
}

/// `Ω_J(λ, γ)`: the tower spins `j` contributing to `V_J`.
pub fn omega(big_j: HalfInt, lambda: HalfInt, gamma: HalfInt) -> Vec<HalfInt> {
    let l = lambda.abs();
    let (lo, hi) = if big_j >= gamma - l {
        ((big_j - gamma).max(l), big_j + gamma)
    } else {
        (gamma - big_j, gamma + big_j)
    };
    lo.range_to(hi).collect()
}

/// `ρ + Aλ ∉ (−2γ, 2γ) ∩ ℤ`.
pub fn f4_decomposable(gamma: HalfInt, a: i8, lambda: HalfInt, rho: C64) -> bool {
    let x = rho + a as f64 * lambda.f();
    if !is_real(x) {
        return true;
    }
    let r = x.re.round();
    if (x.re - r).abs() > EPS * x.re.abs().max(1.0) {
        return true;
    }
    r.abs() >= 2.0 * gamma.f()
}

/// Decomposability of `(γ1, γ2) ⊗ V_{λ,ρ}`.
pub fn finite_pair_decomposable(g1: HalfInt, g2: HalfInt, lambda: HalfInt, rho: C64) -> bool {
    f4_decomposable(g1, -1, lambda, rho) && f4_decomposable(g2, 1, lambda, rho)
}

/// Casimir matrices of `F^A_γ ⊗ V_{λ,ρ}` restricted to the highest-weight
/// vectors `|(j) J⟩`, `j ∈ Ω_J`.
#[derive(Clone, Debug)]
pub struct CasimirBlock {
    pub label: Rep4Label,
    pub gamma: HalfInt,
    pub a: i8,
    pub big_j: HalfInt,
    pub js: Vec<HalfInt>,
    pub c1: TridiagonalMatrix,
    pub c2: TridiagonalMatrix,
}

/// Simultaneous eigenvector with its eigenvalues and the matched
/// `(Λ, P) = (λ + ν, ρ + Aν)`.
#[derive(Clone, Debug)]
pub struct CasimirEigen {
    pub nu: HalfInt,
    pub label: Rep4Label,
    pub c1: C64,
    pub c2: C64,
    pub match_residual: f64,
    pub c2_residual: f64,
    /// Normalised to `vᵀv = 1`; sign makes the largest entry have positive
    /// real part.
    pub vector: CVec,
}

#[derive(Clone, Debug)]
pub enum BlockReport {
    Diagonalizable(Vec<CasimirEigen>),
    Defective { eigenvectors: usize, dim: usize },
}

impl BlockReport {
    pub fn is_defective(&self) -> bool {
        matches!(self, BlockReport::Defective { .. })
    }
}

pub fn casimir_block_on_vj(
    label: Rep4Label,
    gamma: HalfInt,
    a: i8,
    big_j: HalfInt,
) -> Result<CasimirBlock> {
    if a != 1 && a != -1 {
        return Err(Error::InvalidLabel(format!("A = {a} is not ±1")));
    }
    if gamma <= HalfInt::ZERO {
        return Err(Error::InvalidLabel(format!("γ = {gamma} must be positive")));
    }
    if label.is_finite() {
        return Err(Error::InvalidLabel(format!("{label} is finite-dimensional")));
    }
    if !in_j_support(big_j, label.lambda, gamma) {
        return Err(Error::InvalidLabel(format!(
            "J = {big_j} is not in the support for λ = {}, γ = {gamma}",
            label.lambda
        )));
    }
    let js = omega(big_j, label.lambda, gamma);
    let (jj, g, af) = (big_j.f(), gamma.f(), a as f64);
    let ia = I * af;
    let cas = jj * (jj + 1.0);
    let gg = g * (g + 1.0);
    let (_, c2v) = label.casimirs();
    let (mut d1, mut d2, mut sub1, mut sup1, mut sub2, mut sup2) =
        (vec![], vec![], vec![], vec![], vec![], vec![]);
    for (i, &j) in js.iter().enumerate() {
        let jf = j.f();
        let p = label.p(j);
        let jc = jf * (jf + 1.0);
        d1.push(cas * (ia + p) * 0.5 - (jc - gg) * (ia - p) * 0.5);
        d2.push((cas - jc) * (1.0 - ia * p) + gg * (1.0 + ia * p) + c2v);
        if i + 1 < js.len() {
            let root = rsqrt(jj + jf + g + 2.0)
                * rsqrt(jf + g - jj + 1.0)
                * rsqrt(jj + jf - g + 1.0)
                * rsqrt(jj - jf + g);
            let pp = label.p_plus(j);
            sub1.push(pp * 0.5 * root);
            sub2.push(-ia * pp * root);
        }
        if i > 0 {
            let root = rsqrt(jj + jf + g + 1.0)
                * rsqrt(jf + g - jj)
                * rsqrt(jj + jf - g)
                * rsqrt(jj - jf + g + 1.0);
            let pm = label.p_minus(j);
            sup1.push(pm * 0.5 * root);
            sup2.push(-ia * pm * root);
        }
    }
    Ok(CasimirBlock {
        label,
        gamma,
        a,
        big_j,
        js,
        c1: TridiagonalMatrix::new(d1, sub1, sup1),
        c2: TridiagonalMatrix::new(d2, sub2, sup2),
    })
}

/// `vᵀv = 1` (when possible) and a sign that makes the largest entry have
/// positive real part.
fn bilinear_normalise(v: &CVec) -> CVec {
    let b = v.iter().map(|z| z * z).sum::<C64>();
    let mut w = if b.norm() > 1e-14 * v.norm_squared() { v / csqrt(b) } else { v.clone() };
    let k = (0..w.len())
        .max_by(|&x, &y| w[x].norm().partial_cmp(&w[y].norm()).unwrap())
        .unwrap_or(0);
    let lead = w[k];
    if lead.re < 0.0 || (lead.re.abs() <= EPS * lead.norm() && lead.im < 0.0) {
        w = -w;
    }
    w
}

impl CasimirBlock {
    pub fn dim(&self) -> usize {
        self.js.len()
    }

    /// Eigenvectors of `𝒞₁` (rank tolerance 1e-8). Each `𝒞₁` eigenspace
    /// is one-dimensional, so fewer vectors than `dim` means defective.
    pub fn report(&self) -> Result<BlockReport> {
        let m1 = self.c1.to_dense();
        let m2 = self.c2.to_dense();
        let pairs = solve_eigen_general(&m1)?;
        let dim = self.dim();
        if pairs.len() < dim {
            return Ok(BlockReport::Defective { eigenvectors: pairs.len(), dim });
        }
        let lam = self.label.lambda;
        let nus: Vec<HalfInt> = (-self.gamma).range_to(self.gamma).collect();
        let mut out = vec![];
        for ep in pairs {
            let v = bilinear_normalise(&ep.vector);
            let w = &m2 * &v;
            let c2 = v.iter().zip(w.iter()).map(|(x, y)| x.conj() * y).sum::<C64>() / v.norm_squared();
            let c2_residual = (w - &v * c2).norm() / v.norm();
            let (nu, match_residual) = nus
                .iter()
                .map(|&nu| {
                    let l = Rep4Label::new(lam + nu, self.label.rho + self.a as f64 * nu.f());
                    let (e1, e2) = l.casimirs();
                    let scale = e1.norm().max(e2.norm()).max(1.0);
                    (nu, ((ep.value - e1).norm() + (c2 - e2).norm()) / scale)
                })
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            out.push(CasimirEigen {
                nu,
                label: Rep4Label::new(lam + nu, self.label.rho + self.a as f64 * nu.f()),
                c1: ep.value,
                c2,
                match_residual,
                c2_residual,
                vector: v,
            });
        }
        out.sort_by_key(|e| e.nu);
        Ok(BlockReport::Diagonalizable(out))
    }
}

/// Coefficients `B{(Λ,P) J | γ_A; (λ,ρ) j}` on one `V_J`. Rows are `j`
/// (ascending), columns `(Λ,P)` (ascending `Λ`).
#[derive(Clone, Debug)]
pub struct Cg4Table {
    pub gamma: HalfInt,
    pub big_j: HalfInt,
    pub js: Vec<HalfInt>,
    pub labels: Vec<Rep4Label>,
    pub b: CMat,
}

/// One entry of the γ = ½ table: `j = J ± ½` (`above`) and
/// `Λ = λ ± ½` (`raise`).
pub fn cg4_half_entry(label: Rep4Label, a: i8, big_j: HalfInt, above: bool, raise: bool) -> C64 {
    let (jj, lam, af) = (big_j.f(), label.lambda.f(), a as f64);
    let ar = label.rho * af;
    let den = (2.0 * jj + 1.0).sqrt() * csqrt(lam + ar);
    let x = csqrt(re(jj - lam + 0.5)) * csqrt(jj - ar + 0.5) / den;
    let y = csqrt(re(jj + lam + 0.5)) * csqrt(jj + ar + 0.5) / den;
    match (above, raise) {
        (false, false) => I * af * x,
        (false, true) => y,
        (true, false) => y,
        (true, true) => -I * af * x,
    }
}

/// Closed-form γ = ½ table; `NotDecomposable` when `ρ = −Aλ`.
pub fn cg4_half(label: Rep4Label, a: i8, big_j: HalfInt) -> Result<Cg4Table> {
    if a != 1 && a != -1 {
        return Err(Error::InvalidLabel(format!("A = {a} is not ±1")));
    }
    let lam = label.lambda;
    if near(label.rho * a as f64 + lam.f(), re(0.0)) {
        return Err(Error::NotDecomposable(format!(
            "F^({a})_1/2 ⊗ V{label}: ρ = −Aλ"
        )));
    }
    let h = HalfInt::HALF;
    let shift = |up: bool| {
        let s = if up { 0.5 } else { -0.5 };
        Rep4Label::new(if up { lam + h } else { lam - h }, label.rho + s * a as f64)
    };
    if big_j >= lam.abs() + h && (big_j - lam.abs() - h).is_integer() {
        let mut b = CMat::zeros(2, 2);
        for (r, above) in [false, true].into_iter().enumerate() {
            for (c, raise) in [false, true].into_iter().enumerate() {
                b[(r, c)] = cg4_half_entry(label, a, big_j, above, raise);
            }
        }
        return Ok(Cg4Table {
            gamma: h,
            big_j,
            js: vec![big_j - h, big_j + h],
            labels: vec![shift(false), shift(true)],
            b,
        });
    }
    if lam != HalfInt::ZERO && big_j == lam.abs() - h {
        let raise = lam < HalfInt::ZERO;
        let mut b = CMat::zeros(1, 1);
        b[(0, 0)] = cg4_half_entry(label, a, big_j, true, raise);
        return Ok(Cg4Table { gamma: h, big_j, js: vec![big_j + h], labels: vec![shift(raise)], b });
    }
    Err(Error::InvalidLabel(format!(
        "J = {big_j} is not in the support for λ = {lam}, γ = 1/2"
    )))
}

/// General-γ coefficients for `J ≥ |λ| + γ`. The lowest row
/// `B{(λ+ν, ρ+Aν) J | γ_A; (λ,ρ) J−γ}` follows the ratio rule
/// `B(ν+1)/B(ν) = α_ν sqrt(J+Λ+1) sqrt(J+AP+1) / (sqrt(J−Λ) sqrt(J−AP))`
/// with `vᵀv = 1`; each column is then completed by forward substitution on
/// the `𝒞₁` block at the exact eigenvalue `i(λ+ν)(ρ+Aν)`.
#[derive(Clone, Debug)]
pub struct CgChain {
    pub label: Rep4Label,
    pub gamma: HalfInt,
    pub a: i8,
    pub j0: HalfInt,
    /// `α_ν` for `ν = −γ, …, γ−1`, pinned at `J = j0`.
    pub alpha: Vec<C64>,
}

fn shifted(label: Rep4Label, a: i8, nu: HalfInt) -> Rep4Label {
    Rep4Label::new(label.lambda + nu, label.rho + a as f64 * nu.f())
}

pub fn cg4_chain(label: Rep4Label, gamma: HalfInt, a: i8) -> Result<CgChain> {
    if !f4_decomposable(gamma, a, label.lambda, label.rho) {
        return Err(Error::NotDecomposable(format!(
            "F^({a})_{gamma} ⊗ V{label}: ρ + Aλ ∈ (−2γ, 2γ) ∩ ℤ"
        )));
    }
    let j0 = label.j_min() + gamma;
    let block = casimir_block_on_vj(label, gamma, a, j0)?;
    let eig = match block.report()? {
        BlockReport::Diagonalizable(e) => e,
        BlockReport::Defective { .. } => {
            return Err(Error::NotDecomposable(format!("F^({a})_{gamma} ⊗ V{label}")))
        }
    };
    let lowest: Vec<C64> = eig.iter().map(|e| e.vector[0]).collect();
    if lowest.iter().any(|b| b.norm() < 1e-300) {
        return Err(Error::UnsupportedCoupling(format!(
            "vanishing lowest-row coefficient for F^({a})_{gamma} ⊗ V{label}"
        )));
    }
    let mut chain = CgChain { label, gamma, a, j0, alpha: vec![] };
    for (k, e) in eig.iter().enumerate().take(eig.len() - 1) {
        let r = chain.ratio(e.nu, j0);
        chain.alpha.push(lowest[k + 1] / lowest[k] / r);
    }
    Ok(chain)
}

impl CgChain {
    /// `sqrt(J+Λ+1) sqrt(J+AP+1) / (sqrt(J−Λ) sqrt(J−AP))` at
    /// `(Λ,P) = (λ+ν, ρ+Aν)`.
    pub fn ratio(&self, nu: HalfInt, big_j: HalfInt) -> C64 {
        let l = shifted(self.label, self.a, nu);
        let (jj, lam) = (big_j.f(), l.lambda.f());
        let ap = l.rho * self.a as f64;
        csqrt(re(jj + lam + 1.0)) * csqrt(jj + ap + 1.0) / (csqrt(re(jj - lam)) * csqrt(jj - ap))
    }

    /// Lowest row at `J`.
    pub fn lowest_row(&self, big_j: HalfInt) -> Vec<C64> {
        let mut w = vec![re(1.0)];
        for (k, nu) in (-self.gamma).range_to(self.gamma - HalfInt::ONE).enumerate() {
            let next = w[k] * self.alpha[k] * self.ratio(nu, big_j);
            w.push(next);
        }
        let s = csqrt(w.iter().map(|x| x * x).sum::<C64>());
        w.iter().map(|x| x / s).collect()
    }

    pub fn table(&self, big_j: HalfInt) -> Result<Cg4Table> {
        if big_j < self.j0 || !(big_j - self.j0).is_integer() {
            return Err(Error::InvalidLabel(format!(
                "J = {big_j} is below |λ| + γ = {} or off its lattice",
                self.j0
            )));
        }
        let block = casimir_block_on_vj(self.label, self.gamma, self.a, big_j)?;
        let row = self.lowest_row(big_j);
        let nus: Vec<HalfInt> = (-self.gamma).range_to(self.gamma).collect();
        let mut b = CMat::zeros(block.dim(), nus.len());
        let mut labels = vec![];
        for (c, &nu) in nus.iter().enumerate() {
            let l = shifted(self.label, self.a, nu);
            let x = crate::numeric::tridiag_null_vector(&block.c1, l.casimirs().0)?;
            for r in 0..block.dim() {
                b[(r, c)] = x[r] * row[c];
            }
            labels.push(l);
        }
        Ok(Cg4Table { gamma: self.gamma, big_j, js: block.js, labels, b })
    }
}

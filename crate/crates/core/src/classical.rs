//! Classical spinor variables, their Poisson algebra and the classical
//! flatness constraints on a triangular face.
//!
//! Each leg carries four complex generators `τ-, τ+, τ̃-, τ̃+` with
//! `{τ+, τ̃-} = {τ̃+, τ-} = -i`. Polynomials have exact Gaussian-rational
//! coefficients, so identities can be checked to be exactly zero.
//!
//! Bra-ket notation for a pair `(τ, τ̃)`:
//!
//! ```text
//! |τ⟩ = (τ-, τ+)ᵀ    |τ] = (τ̃-, τ̃+)ᵀ    ⟨τ| = (-τ̃+, τ̃-)    [τ| = (-τ+, τ-)
//! ```

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::lqg::Bracket;
use crate::numeric::{csqrt, C64};

/// Exact Gaussian rational.
pub type Coef = Complex<Rational64>;

fn q(n: i64) -> Coef {
    Complex::new(Rational64::from_integer(n), Rational64::from_integer(0))
}

fn qi(n: i64) -> Coef {
    Complex::new(Rational64::from_integer(0), Rational64::from_integer(n))
}

fn half() -> Coef {
    Complex::new(Rational64::new(1, 2), Rational64::from_integer(0))
}

fn coef_to_c64(c: &Coef) -> C64 {
    let f = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
    C64::new(f(&c.re), f(&c.im))
}

fn is_zero(c: &Coef) -> bool {
    c.re == Rational64::from_integer(0) && c.im == Rational64::from_integer(0)
}

/// One of the four spinor components on a leg.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Minus,
    Plus,
    TildeMinus,
    TildePlus,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::Minus, Component::Plus, Component::TildeMinus, Component::TildePlus];

    fn symbol(self) -> &'static str {
        match self {
            Component::Minus => "t-",
            Component::Plus => "t+",
            Component::TildeMinus => "tt-",
            Component::TildePlus => "tt+",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub leg: u16,
    pub comp: Component,
}

impl Gen {
    pub fn new(leg: u16, comp: Component) -> Self {
        Self { leg, comp }
    }
}

/// `{x, y}` for two generators.
pub fn generator_bracket(x: Gen, y: Gen) -> Coef {
    use Component::*;
    if x.leg != y.leg {
        return q(0);
    }
    match (x.comp, y.comp) {
        (Plus, TildeMinus) | (TildePlus, Minus) => qi(-1),
        (TildeMinus, Plus) | (Minus, TildePlus) => qi(1),
        _ => q(0),
    }
}

/// Sorted multiset of generators.
type Monomial = Vec<Gen>;

/// Polynomial in the spinor generators.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PoissonPolynomial {
    terms: BTreeMap<Monomial, Coef>,
}

impl PoissonPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coef) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn gen(g: Gen) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![g], q(1));
        p
    }

    pub fn var(leg: u16, comp: Component) -> Self {
        Self::gen(Gen::new(leg, comp))
    }

    fn add_term(&mut self, mut m: Monomial, c: Coef) {
        if is_zero(&c) {
            return;
        }
        m.sort_unstable();
        let e = self.terms.entry(m.clone()).or_insert_with(|| q(0));
        *e += c;
        if is_zero(e) {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: Coef) -> Self {
        let mut p = Self::zero();
        for (m, v) in &self.terms {
            p.add_term(m.clone(), v * c);
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (m, v) in &o.terms {
            p.add_term(m.clone(), *v);
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(q(-1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (m1, v1) in &self.terms {
            for (m2, v2) in &o.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                p.add_term(m, v1 * v2);
            }
        }
        p
    }

    /// `∂p/∂g`.
    pub fn derivative(&self, g: Gen) -> Self {
        let mut p = Self::zero();
        for (m, v) in &self.terms {
            let k = m.iter().filter(|x| **x == g).count();
            if k == 0 {
                continue;
            }
            let mut rest = m.clone();
            let pos = rest.iter().position(|x| *x == g).unwrap();
            rest.remove(pos);
            p.add_term(rest, v * q(k as i64));
        }
        p
    }

    fn generators(&self) -> Vec<Gen> {
        let mut v: Vec<Gen> = self.terms.keys().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn eval(&self, val: &dyn Fn(Gen) -> C64) -> C64 {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().fold(coef_to_c64(c), |acc, g| acc * val(*g)))
            .sum()
    }
}

impl fmt::Display for PoissonPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}", c.re)?;
            if c.im != Rational64::from_integer(0) {
                write!(f, "{:+}i", c.im)?;
            }
            write!(f, ")")?;
            for g in m {
                write!(f, "·{}{}", g.comp.symbol(), g.leg)?;
            }
        }
        Ok(())
    }
}

/// `{p, q} = Σ ∂p/∂x ∂q/∂y {x, y}`.
pub fn bracket(p: &PoissonPolynomial, r: &PoissonPolynomial) -> PoissonPolynomial {
    let mut out = PoissonPolynomial::zero();
    let gq = r.generators();
    for x in p.generators() {
        let dp = p.derivative(x);
        for &y in &gq {
            let b = generator_bracket(x, y);
            if is_zero(&b) {
                continue;
            }
            out = out.add(&dp.mul(&r.derivative(y)).scale(b));
        }
    }
    out
}

fn v(leg: u16, c: Component) -> PoissonPolynomial {
    PoissonPolynomial::var(leg, c)
}

/// `B(σ, τ) = σ- τ+ - σ+ τ-` for the untilded or tilded halves of two legs.
fn bilinear(a: u16, ta: bool, b: u16, tb: bool) -> PoissonPolynomial {
    use Component::*;
    let (am, ap) = if ta { (TildeMinus, TildePlus) } else { (Minus, Plus) };
    let (bm, bp) = if tb { (TildeMinus, TildePlus) } else { (Minus, Plus) };
    v(a, am).mul(&v(b, bp)).sub(&v(a, ap).mul(&v(b, bm)))
}

/// `e_ab = B(τ̃_a, τ_b) = ⟨τ_a|τ_b⟩`.
pub fn e(a: u16, b: u16) -> PoissonPolynomial {
    bilinear(a, true, b, false)
}

/// `ẽ_ab = B(τ_a, τ̃_b) = [τ_a|τ_b] = -e_ba`.
pub fn et(a: u16, b: u16) -> PoissonPolynomial {
    bilinear(a, false, b, true)
}

/// `f_ab = B(τ_a, τ_b) = [τ_a|τ_b⟩`.
pub fn f(a: u16, b: u16) -> PoissonPolynomial {
    bilinear(a, false, b, false)
}

/// `f̃_ab = B(τ̃_a, τ̃_b) = ⟨τ_a|τ_b]`.
pub fn ft(a: u16, b: u16) -> PoissonPolynomial {
    bilinear(a, true, b, true)
}

/// `x0 = -½(τ-τ̃+ + τ+τ̃-)`.
pub fn x0(leg: u16) -> PoissonPolynomial {
    use Component::*;
    v(leg, Minus).mul(&v(leg, TildePlus)).add(&v(leg, Plus).mul(&v(leg, TildeMinus))).scale(-half())
}

/// `x± = ±i τ± τ̃±`.
pub fn x_pm(leg: u16, sign: i8) -> PoissonPolynomial {
    use Component::*;
    if sign > 0 {
        v(leg, Plus).mul(&v(leg, TildePlus)).scale(qi(1))
    } else {
        v(leg, Minus).mul(&v(leg, TildeMinus)).scale(qi(-1))
    }
}

/// `σ0, σ1, σ2` of the flux `x_a = ½⟨τ|σ_a|τ⟩`, with `x1 = (x+ + x-)/2`
/// and `x2 = (x+ - x-)/2i`.
pub fn sigma(a: usize) -> [[Coef; 2]; 2] {
    match a {
        0 => [[q(1), q(0)], [q(0), q(-1)]],
        1 => [[q(0), qi(-1)], [qi(-1), q(0)]],
        _ => [[q(0), q(-1)], [q(1), q(0)]],
    }
}

/// `(x0, x1, x2)` with `x_a = ½⟨τ|σ_a|τ⟩`.
pub fn flux(leg: u16) -> [PoissonPolynomial; 3] {
    use Component::*;
    let bra = [v(leg, TildePlus).scale(q(-1)), v(leg, TildeMinus)];
    let ket = [v(leg, Minus), v(leg, Plus)];
    std::array::from_fn(|a| {
        let s = sigma(a);
        let mut p = PoissonPolynomial::zero();
        for i in 0..2 {
            for j in 0..2 {
                p = p.add(&bra[i].mul(&ket[j]).scale(s[i][j] * half()));
            }
        }
        p
    })
}

/// Numeric values of the four components of one leg.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorPair {
    /// `(τ-, τ+)`
    pub tau: [C64; 2],
    /// `(τ̃-, τ̃+)`
    pub tilde: [C64; 2],
}

impl SpinorPair {
    pub fn new(tau: [C64; 2], tilde: [C64; 2]) -> Self {
        Self { tau, tilde }
    }

    /// Reality binding `τ̃± = s·conj(τ∓)`.
    pub fn bound(tau: [C64; 2], s: f64) -> Self {
        Self { tau, tilde: [tau[1].conj() * s, tau[0].conj() * s] }
    }

    /// Euclidean binding `τ̃± = ∓conj(τ∓)`.
    pub fn euclidean(tau: [C64; 2]) -> Self {
        Self { tau, tilde: [tau[1].conj(), -tau[0].conj()] }
    }

    pub fn get(&self, c: Component) -> C64 {
        match c {
            Component::Minus => self.tau[0],
            Component::Plus => self.tau[1],
            Component::TildeMinus => self.tilde[0],
            Component::TildePlus => self.tilde[1],
        }
    }

    /// `|τ⟩`
    pub fn ket(&self) -> [C64; 2] {
        self.tau
    }

    /// `|τ]`
    pub fn ket_t(&self) -> [C64; 2] {
        self.tilde
    }

    /// `⟨τ|`
    pub fn bra(&self) -> [C64; 2] {
        [-self.tilde[1], self.tilde[0]]
    }

    /// `[τ|`
    pub fn bra_t(&self) -> [C64; 2] {
        [-self.tau[1], self.tau[0]]
    }

    /// `⟨τ|τ⟩`
    pub fn norm(&self) -> C64 {
        dot(self.bra(), self.ket())
    }

    pub fn scaled_ket(&self, s: C64) -> Self {
        Self { tau: [self.tau[0] * s, self.tau[1] * s], tilde: self.tilde }
    }
}

pub fn dot(bra: [C64; 2], ket: [C64; 2]) -> C64 {
    bra[0] * ket[0] + bra[1] * ket[1]
}

fn outer(ket: [C64; 2], bra: [C64; 2]) -> Matrix2<C64> {
    Matrix2::new(ket[0] * bra[0], ket[0] * bra[1], ket[1] * bra[0], ket[1] * bra[1])
}

pub fn apply(g: &Matrix2<C64>, ket: [C64; 2]) -> [C64; 2] {
    [g[(0, 0)] * ket[0] + g[(0, 1)] * ket[1], g[(1, 0)] * ket[0] + g[(1, 1)] * ket[1]]
}

pub fn apply_bra(bra: [C64; 2], g: &Matrix2<C64>) -> [C64; 2] {
    [bra[0] * g[(0, 0)] + bra[1] * g[(1, 0)], bra[0] * g[(0, 1)] + bra[1] * g[(1, 1)]]
}

/// `g = (|w⟩⟨τ| - |w]⟨τ]) / sqrt(⟨τ|τ⟩⟨w|w⟩)` with the principal root.
pub fn holonomy(tau: &SpinorPair, w: &SpinorPair) -> Result<Matrix2<C64>> {
    let n = tau.norm() * w.norm();
    if n.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((outer(w.ket(), tau.bra()) - outer(w.ket_t(), tau.bra_t())) / csqrt(n))
}

/// `g⁻¹ = (|τ⟩⟨w| - |τ]⟨w]) / sqrt(⟨τ|τ⟩⟨w|w⟩)`.
pub fn holonomy_inverse(tau: &SpinorPair, w: &SpinorPair) -> Result<Matrix2<C64>> {
    holonomy(w, tau)
}

/// Numerator entries of the holonomy as polynomials in the generators of the
/// `τ` leg and the `w` leg; `det = ⟨τ|τ⟩⟨w|w⟩`.
pub fn holonomy_numerator(tau_leg: u16, w_leg: u16) -> [[PoissonPolynomial; 2]; 2] {
    use Component::*;
    let t = |c| v(tau_leg, c);
    let w = |c| v(w_leg, c);
    [
        [
            w(TildeMinus).mul(&t(Plus)).sub(&w(Minus).mul(&t(TildePlus))),
            w(Minus).mul(&t(TildeMinus)).sub(&w(TildeMinus).mul(&t(Minus))),
        ],
        [
            w(TildePlus).mul(&t(Plus)).sub(&w(Plus).mul(&t(TildePlus))),
            w(Plus).mul(&t(TildeMinus)).sub(&w(TildePlus).mul(&t(Minus))),
        ],
    ]
}

/// Leg numbering on the triangular face: edge `x` has its source spinor on
/// leg `x` and its target spinor on leg `10 + x`.
pub fn tau_leg(x: u8) -> u16 {
    x as u16
}

pub fn w_leg(x: u8) -> u16 {
    10 + x as u16
}

/// `lead - middle · tail / inverse`.
#[derive(Clone, Debug)]
pub struct RationalHamiltonian {
    pub lead: PoissonPolynomial,
    pub middle: PoissonPolynomial,
    pub tail: PoissonPolynomial,
    pub inverse: PoissonPolynomial,
}

impl RationalHamiltonian {
    pub fn eval(&self, val: &dyn Fn(Gen) -> C64) -> Result<C64> {
        let d = self.inverse.eval(val);
        if d.norm() == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.lead.eval(val) - self.middle.eval(val) * self.tail.eval(val) / d)
    }
}

/// The four constraints for the cycle `(a, b, c)` in terms of vertex
/// observables. The vertex shared by `c` and `a` carries `w_c` and `τ_a`,
/// the one shared by `c` and `b` carries `τ_c` and `τ_b`, the one shared by
/// `b` and `a` carries `w_b` and `w_a`.
pub fn classical_hamiltonians(a: u8, b: u8, c: u8) -> [(Bracket, RationalHamiltonian); 4] {
    let (ca0, ca1) = (w_leg(c), tau_leg(a));
    let (cb0, cb1) = (tau_leg(c), tau_leg(b));
    let (ba0, ba1) = (w_leg(b), w_leg(a));
    let eb = e(tau_leg(b), tau_leg(b));
    let h = |lead: PoissonPolynomial, middle: PoissonPolynomial, tail: PoissonPolynomial| RationalHamiltonian {
        lead,
        middle,
        tail,
        inverse: eb.clone(),
    };
    [
        (
            Bracket::Angle,
            h(
                e(ca0, ca1).mul(&et(ca0, ca1)),
                e(cb0, cb1).mul(&e(ba0, ba1)).sub(&ft(cb0, cb1).mul(&f(ba0, ba1))),
                et(ca0, ca1),
            ),
        ),
        (
            Bracket::Square,
            h(
                et(ca0, ca1).mul(&e(ca0, ca1)),
                f(cb0, cb1).mul(&ft(ba0, ba1)).sub(&et(cb0, cb1).mul(&et(ba0, ba1))),
                e(ca0, ca1),
            ),
        ),
        (
            Bracket::AngleSquare,
            h(
                ft(ca0, ca1).mul(&f(ca0, ca1)),
                e(cb0, cb1).mul(&ft(ba0, ba1)).sub(&ft(cb0, cb1).mul(&et(ba0, ba1))),
                f(ca0, ca1),
            ),
        ),
        (
            Bracket::SquareAngle,
            h(
                f(ca0, ca1).mul(&ft(ca0, ca1)),
                f(cb0, cb1).mul(&e(ba0, ba1)).sub(&et(cb0, cb1).mul(&f(ba0, ba1))),
                ft(ca0, ca1),
            ),
        ),
    ]
}

/// Spinors on the three edges of a face; `tau[i]`, `w[i]` belong to edge
/// `edges[i]`.
#[derive(Clone, Copy, Debug)]
pub struct FaceSpinors {
    pub edges: [u8; 3],
    pub tau: [SpinorPair; 3],
    pub w: [SpinorPair; 3],
}

impl FaceSpinors {
    fn idx(&self, x: u8) -> usize {
        self.edges.iter().position(|&e| e == x).expect("edge on the face")
    }

    pub fn value(&self, g: Gen) -> C64 {
        let (leg, is_w) = if g.leg >= 10 { (g.leg - 10, true) } else { (g.leg, false) };
        let i = self.idx(leg as u8);
        if is_w {
            self.w[i].get(g.comp)
        } else {
            self.tau[i].get(g.comp)
        }
    }

    pub fn holonomy(&self, x: u8) -> Result<Matrix2<C64>> {
        let i = self.idx(x);
        holonomy(&self.tau[i], &self.w[i])
    }

    /// `g_c g_b⁻¹ g_a`, the transport around the face starting and ending at
    /// the vertex shared by `c` and `a`.
    pub fn face_holonomy(&self, a: u8, b: u8, c: u8) -> Result<Matrix2<C64>> {
        let gb = self.holonomy(b)?;
        let gbi = gb.try_inverse().ok_or(Error::ZeroNorm)?;
        Ok(self.holonomy(c)? * gbi * self.holonomy(a)?)
    }

    /// The constraint from its definition,
    /// e.g. `⟨w_c|(1 - g_c g_b⁻¹ g_a)|τ_a⟩ [w_c|τ_a]` for `⟨⟩`.
    pub fn hamiltonian_direct(&self, bracket: Bracket, a: u8, b: u8, c: u8) -> Result<C64> {
        let m = Matrix2::identity() - self.face_holonomy(a, b, c)?;
        let wc = self.w[self.idx(c)];
        let ta = self.tau[self.idx(a)];
        let (bra, ket, bra2, ket2) = match bracket {
            Bracket::Angle => (wc.bra(), ta.ket(), wc.bra_t(), ta.ket_t()),
            Bracket::Square => (wc.bra_t(), ta.ket_t(), wc.bra(), ta.ket()),
            Bracket::AngleSquare => (wc.bra(), ta.ket_t(), wc.bra_t(), ta.ket()),
            Bracket::SquareAngle => (wc.bra_t(), ta.ket(), wc.bra(), ta.ket_t()),
        };
        Ok(dot(apply_bra(bra, &m), ket) * dot(bra2, ket2))
    }

    /// `H^⟨] + H^[⟩ - H^⟨⟩ - H^[[` from the vertex-observable forms and
    /// `e_a e_c tr(1 - g_c g_b⁻¹ g_a)`.
    pub fn trace_identity_sides(&self, a: u8, b: u8, c: u8) -> Result<(C64, C64)> {
        let val = |g: Gen| self.value(g);
        let hs = classical_hamiltonians(a, b, c);
        let mut lhs = C64::new(0.0, 0.0);
        for (br, h) in &hs {
            let s = match br {
                Bracket::AngleSquare | Bracket::SquareAngle => 1.0,
                _ => -1.0,
            };
            lhs += h.eval(&val)? * s;
        }
        let ea = self.tau[self.idx(a)].norm();
        let ec = self.tau[self.idx(c)].norm();
        let m = Matrix2::identity() - self.face_holonomy(a, b, c)?;
        Ok((lhs, ea * ec * m.trace()))
    }
}

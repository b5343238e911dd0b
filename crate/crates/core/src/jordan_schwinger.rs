//! Spinor operators `T`, `T̃` on Spin(2,1) modules and the scalar
//! observables `E`, `F`, `F̃` built from them.
//!
//! On kets
//!
//! ```text
//! T-|j,m⟩ = -sqrt(j+m)   |j-½, m-½⟩      T̃-|j,m⟩ = sqrt(j-m+1) |j+½, m-½⟩
//! T+|j,m⟩ =  sqrt(j-m)   |j-½, m+½⟩      T̃+|j,m⟩ = sqrt(j+m+1) |j+½, m+½⟩
//! ```
//!
//! and on bras (`T⟨j,m| := ⟨j,m|T`)
//!
//! ```text
//! T-⟨j,m| = -sqrt(j+m+1) ⟨j+½, m+½|      T̃-⟨j,m| = sqrt(j-m) ⟨j-½, m+½|
//! T+⟨j,m| =  sqrt(j-m+1) ⟨j+½, m-½|      T̃+⟨j,m| = sqrt(j+m) ⟨j-½, m-½|
//! ```

use crate::numeric::StableMap;

use crate::half::HalfInt;
use crate::numeric::{csqrt, re, C64, I};
use crate::spin21::{gamma, Class3, Generator, RepLabel3, WeightWindow};

/// Whether a leg carries a ket (outgoing) or a bra (incoming).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Ket,
    Bra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spinor {
    TMinus,
    TPlus,
    TtMinus,
    TtPlus,
}

/// A spinor operator acting on one leg.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinorOp {
    pub which: Spinor,
    pub leg: usize,
}

impl SpinorOp {
    pub fn new(which: Spinor, leg: usize) -> Self {
        Self { which, leg }
    }
}

/// Rounds `j` to a dyadic grid so that half steps up and down return the
/// identical key.
fn snap(l: RepLabel3) -> RepLabel3 {
    const G: f64 = (1u64 << 44) as f64;
    let r = |x: f64| (x * G).round() / G;
    RepLabel3 { j: C64::new(r(l.j.re), r(l.j.im)), ..l }
}

fn snapped(b: &Basis) -> Basis {
    Basis { labels: b.labels.iter().map(|l| snap(*l)).collect(), weights: b.weights.clone() }
}

/// One basis tensor: a label and a weight per leg.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    pub labels: Vec<RepLabel3>,
    pub weights: Vec<HalfInt>,
}

/// Finite combination of basis tensors over a fixed set of legs.
#[derive(Clone, Debug, Default)]
pub struct MultiLegState {
    pub sides: Vec<Side>,
    pub terms: StableMap<Basis, C64>,
    /// Set when an operator produced a nonzero amplitude on a label that
    /// is not a module (e.g. `T` below `D_{-½}`); such terms are dropped.
    pub out_of_domain: bool,
}

impl MultiLegState {
    pub fn empty(sides: Vec<Side>) -> Self {
        Self { sides, terms: StableMap::default(), out_of_domain: false }
    }

    pub fn basis(sides: Vec<Side>, labels: Vec<RepLabel3>, weights: Vec<HalfInt>) -> Self {
        assert_eq!(sides.len(), labels.len());
        assert_eq!(sides.len(), weights.len());
        assert!(labels.iter().zip(&weights).all(|(l, m)| l.contains(*m)), "weight outside its module");
        let mut s = Self::empty(sides);
        s.add_term(Basis { labels, weights }, re(1.0));
        s
    }

    pub fn kets(labels: Vec<RepLabel3>, weights: Vec<HalfInt>) -> Self {
        Self::basis(vec![Side::Ket; labels.len()], labels, weights)
    }

    pub fn legs(&self) -> usize {
        self.sides.len()
    }

    /// Adds `v` to the amplitude of `b`; labels are stored on a dyadic grid
    /// of spacing `2^-44`.
    pub fn add_term(&mut self, b: Basis, v: C64) {
        *self.terms.entry(snapped(&b)).or_default() += v;
    }

    pub fn get(&self, b: &Basis) -> C64 {
        self.terms.get(&snapped(b)).copied().unwrap_or_default()
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= s;
        }
        out
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (b, v) in &o.terms {
            out.add_term(b.clone(), *v);
        }
        out.out_of_domain |= o.out_of_domain;
        out
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scaled(re(-1.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Label reached after a half step `dj = ±½`; `None` if it is not a module.
pub fn shifted_label(l: &RepLabel3, up: bool) -> Option<RepLabel3> {
    let dj = if up { 0.5 } else { -0.5 };
    let mut n = *l;
    n.j = l.j + dj;
    if l.class == Class3::Continuous {
        n.eps = HalfInt((l.eps.0 + 1).rem_euclid(2));
    }
    n.validate().ok().map(|_| n)
}

/// `(amplitude, j goes up, m shift)` of one spinor operator on `|j,m⟩` or `⟨j,m|`.
fn element(which: Spinor, side: Side, j: C64, m: HalfInt) -> (C64, bool, HalfInt) {
    let mf = m.f();
    let h = HalfInt::HALF;
    match (side, which) {
        (Side::Ket, Spinor::TMinus) => (-csqrt(j + mf), false, -h),
        (Side::Ket, Spinor::TPlus) => (csqrt(j - mf), false, h),
        (Side::Ket, Spinor::TtMinus) => (csqrt(j - mf + 1.0), true, -h),
        (Side::Ket, Spinor::TtPlus) => (csqrt(j + mf + 1.0), true, h),
        (Side::Bra, Spinor::TMinus) => (-csqrt(j + mf + 1.0), true, h),
        (Side::Bra, Spinor::TPlus) => (csqrt(j - mf + 1.0), true, -h),
        (Side::Bra, Spinor::TtMinus) => (csqrt(j - mf), false, h),
        (Side::Bra, Spinor::TtPlus) => (csqrt(j + mf), false, -h),
    }
}

pub fn apply_spinor(op: SpinorOp, s: &MultiLegState) -> MultiLegState {
    assert!(op.leg < s.legs(), "leg {} out of range", op.leg);
    let side = s.sides[op.leg];
    let mut out = MultiLegState::empty(s.sides.clone());
    out.out_of_domain = s.out_of_domain;
    for (b, v) in &s.terms {
        let l = b.labels[op.leg];
        let m = b.weights[op.leg];
        let (amp, up, dm) = element(op.which, side, l.j, m);
        if amp == re(0.0) || *v == re(0.0) {
            continue;
        }
        match shifted_label(&l, up).filter(|n| n.contains(m + dm)) {
            Some(n) => {
                let mut nb = b.clone();
                nb.labels[op.leg] = n;
                nb.weights[op.leg] = m + dm;
                out.add_term(nb, amp * v);
            }
            None => out.out_of_domain = true,
        }
    }
    out
}

/// Applies `ops` right to left, i.e. `ops[0] ∘ ops[1] ∘ …` acting on `s`.
pub fn apply_product(ops: &[SpinorOp], s: &MultiLegState) -> MultiLegState {
    ops.iter().rev().fold(s.clone(), |acc, op| apply_spinor(*op, &acc))
}

/// `J±`, `J0` and `Q` on one ket leg through `Γ±(j,m)`.
pub fn apply_generator_leg(gen: Generator, leg: usize, s: &MultiLegState) -> MultiLegState {
    let mut out = MultiLegState::empty(s.sides.clone());
    for (b, v) in &s.terms {
        let l = b.labels[leg];
        let m = b.weights[leg];
        let (amp, dm) = match gen {
            Generator::J0 => (re(m.f()), HalfInt::ZERO),
            Generator::JPlus => (gamma(l.j, m, 1), HalfInt::ONE),
            Generator::JMinus => (gamma(l.j, m, -1), -HalfInt::ONE),
            Generator::Q => (l.casimir(), HalfInt::ZERO),
        };
        if !l.contains(m + dm) {
            continue;
        }
        let mut nb = b.clone();
        nb.weights[leg] = m + dm;
        out.add_term(nb, amp * v);
    }
    out
}

/// Generators rebuilt from spinors on one ket leg:
/// `J± = ±i T± T̃±`, `J0 = -½ (T- T̃+ + T+ T̃-)`, `Q = ½ (J+J- + J-J+) - J0²`.
pub fn reconstruct_generator(gen: Generator, leg: usize, s: &MultiLegState) -> MultiLegState {
    let op = |w| SpinorOp::new(w, leg);
    use Spinor::*;
    match gen {
        Generator::JPlus => apply_product(&[op(TPlus), op(TtPlus)], s).scaled(I),
        Generator::JMinus => apply_product(&[op(TMinus), op(TtMinus)], s).scaled(-I),
        Generator::J0 => apply_product(&[op(TMinus), op(TtPlus)], s)
            .plus(&apply_product(&[op(TPlus), op(TtMinus)], s))
            .scaled(re(-0.5)),
        Generator::Q => {
            let jp = |x: &MultiLegState| reconstruct_generator(Generator::JPlus, leg, x);
            let jm = |x: &MultiLegState| reconstruct_generator(Generator::JMinus, leg, x);
            let j0 = |x: &MultiLegState| reconstruct_generator(Generator::J0, leg, x);
            jp(&jm(s)).plus(&jm(&jp(s))).scaled(re(0.5)).minus(&j0(&j0(s)))
        }
    }
}

/// Single-ket-leg state with the amplitudes of a weight window.
pub fn from_window(w: &WeightWindow) -> MultiLegState {
    let mut s = MultiLegState::empty(vec![Side::Ket]);
    for (m, v) in &w.amps {
        s.add_term(Basis { labels: vec![w.label], weights: vec![*m] }, *v);
    }
    s
}

/// Largest deviation between the rebuilt and the direct generator over the
/// interior basis vectors of `[m_lo, m_hi]`, relative to `max(1, |output|)`.
pub fn reconstruction_residual(label: &RepLabel3, m_lo: HalfInt, m_hi: HalfInt) -> f64 {
    let mut worst: f64 = 0.0;
    for m in label.weights_in(m_lo + HalfInt::ONE, m_hi - HalfInt::ONE) {
        let s = MultiLegState::kets(vec![*label], vec![m]);
        for g in [Generator::J0, Generator::JPlus, Generator::JMinus, Generator::Q] {
            let a = reconstruct_generator(g, 0, &s);
            let b = apply_generator_leg(g, 0, &s);
            let d = a.minus(&b).max_abs() / b.max_abs().max(1.0);
            worst = worst.max(d);
        }
    }
    worst
}

/// Commutator `[X, Y] = XY - YX` of two spinor operators applied to `s`.
pub fn spinor_commutator(x: SpinorOp, y: SpinorOp, s: &MultiLegState) -> MultiLegState {
    apply_product(&[x, y], s).minus(&apply_product(&[y, x], s))
}

/// Largest deviation from `[T+, T̃-] = [T̃+, T-] = 1` with all other
/// commutators zero, over interior ket basis vectors of `[m_lo, m_hi]`.
pub fn heisenberg_residual(label: &RepLabel3, m_lo: HalfInt, m_hi: HalfInt) -> f64 {
    use Spinor::*;
    let all = [TMinus, TPlus, TtMinus, TtPlus];
    let mut worst: f64 = 0.0;
    for m in label.weights_in(m_lo + HalfInt::ONE, m_hi - HalfInt::ONE) {
        let s = MultiLegState::kets(vec![*label], vec![m]);
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let c = spinor_commutator(SpinorOp::new(*a, 0), SpinorOp::new(*b, 0), &s);
                let want = match (a, b) {
                    (TPlus, TtMinus) => 1.0,
                    (TMinus, TtPlus) => -1.0,
                    _ => 0.0,
                };
                let d = c.minus(&s.scaled(re(want)));
                let scale = apply_product(&[SpinorOp::new(*a, 0), SpinorOp::new(*b, 0)], &s).max_abs().max(1.0);
                worst = worst.max(d.max_abs() / scale);
            }
        }
    }
    worst
}

/// Scalar observables on a pair of legs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    E,
    F,
    Ft,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScalarOp {
    pub kind: ScalarKind,
    pub a: usize,
    pub b: usize,
}

impl ScalarOp {
    pub fn e(a: usize, b: usize) -> Self {
        Self { kind: ScalarKind::E, a, b }
    }
    pub fn f(a: usize, b: usize) -> Self {
        Self { kind: ScalarKind::F, a, b }
    }
    pub fn ft(a: usize, b: usize) -> Self {
        Self { kind: ScalarKind::Ft, a, b }
    }
}

/// `E_ab = T̃ᵃ- Tᵇ+ - T̃ᵃ+ Tᵇ- + δ_ab`, `F_ab = Tᵃ- Tᵇ+ - Tᵃ+ Tᵇ-`,
/// `F̃_ab = T̃ᵃ- T̃ᵇ+ - T̃ᵃ+ T̃ᵇ-`.
pub fn apply_scalar(op: ScalarOp, s: &MultiLegState) -> MultiLegState {
    use Spinor::*;
    let (p, q) = match op.kind {
        ScalarKind::E => ((TtMinus, TPlus), (TtPlus, TMinus)),
        ScalarKind::F => ((TMinus, TPlus), (TPlus, TMinus)),
        ScalarKind::Ft => ((TtMinus, TtPlus), (TtPlus, TtMinus)),
    };
    let first = apply_product(&[SpinorOp::new(p.0, op.a), SpinorOp::new(p.1, op.b)], s);
    let second = apply_product(&[SpinorOp::new(q.0, op.a), SpinorOp::new(q.1, op.b)], s);
    let mut out = first.minus(&second);
    if op.kind == ScalarKind::E && op.a == op.b {
        out = out.plus(s);
    }
    out
}

pub fn scalar_commutator(x: ScalarOp, y: ScalarOp, s: &MultiLegState) -> MultiLegState {
    apply_scalar(x, &apply_scalar(y, s)).minus(&apply_scalar(y, &apply_scalar(x, s)))
}

/// Right-hand side of the commutation relations of `E`, `F`, `F̃` as a
/// combination of scalar operators; `None` when the commutator vanishes.
pub fn algebra_rhs(x: ScalarOp, y: ScalarOp) -> Vec<(f64, ScalarOp)> {
    use ScalarKind::*;
    let d = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
    let (a, b, c, dd) = (x.a, x.b, y.a, y.b);
    let terms = match (x.kind, y.kind) {
        (E, E) => vec![(d(c, b), ScalarOp::e(a, dd)), (-d(a, dd), ScalarOp::e(c, b))],
        (E, Ft) => vec![(d(b, c), ScalarOp::ft(a, dd)), (-d(b, dd), ScalarOp::ft(a, c))],
        (E, F) => vec![(d(a, dd), ScalarOp::f(b, c)), (-d(a, c), ScalarOp::f(b, dd))],
        (F, Ft) => vec![
            (d(dd, b), ScalarOp::e(c, a)),
            (d(c, a), ScalarOp::e(dd, b)),
            (-d(c, b), ScalarOp::e(dd, a)),
            (-d(dd, a), ScalarOp::e(c, b)),
        ],
        (F, F) | (Ft, Ft) => vec![],
        _ => return algebra_rhs(y, x).into_iter().map(|(c, o)| (-c, o)).collect(),
    };
    terms.into_iter().filter(|(c, _)| *c != 0.0).collect()
}

/// `|[X, Y] s - rhs s|` for one pair of scalar operators.
pub fn algebra_residual(x: ScalarOp, y: ScalarOp, s: &MultiLegState) -> f64 {
    let lhs = scalar_commutator(x, y, s);
    let rhs = algebra_rhs(x, y)
        .into_iter()
        .fold(MultiLegState::empty(s.sides.clone()), |acc, (c, o)| acc.plus(&apply_scalar(o, s).scaled(re(c))));
    lhs.minus(&rhs).max_abs()
}

//! Truncated Fock-space oracle for the `2n` Jordan–Schwinger oscillators
//! `A_a`, `B_a`.
//!
//! Vectors are stored in the unnormalised monomial basis
//! `(A†)^μ (B†)^ν |0⟩`, so creation operators act with coefficient 1 and
//! annihilation operators with the (integer) occupation number. Everything
//! is therefore exact over the integers, and the `i64` instantiation is
//! used for the algebra checks.

use crate::numeric::StableMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{antisym_canonical, re, CMat, C64};

pub const MAX_LEGS: usize = 8;

/// Occupations: `A_a` at index `a`, `B_a` at index `MAX_LEGS + a`.
pub type Occ = [u8; 2 * MAX_LEGS];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    A(usize),
    B(usize),
}

impl Mode {
    fn slot(self) -> usize {
        match self {
            Mode::A(a) => a,
            Mode::B(a) => MAX_LEGS + a,
        }
    }

    pub fn leg(self) -> usize {
        match self {
            Mode::A(a) | Mode::B(a) => a,
        }
    }

    fn with_leg(self, leg: usize) -> Mode {
        match self {
            Mode::A(_) => Mode::A(leg),
            Mode::B(_) => Mode::B(leg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: Mode,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: Mode) -> Self {
        Ladder { mode, dagger: true }
    }

    pub fn annihilate(mode: Mode) -> Self {
        Ladder { mode, dagger: false }
    }
}

/// Product of ladder operators as written; the last one acts first.
pub type Word = Vec<Ladder>;

pub trait Coeff:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + PartialEq
{
    fn zero() -> Self;
    fn one() -> Self;
    fn count(k: u8) -> Self;
    fn is_zero(&self) -> bool;
}

impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn count(k: u8) -> Self {
        k as i64
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
}

impl Coeff for C64 {
    fn zero() -> Self {
        re(0.0)
    }
    fn one() -> Self {
        re(1.0)
    }
    fn count(k: u8) -> Self {
        re(k as f64)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Linear combination of words.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    pub terms: Vec<(T, Word)>,
}

impl<T: Coeff> Poly<T> {
    pub fn zero() -> Self {
        Poly { terms: vec![] }
    }

    pub fn constant(c: T) -> Self {
        Poly { terms: vec![(c, vec![])] }
    }

    pub fn word(c: T, w: Word) -> Self {
        Poly { terms: vec![(c, w)] }
    }

    pub fn plus(mut self, other: &Poly<T>) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn scaled(mut self, s: T) -> Self {
        for t in &mut self.terms {
            t.0 = t.0 * s;
        }
        self
    }

    /// Operator product `self · other`.
    pub fn times(&self, other: &Poly<T>) -> Self {
        let mut terms = vec![];
        for (c1, w1) in &self.terms {
            for (c2, w2) in &other.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().copied());
                terms.push((*c1 * *c2, w));
            }
        }
        Poly { terms }
    }

    pub fn commutator(&self, other: &Poly<T>) -> Self {
        self.times(other).plus(&other.times(self).scaled(-T::one()))
    }
}

fn create(m: Mode) -> Ladder {
    Ladder::create(m)
}

fn annihilate(m: Mode) -> Ladder {
    Ladder::annihilate(m)
}

/// `E_ab = A†_a A_b + B†_a B_b + δ_ab`.
pub fn e_op<T: Coeff>(a: usize, b: usize) -> Poly<T> {
    let mut p = Poly {
        terms: vec![
            (T::one(), vec![create(Mode::A(a)), annihilate(Mode::A(b))]),
            (T::one(), vec![create(Mode::B(a)), annihilate(Mode::B(b))]),
        ],
    };
    if a == b {
        p.terms.push((T::one(), vec![]));
    }
    p
}

/// `F_ab = B_a A_b - A_a B_b`.
pub fn f_op<T: Coeff>(a: usize, b: usize) -> Poly<T> {
    Poly {
        terms: vec![
            (T::one(), vec![annihilate(Mode::B(a)), annihilate(Mode::A(b))]),
            (-T::one(), vec![annihilate(Mode::A(a)), annihilate(Mode::B(b))]),
        ],
    }
}

/// `F̃_ab = B†_a A†_b - A†_a B†_b`.
pub fn ft_op<T: Coeff>(a: usize, b: usize) -> Poly<T> {
    Poly {
        terms: vec![
            (T::one(), vec![create(Mode::B(a)), create(Mode::A(b))]),
            (-T::one(), vec![create(Mode::A(a)), create(Mode::B(b))]),
        ],
    }
}

/// `𝒜_ab = ½(E_ab - δ_ab)`.
pub fn area_op(a: usize, b: usize) -> Poly<C64> {
    let mut p = e_op::<C64>(a, b);
    if a == b {
        p.terms.pop();
    }
    p.scaled(re(0.5))
}

/// Total `J_z`, `J_+` of the Jordan–Schwinger construction.
pub fn jz_total(n: usize) -> Poly<C64> {
    let mut p = Poly::zero();
    for a in 0..n {
        p.terms.push((re(0.5), vec![create(Mode::A(a)), annihilate(Mode::A(a))]));
        p.terms.push((re(-0.5), vec![create(Mode::B(a)), annihilate(Mode::B(a))]));
    }
    p
}

pub fn jplus_total<T: Coeff>(n: usize) -> Poly<T> {
    Poly {
        terms: (0..n)
            .map(|a| (T::one(), vec![create(Mode::A(a)), annihilate(Mode::B(a))]))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVec<T> {
    n: usize,
    amps: StableMap<Occ, T>,
}

impl<T: Coeff> FockVec<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_LEGS, "at most {MAX_LEGS} legs");
        FockVec { n, amps: StableMap::default() }
    }

    pub fn vacuum(n: usize) -> Self {
        Self::basis(n, [0; 2 * MAX_LEGS], T::one())
    }

    pub fn basis(n: usize, occ: Occ, c: T) -> Self {
        let mut v = Self::zero(n);
        v.amps.insert(occ, c);
        v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn get(&self, occ: &Occ) -> T {
        self.amps.get(occ).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occ, &T)> {
        self.amps.iter()
    }

    fn accumulate(&mut self, occ: Occ, c: T) {
        if c.is_zero() {
            return;
        }
        let e = self.amps.entry(occ).or_insert_with(T::zero);
        *e = *e + c;
    }

    pub fn add_scaled(&mut self, other: &FockVec<T>, s: T) {
        for (k, v) in &other.amps {
            self.accumulate(*k, *v * s);
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = Self::zero(self.n);
        out.add_scaled(self, s);
        out
    }

    /// Drops exact zeros left by cancellations.
    pub fn pruned(mut self) -> Self {
        self.amps.retain(|_, v| !v.is_zero());
        self
    }

    pub fn apply_ladder(&self, l: Ladder) -> Self {
        assert!(l.mode.leg() < self.n, "mode outside the {}-leg space", self.n);
        let s = l.mode.slot();
        let mut out = Self::zero(self.n);
        for (occ, c) in &self.amps {
            let mut k = *occ;
            if l.dagger {
                k[s] = k[s].checked_add(1).expect("occupation overflow");
                out.accumulate(k, *c);
            } else if k[s] > 0 {
                let m = k[s];
                k[s] -= 1;
                out.accumulate(k, *c * T::count(m));
            }
        }
        out
    }

    pub fn apply_word(&self, w: &[Ladder]) -> Self {
        let mut v = self.clone();
        for l in w.iter().rev() {
            v = v.apply_ladder(*l);
        }
        v
    }

    pub fn apply(&self, p: &Poly<T>) -> Self {
        let mut out = Self::zero(self.n);
        for (c, w) in &p.terms {
            out.add_scaled(&self.apply_word(w), *c);
        }
        out
    }
}

impl FockVec<C64> {
    /// `⟨self|other⟩` with `⟨μν|μ'ν'⟩ = δ μ! ν!` in the monomial basis.
    pub fn inner(&self, other: &FockVec<C64>) -> C64 {
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut s = re(0.0);
        for (k, c) in &small.amps {
            if let Some(d) = large.amps.get(k) {
                let w = occ_half_weight(k, self.n);
                let (c, d) = (c * w, d * w);
                s += if flip { d.conj() * c } else { c.conj() * d };
            }
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps
            .iter()
            .map(|(k, c)| (c * occ_half_weight(k, self.n)).norm_sqr())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn ln_factorial(k: u8) -> f64 {
    (2..=k as u32).map(|i| (i as f64).ln()).sum()
}

/// `(Π μ! ν!)^{½}`, evaluated in log space so high shells do not overflow.
fn occ_half_weight(k: &Occ, n: usize) -> f64 {
    let ln: f64 = (0..n).map(|a| ln_factorial(k[a]) + ln_factorial(k[MAX_LEGS + a])).sum();
    (0.5 * ln).exp()
}

/// `½F̃_ζ = ½ Σ ζ_ab F̃_ab`.
pub fn half_ft(zeta: &CMat) -> Poly<C64> {
    let n = zeta.nrows();
    let mut p = Poly::zero();
    for a in 0..n {
        for b in 0..n {
            if zeta[(a, b)] != re(0.0) {
                p = p.plus(&ft_op::<C64>(a, b).scaled(zeta[(a, b)] * 0.5));
            }
        }
    }
    p
}

/// `F_β = Σ conj(β_ab) F_ab`.
pub fn f_of(beta: &CMat) -> Poly<C64> {
    let n = beta.nrows();
    let mut p = Poly::zero();
    for a in 0..n {
        for b in 0..n {
            if beta[(a, b)] != re(0.0) {
                p = p.plus(&f_op::<C64>(a, b).scaled(beta[(a, b)].conj()));
            }
        }
    }
    p
}

/// Anything that can evaluate expectation values in a coherent state.
pub trait Expectation {
    fn legs(&self) -> usize;
    fn expect(&mut self, op: &Poly<C64>) -> C64;
}

/// `Σ_{J ≤ J_max} (½F̃_ζ)^J |0⟩ / J!`, stored shell by shell.
#[derive(Clone, Debug)]
pub struct FockOracle {
    pub n: usize,
    pub j_max: usize,
    pub shells: Vec<FockVec<C64>>,
    tail_ratio: f64,
    full: Option<FockVec<C64>>,
}

impl FockOracle {
    pub fn new(zeta: &CMat, j_max: usize) -> Result<Self> {
        let n = zeta.nrows();
        if n == 0 || n > MAX_LEGS || !zeta.is_square() {
            return Err(Error::OutsideDomain(format!("{n} legs")));
        }
        if 2 * j_max > u8::MAX as usize {
            return Err(Error::OutsideDomain(format!("J_max = {j_max}")));
        }
        let step = half_ft(zeta);
        let mut shells = vec![FockVec::vacuum(n)];
        for j in 0..j_max {
            let next = shells[j].apply(&step).scaled(re(1.0 / (j + 1) as f64)).pruned();
            shells.push(next);
        }
        let tail_ratio = 0.5 * (zeta.adjoint() * zeta).trace().re;
        Ok(FockOracle { n, j_max, shells, tail_ratio, full: None })
    }

    /// `(½ tr ζ*ζ)^{J_max}`, the geometric factor controlling the omitted
    /// shells.
    pub fn tail_factor(&self) -> f64 {
        self.tail_ratio.powi(self.j_max as i32)
    }

    pub fn state(&mut self) -> &FockVec<C64> {
        if self.full.is_none() {
            let mut s = FockVec::zero(self.n);
            for sh in &self.shells {
                s.add_scaled(sh, re(1.0));
            }
            self.full = Some(s);
        }
        self.full.as_ref().unwrap()
    }

    pub fn norm_sq(&self) -> f64 {
        self.shells.iter().map(|s| s.norm_sq()).sum()
    }

    /// `‖(½F̃_ζ)^J |0⟩‖²`.
    pub fn shell_norm_sq(&self, j: usize) -> f64 {
        let f: f64 = (2..=j).map(|i| i as f64).product();
        self.shells[j].norm_sq() * f * f
    }

    /// Probability of total area `J` in the normalised truncated state.
    pub fn area_probabilities(&self) -> Vec<f64> {
        let total = self.norm_sq();
        self.shells.iter().map(|s| s.norm_sq() / total).collect()
    }

    /// `⟨ψ_self| op |ψ_ket⟩ / (‖ψ_self‖ ‖ψ_ket‖)`.
    pub fn matrix_element(&mut self, op: &Poly<C64>, ket: &FockOracle) -> C64 {
        let mut acted = FockVec::zero(self.n);
        for sh in &ket.shells {
            acted.add_scaled(&sh.apply(op), re(1.0));
        }
        let norms = (self.norm_sq() * ket.norm_sq()).sqrt();
        self.state().inner(&acted) / norms
    }

    /// `⟨self|ket⟩` between normalised truncated states.
    pub fn overlap(&mut self, ket: &FockOracle) -> C64 {
        self.matrix_element(&Poly::constant(re(1.0)), ket)
    }
}

impl Expectation for FockOracle {
    fn legs(&self) -> usize {
        self.n
    }

    fn expect(&mut self, op: &Poly<C64>) -> C64 {
        let mut acted = FockVec::zero(self.n);
        for sh in &self.shells {
            acted.add_scaled(&sh.apply(op), re(1.0));
        }
        let norm = self.norm_sq();
        self.state().inner(&acted) / norm
    }
}

/// Oracle in the frame where `ζ = U M Uᵀ` is block diagonal. The primed
/// oscillators `A'_d = Σ_b conj(U_bd) A_b` are canonical, the state is a
/// product over 2-leg blocks, and each block is a brute-force
/// [`FockOracle`] with `n = 2`.
#[derive(Debug)]
pub struct FramedOracle {
    pub n: usize,
    pub u: CMat,
    pub lambdas: Vec<f64>,
    blocks: Vec<FockOracle>,
    cache: StableMap<(usize, Word), C64>,
}

impl FramedOracle {
    /// Largest per-block tail factor `λ_b^{2 J_max}`.
    pub fn tail_factor(&self) -> f64 {
        self.blocks.iter().map(FockOracle::tail_factor).fold(0.0, f64::max)
    }

    pub fn new(zeta: &CMat, j_max: usize) -> Result<Self> {
        let n = zeta.nrows();
        let canon = antisym_canonical(zeta)?;
        let nb = n.div_ceil(2);
        let mut blocks = vec![];
        for b in 0..nb {
            let legs = if 2 * b + 1 < n { 2 } else { 1 };
            let l = canon.lambdas.get(b).copied().unwrap_or(0.0);
            let mut m = CMat::zeros(legs, legs);
            if legs == 2 {
                m[(0, 1)] = re(-l);
                m[(1, 0)] = re(l);
            }
            let cap = if l == 0.0 { 0 } else { j_max };
            blocks.push(FockOracle::new(&m, cap)?);
        }
        Ok(FramedOracle { n, u: canon.u, lambdas: canon.lambdas, blocks, cache: StableMap::default() })
    }

    fn block_expect(&mut self, block: usize, w: Word) -> C64 {
        if let Some(v) = self.cache.get(&(block, w.clone())) {
            return *v;
        }
        let v = self.blocks[block].expect(&Poly::word(re(1.0), w.clone()));
        self.cache.insert((block, w), v);
        v
    }

    fn primed_word_expect(&mut self, w: &[Ladder]) -> C64 {
        let nb = self.blocks.len();
        let mut parts: Vec<Word> = vec![vec![]; nb];
        for l in w {
            let d = l.mode.leg();
            parts[d / 2].push(Ladder { mode: l.mode.with_leg(d % 2), dagger: l.dagger });
        }
        let mut v = re(1.0);
        for (b, p) in parts.into_iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            v *= self.block_expect(b, p);
            if v == re(0.0) {
                break;
            }
        }
        v
    }

    fn word_expect(&mut self, w: &[Ladder]) -> C64 {
        // A_b = Σ_d U_bd A'_d, A†_b = Σ_d conj(U_bd) A'†_d
        let n = self.n;
        let mut total = re(0.0);
        let len = w.len();
        let mut idx = vec![0usize; len];
        loop {
            let mut coeff = re(1.0);
            let mut pw = Vec::with_capacity(len);
            for (k, l) in w.iter().enumerate() {
                let u = self.u[(l.mode.leg(), idx[k])];
                coeff *= if l.dagger { u.conj() } else { u };
                pw.push(Ladder { mode: l.mode.with_leg(idx[k]), dagger: l.dagger });
            }
            if coeff.norm() > 1e-300 {
                total += coeff * self.primed_word_expect(&pw);
            }
            let mut k = 0;
            loop {
                if k == len {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

impl Expectation for FramedOracle {
    fn legs(&self) -> usize {
        self.n
    }

    fn expect(&mut self, op: &Poly<C64>) -> C64 {
        let mut s = re(0.0);
        for (c, w) in &op.terms {
            if *c != re(0.0) {
                s += *c * self.word_expect(w);
            }
        }
        s
    }
}

/// Area statistics and generator expectations computed through an oracle.
#[derive(Clone, Debug)]
pub struct OracleMoments {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub total_variance: f64,
    pub e: CMat,
    pub f: CMat,
    pub ft: CMat,
}

pub fn oracle_moments<O: Expectation>(o: &mut O) -> OracleMoments {
    let n = o.legs();
    let area: Vec<Poly<C64>> = (0..n).map(|a| area_op(a, a)).collect();
    let means: Vec<f64> = area.iter().map(|p| o.expect(p).re).collect();
    let mut cov = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let c = o.expect(&area[a].times(&area[b])).re - means[a] * means[b];
            cov[a][b] = c;
            cov[b][a] = c;
        }
    }
    let mut e = CMat::zeros(n, n);
    let mut f = CMat::zeros(n, n);
    let mut ft = CMat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            e[(a, b)] = o.expect(&e_op(a, b));
            f[(a, b)] = o.expect(&f_op(a, b));
            ft[(a, b)] = o.expect(&ft_op(a, b));
        }
    }
    OracleMoments {
        variances: (0..n).map(|a| cov[a][a]).collect(),
        total_variance: cov.iter().flatten().sum(),
        means,
        e,
        f,
        ft,
    }
}

/// `exp(X)` on a vector when `X` is nilpotent on it (e.g. area lowering).
pub fn exp_nilpotent(v: &FockVec<C64>, x: &Poly<C64>) -> FockVec<C64> {
    let mut out = v.clone();
    let mut term = v.clone();
    let mut k = 1.0;
    loop {
        term = term.apply(x).scaled(re(1.0 / k)).pruned();
        if term.is_empty() || term.max_abs() == 0.0 {
            return out;
        }
        out.add_scaled(&term, re(1.0));
        k += 1.0;
    }
}

/// `exp(X)` truncated after `terms` powers (for area-raising `X`).
pub fn exp_truncated(v: &FockVec<C64>, x: &Poly<C64>, terms: usize) -> FockVec<C64> {
    let mut out = v.clone();
    let mut term = v.clone();
    for k in 1..=terms {
        term = term.apply(x).scaled(re(1.0 / k as f64)).pruned();
        out.add_scaled(&term, re(1.0));
    }
    out
}

/// `exp(E_L)` with `e^L = m`: `p(A†, B†) ↦ det(m) p(mᵀA†, mᵀB†)`.
pub fn exp_e(v: &FockVec<C64>, m: &CMat) -> FockVec<C64> {
    let n = v.n();
    let det = m.clone().determinant();
    let mut out = FockVec::zero(n);
    for (occ, c) in v.iter() {
        let mut t = FockVec::basis(n, [0; 2 * MAX_LEGS], *c * det);
        for leg in 0..n {
            for (kind, slot) in [(Mode::A(leg), leg), (Mode::B(leg), MAX_LEGS + leg)] {
                for _ in 0..occ[slot] {
                    // x_b ↦ Σ_a m_ab x_a
                    let lin = Poly {
                        terms: (0..n)
                            .filter(|a| m[(*a, leg)] != re(0.0))
                            .map(|a| (m[(a, leg)], vec![Ladder::create(kind.with_leg(a))]))
                            .collect(),
                    };
                    t = t.apply(&lin);
                }
            }
        }
        out.add_scaled(&t, re(1.0));
    }
    out.pruned()
}

/// Weight-zero occupation tuples with leg spins `2 j_a = twice[a]`.
fn weight_space(twice: &[u8], m_twice_total: i32) -> Vec<Occ> {
    let mut out = vec![];
    let mut cur = [0u8; 2 * MAX_LEGS];
    fn rec(a: usize, twice: &[u8], target: i32, acc: i32, cur: &mut Occ, out: &mut Vec<Occ>) {
        if a == twice.len() {
            if acc == target {
                out.push(*cur);
            }
            return;
        }
        for mu in 0..=twice[a] {
            cur[a] = mu;
            cur[MAX_LEGS + a] = twice[a] - mu;
            rec(a + 1, twice, target, acc + 2 * mu as i32 - twice[a] as i32, cur, out);
        }
    }
    rec(0, twice, m_twice_total, 0, &mut cur, &mut out);
    out
}

fn compositions(total: u8, parts: usize) -> Vec<Vec<u8>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = vec![];
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Number of SU(2)-invariant states of total area `J` on `n` legs: the
/// common kernel of total `J_z` and `J_+`, leg spins summed over.
pub fn invariant_count(n: usize, j: usize) -> usize {
    let jp = jplus_total::<i64>(n);
    let mut total = 0;
    for twice in compositions((2 * j) as u8, n) {
        let zero = weight_space(&twice, 0);
        if zero.is_empty() {
            continue;
        }
        let one = weight_space(&twice, 2);
        let row: StableMap<Occ, usize> = one.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut m = DMatrix::<f64>::zeros(one.len().max(1), zero.len());
        for (c, occ) in zero.iter().enumerate() {
            let v = FockVec::<i64>::basis(n, *occ, 1).apply(&jp);
            for (k, x) in v.iter() {
                m[(row[k], c)] += *x as f64;
            }
        }
        total += zero.len() - rank(&m);
    }
    total
}

fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > 1e-9 * top.max(1.0)).count()
}

/// Occupation tuple from `(μ, ν)` lists.
pub fn occ(mu: &[u8], nu: &[u8]) -> Occ {
    let mut k = [0u8; 2 * MAX_LEGS];
    k[..mu.len()].copy_from_slice(mu);
    k[MAX_LEGS..MAX_LEGS + nu.len()].copy_from_slice(nu);
    k
}

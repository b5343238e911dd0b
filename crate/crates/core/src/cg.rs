//! Clebsch–Gordan decompositions and coefficients for Spin(2,1).
//!
//! Supported couplings with coefficients: `F⊗F`, `F⊗X` and `X⊗F` for any
//! class `X`, and same-sign `D⊗D`. Coefficients are normalised so that
//! `A(..|J,M) = B(J,M|..)` and the coupled vectors obey
//! `J±|J,M⟩ = Γ±(J,M)|J,M±1⟩`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::numeric::{csqrt, nullity, re, refine_null_vector, tridiag_null_vector, CMat, CVec, TridiagonalMatrix, C64};
use crate::spin21::{gamma, Class3, RepLabel3};

/// How a constituent enters a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Measure {
    Sum,
    Integral,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constituent {
    /// For integral members `j` is `-1/2` and stands for the whole line `-1/2 + iS`.
    pub label: RepLabel3,
    pub multiplicity: u32,
    pub measure: Measure,
    pub coefficients_available: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionSet {
    pub members: Vec<Constituent>,
    /// Set when an infinite discrete sum was cut at `cap`.
    pub truncated: bool,
}

impl DecompositionSet {
    pub fn discrete_labels(&self) -> Vec<RepLabel3> {
        self.members.iter().filter(|c| c.measure == Measure::Sum).map(|c| c.label).collect()
    }

    pub fn contains(&self, l: &RepLabel3) -> bool {
        let l = canonical(*l);
        self.members.iter().any(|c| c.measure == Measure::Sum && same_label(&c.label, &l))
    }
}

fn same_label(a: &RepLabel3, b: &RepLabel3) -> bool {
    a.class == b.class && (a.j - b.j).norm() < 1e-12 && (a.class != Class3::Continuous || a.eps == b.eps)
}

/// `0` for integers, `1/2` for proper halves.
pub fn varsigma(x: HalfInt) -> HalfInt {
    HalfInt(x.0.rem_euclid(2))
}

/// Default number of discrete terms kept from an infinite sum.
pub const DEFAULT_CAP: i64 = 40;

pub fn decompose(l1: &RepLabel3, l2: &RepLabel3) -> Result<DecompositionSet> {
    decompose_capped(l1, l2, DEFAULT_CAP)
}

/// Like [`decompose`] with infinite discrete sums cut after `cap` terms.
pub fn decompose_capped(l1: &RepLabel3, l2: &RepLabel3, cap: i64) -> Result<DecompositionSet> {
    l1.validate()?;
    l2.validate()?;
    use Class3::*;
    let sum = |label: RepLabel3, avail: bool| Constituent {
        label,
        multiplicity: 1,
        measure: Measure::Sum,
        coefficients_available: avail,
    };
    let integral = |eps: HalfInt, mult: u32| Constituent {
        label: RepLabel3 { class: Continuous, j: C64::new(-0.5, 0.0), eps },
        multiplicity: mult,
        measure: Measure::Integral,
        coefficients_available: false,
    };
    match (l1.class, l2.class) {
        (Finite, _) | (_, Finite) => {
            let (f, x) = if l1.class == Finite { (l1, l2) } else { (l2, l1) };
            let g = f.jh();
            if !fx_decomposable(g, x) {
                return Err(Error::NotDecomposable(format!("F_{g} ⊗ {x}")));
            }
            let members = fx_couplings(g, x).into_iter().map(|l| sum(canonical(l), true)).collect();
            Ok(DecompositionSet { members, truncated: false })
        }
        (DiscretePlus, DiscretePlus) | (DiscreteMinus, DiscreteMinus) => {
            let lo = l1.jh() + l2.jh() + HalfInt::ONE;
            let members = (0..cap)
                .map(|k| sum(RepLabel3::with_class_j(l1.class, lo + HalfInt::int(k)), true))
                .collect();
            Ok(DecompositionSet { members, truncated: true })
        }
        (DiscretePlus, DiscreteMinus) | (DiscreteMinus, DiscretePlus) => {
            let (j, jp) = (l1.jh(), l2.jh());
            let e = varsigma(j + jp);
            let mut members = Vec::new();
            for jj in e.range_to(j - jp - HalfInt::ONE) {
                members.push(sum(RepLabel3::with_class_j(l1.class, jj), false));
            }
            for jj in e.range_to(jp - j - HalfInt::ONE) {
                members.push(sum(RepLabel3::with_class_j(l2.class, jj), false));
            }
            members.push(integral(e, 1));
            Ok(DecompositionSet { members, truncated: false })
        }
        (Continuous, Continuous) => {
            for l in [l1, l2] {
                if !is_principal(l) {
                    return Err(Error::UnsupportedCoupling(format!("{l} is not in the principal series")));
                }
            }
            let e = varsigma(l1.eps + l2.eps);
            let members = (0..cap)
                .map(|k| sum(RepLabel3::dplus(e + HalfInt::int(k)), false))
                .chain((0..cap).map(|k| sum(RepLabel3::dminus(e + HalfInt::int(k)), false)))
                .chain(std::iter::once(integral(e, 2)))
                .collect();
            Ok(DecompositionSet { members, truncated: true })
        }
        _ => {
            let (d, c) = if l1.is_discrete() { (l1, l2) } else { (l2, l1) };
            if !is_principal(c) {
                return Err(Error::UnsupportedCoupling(format!("{c} is not in the principal series")));
            }
            let e = varsigma(d.jh() + c.eps);
            let members = (0..cap)
                .map(|k| sum(RepLabel3::with_class_j(d.class, e + HalfInt::int(k)), false))
                .chain(std::iter::once(integral(e, 1)))
                .collect();
            Ok(DecompositionSet { members, truncated: true })
        }
    }
}

fn is_principal(l: &RepLabel3) -> bool {
    l.class == Class3::Continuous && (l.j.re + 0.5).abs() < 1e-12 && l.j.im != 0.0
}

fn canonical(l: RepLabel3) -> RepLabel3 {
    match l.class {
        Class3::Continuous => RepLabel3::continuous(l.j, l.eps).unwrap_or(l),
        _ => l,
    }
}

/// Whether `F_γ ⊗ X` is a direct sum of irreducibles.
pub fn fx_decomposable(g: HalfInt, x: &RepLabel3) -> bool {
    match x.class {
        Class3::Finite => true,
        Class3::DiscretePlus | Class3::DiscreteMinus => x.jh() > g - HalfInt::ONE,
        Class3::Continuous => match half_of(x.j) {
            Some(j) => continuous_decomposable(g, j),
            None => true,
        },
    }
}

/// Predicate for `F_γ ⊗ C_j` with half-integral `j`.
pub fn continuous_decomposable(g: HalfInt, j: HalfInt) -> bool {
    j > g - HalfInt::ONE || j < -g
}

fn half_of(j: C64) -> Option<HalfInt> {
    if j.im != 0.0 {
        return None;
    }
    HalfInt::from_f64(j.re)
}

/// Shifts `ν` present in `F_γ ⊗ X` at all, with the raw coupled labels.
/// Summands of `F_γ ⊗ X` with continuous labels in the raw form `j + ν`
/// that the coefficient blocks use.
pub fn fx_couplings(g: HalfInt, x: &RepLabel3) -> Vec<RepLabel3> {
    (-g)
        .range_to(g)
        .filter_map(|nu| {
            let l = coupled_label(g, x, nu);
            match x.class {
                Class3::Finite => {
                    let jj = x.jh() + nu;
                    (jj >= (x.jh() - g).abs()).then_some(l)
                }
                _ => Some(l),
            }
        })
        .collect()
}

/// Label `X_{j+ν}` produced by `F_γ ⊗ X`; continuous labels keep the raw `j+ν`.
fn coupled_label(g: HalfInt, x: &RepLabel3, nu: HalfInt) -> RepLabel3 {
    match x.class {
        Class3::Continuous => RepLabel3 {
            class: Class3::Continuous,
            j: x.j + nu.f(),
            eps: varsigma(x.eps + g),
        },
        c => RepLabel3 { class: c, j: x.j + nu.f(), eps: HalfInt::ZERO },
    }
}

/// One weight block of a coupling.
#[derive(Clone, Debug)]
pub struct CgBlock {
    pub m: HalfInt,
    /// Product basis `(m1, m2)`, `m1` ascending.
    pub rows: Vec<(HalfInt, HalfInt)>,
    /// Coupled labels; continuous labels carry the raw `J` used in `Γ±(J,M)`.
    pub coupled: Vec<RepLabel3>,
    /// `A[(row, col)] = A(m1, m2 | J_col, M)`.
    pub a: CMat,
}

impl CgBlock {
    /// Inverse coefficients `B[(col, row)] = B(J_col, M | m1, m2)`.
    pub fn b(&self) -> CMat {
        self.a.transpose()
    }

    pub fn row_of(&self, m1: HalfInt) -> Option<usize> {
        self.rows.iter().position(|r| r.0 == m1)
    }

    pub fn col_of(&self, l: &RepLabel3) -> Option<usize> {
        self.coupled.iter().position(|c| same_label(c, l))
    }

    /// `A(m1, M-m1 | J, M)`, zero when either index is absent.
    pub fn get(&self, m1: HalfInt, l: &RepLabel3) -> C64 {
        match (self.row_of(m1), self.col_of(l)) {
            (Some(r), Some(c)) => self.a[(r, c)],
            _ => C64::new(0.0, 0.0),
        }
    }
}

/// `B(j+ν, M | γ, γ; j, M-γ)`: the entry whose sign fixes each coupled vector.
pub fn reference_entry(g: HalfInt, j: C64, nu: HalfInt, m: HalfInt) -> C64 {
    let (gf, nf, mf) = (g.f(), nu.f(), m.f());
    let gp = (g + nu).as_int();
    let gm = (g - nu).as_int();
    let mut v = csqrt(re(binom(g.twice(), gp)));
    for t in 0..gp {
        v *= csqrt(j + nf + mf - t as f64);
    }
    for t in 0..gm {
        v *= csqrt(j - mf + gf - t as f64);
    }
    // the factor sqrt(2j+2ν+1) cancels the t = γ+ν+1 denominator
    for t in (1..=g.twice() + 1).filter(|t| *t != gp + 1) {
        v /= csqrt(j * 2.0 + nf - gf + t as f64);
    }
    v
}

fn binom(n: i64, k: i64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Tridiagonal `Q` on the `M` block of `F_γ ⊗ X`, rows `μ` ascending.
pub fn fx_casimir_block(g: HalfInt, x: &RepLabel3, m: HalfInt) -> (Vec<HalfInt>, TridiagonalMatrix) {
    let mus: Vec<HalfInt> = (-g).range_to(g).filter(|mu| x.contains(m - *mu)).collect();
    let j = x.j;
    let gc = re(g.f());
    let d = mus.len();
    let diag = mus
        .iter()
        .map(|mu| -gc * (gc + 1.0) - j * (j + 1.0) - 2.0 * mu.f() * (m - *mu).f())
        .collect();
    let mut sup = Vec::with_capacity(d.saturating_sub(1));
    let mut sub = Vec::with_capacity(d.saturating_sub(1));
    for w in mus.windows(2) {
        let (mu, mm) = (w[0], m - w[0]);
        sup.push(gamma(gc, mu, 1) * gamma(j, mm, -1));
        sub.push(gamma(gc, mu + HalfInt::ONE, -1) * gamma(j, mm - HalfInt::ONE, 1));
    }
    (mus, TridiagonalMatrix::new(diag, sub, sup))
}

/// `ν` whose coupled module has weight `M`.
fn present_nus(g: HalfInt, x: &RepLabel3, m: HalfInt) -> Vec<HalfInt> {
    if !(m - g - x.parity()).is_integer() {
        return Vec::new();
    }
    (-g).range_to(g)
        .filter(|nu| match x.class {
            Class3::Finite => {
                let jj = x.jh() + *nu;
                jj >= (x.jh() - g).abs() && m.abs() <= jj && (m - jj).is_integer()
            }
            Class3::DiscretePlus => m >= x.jh() + *nu + HalfInt::ONE,
            Class3::DiscreteMinus => m <= -(x.jh() + *nu) - HalfInt::ONE,
            Class3::Continuous => true,
        })
        .collect()
}

/// Number of independent eigenvectors of `Q` on the `M` block of `F_γ ⊗ X`.
pub fn fx_eigenvector_count(g: HalfInt, x: &RepLabel3, m: HalfInt) -> (usize, usize) {
    let (_, t) = fx_casimir_block(g, x, m);
    let q = t.to_dense();
    let d = q.nrows();
    let scale = crate::numeric::one_norm(&q).max(1.0);
    let mut cands: Vec<C64> = Vec::new();
    for nu in (-g).range_to(g) {
        let jj = x.j + nu.f();
        let v = -jj * (jj + 1.0);
        if cands.iter().all(|c| (c - v).norm() > 1e-9 * scale) {
            cands.push(v);
        }
    }
    let count = cands
        .iter()
        .map(|v| nullity(&(&q - CMat::identity(d, d) * *v), 1e-8))
        .sum();
    (count, d)
}

/// Numerical decomposability test of `F_γ ⊗ X` on the block where it can fail.
pub fn detect_decomposable(g: HalfInt, x: &RepLabel3) -> bool {
    let m = match x.class {
        Class3::DiscretePlus => x.jh() + HalfInt::ONE + g,
        Class3::DiscreteMinus => -(x.jh() + HalfInt::ONE + g),
        Class3::Continuous => varsigma(x.eps + g),
        Class3::Finite => return true,
    };
    let (count, dim) = fx_eigenvector_count(g, x, m);
    count == dim
}

/// Lowest-weight vector `ψ_(μ)` of `F_γ ⊗ D⁺_j` as `((ν, m), coefficient)` terms.
pub fn lowest_weight_vector(g: HalfInt, j: HalfInt, mu: HalfInt) -> Vec<((HalfInt, HalfInt), C64)> {
    let jc = re(j.f());
    let gc = re(g.f());
    let mut out = Vec::new();
    let mut prod = re(1.0);
    for nu in (-g).range_to(mu) {
        if nu > -g {
            let s = nu - HalfInt::ONE;
            prod *= gamma(jc, j + mu - s, 1) / gamma(gc, s, 1);
        }
        let sign = (g + nu).parity_sign();
        out.push(((nu, j + HalfInt::ONE + mu - nu), prod * sign));
    }
    out
}

/// Memoised block builder shared by tables and Racah sums.
#[derive(Default)]
pub struct CgEngine {
    cache: RwLock<HashMap<(RepLabel3, RepLabel3, HalfInt), Arc<CgBlock>>>,
    chains: RwLock<HashMap<(HalfInt, RepLabel3, HalfInt), Chain>>,
}

/// Process-wide engine.
pub fn engine() -> &'static CgEngine {
    static E: OnceLock<CgEngine> = OnceLock::new();
    E.get_or_init(CgEngine::default)
}

impl CgEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn block(&self, l1: &RepLabel3, l2: &RepLabel3, m: HalfInt) -> Result<Arc<CgBlock>> {
        let key = (*l1, *l2, m);
        if let Some(b) = self.cache.read().unwrap().get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(self.build(l1, l2, m)?);
        self.cache.write().unwrap().entry(key).or_insert_with(|| b.clone());
        Ok(b)
    }

    /// `A(l1,m1; l2,m2 | J, m1+m2)`; zero when `J` does not occur.
    pub fn coefficient(&self, jl: &RepLabel3, l1: &RepLabel3, m1: HalfInt, l2: &RepLabel3, m2: HalfInt) -> Result<C64> {
        if !l1.contains(m1) || !l2.contains(m2) {
            return Ok(C64::new(0.0, 0.0));
        }
        let b = self.block(l1, l2, m1 + m2)?;
        Ok(b.get(m1, jl))
    }

    fn build(&self, l1: &RepLabel3, l2: &RepLabel3, m: HalfInt) -> Result<CgBlock> {
        use Class3::*;
        l1.validate()?;
        l2.validate()?;
        match (l1.class, l2.class) {
            (Finite, _) => self.fx_block(l1.jh(), l2, m),
            (_, Finite) => {
                let g = l2.jh();
                let b = self.block(l2, l1, m)?;
                let mut rows: Vec<_> = b.rows.iter().map(|&(mu, mm)| (mm, mu)).collect();
                rows.reverse();
                let n = rows.len();
                let mut a = CMat::zeros(n, b.coupled.len());
                for (c, jl) in b.coupled.iter().enumerate() {
                    let nu = HalfInt::from_f64((jl.j - l1.j).re).expect("half-integral shift");
                    let s = (nu - g).parity_sign();
                    for r in 0..n {
                        a[(r, c)] = b.a[(n - 1 - r, c)] * s;
                    }
                }
                Ok(CgBlock { m, rows, coupled: b.coupled.clone(), a })
            }
            (DiscretePlus, DiscretePlus) | (DiscreteMinus, DiscreteMinus) => dd_block(l1, l2, m),
            _ => Err(Error::UnsupportedCoupling(format!(
                "{l1} ⊗ {l2} contains a direct integral"
            ))),
        }
    }

    fn fx_block(&self, g: HalfInt, x: &RepLabel3, m: HalfInt) -> Result<CgBlock> {
        if !fx_decomposable(g, x) {
            return Err(Error::NotDecomposable(format!("F_{g} ⊗ {x}")));
        }
        let mus = fx_rows(g, x, m);
        let nus = present_nus(g, x, m);
        let d = mus.len();
        if d != nus.len() || d == 0 {
            return Err(Error::InvalidLabel(format!("weight {m} is not in F_{g} ⊗ {x}")));
        }
        let mut a = CMat::zeros(d, d);
        for (c, nu) in nus.iter().enumerate() {
            a.set_column(c, &self.chain_vector(g, x, *nu, m)?);
        }
        let rows = mus.iter().map(|mu| (*mu, m - *mu)).collect();
        let coupled = nus.iter().map(|nu| coupled_label(g, x, *nu)).collect();
        Ok(CgBlock { m, rows, coupled, a })
    }

    /// Coupled vector `|j+ν, M⟩` of `F_γ ⊗ X` in the product basis.
    fn chain_vector(&self, g: HalfInt, x: &RepLabel3, nu: HalfInt, m: HalfInt) -> Result<CVec> {
        let key = (g, *x, nu);
        if let Some(v) = self.chains.read().unwrap().get(&key).and_then(|c| c.get(m)) {
            return Ok(v);
        }
        let mut chains = self.chains.write().unwrap();
        if !chains.contains_key(&key) {
            chains.insert(key, Chain::seeded(g, x, nu)?);
        }
        let ch = chains.get_mut(&key).unwrap();
        ch.extend_to(g, x, nu, m)?;
        ch.get(m).ok_or_else(|| Error::InvalidLabel(format!("weight {m} outside the coupled module")))
    }
}

/// Vectors `|J,M⟩` for one coupled module, generated from a seed weight by
/// `J±|J,M⟩ = Γ±(J,M)|J,M±1⟩`. `up[k]` and `down[k]` sit at `seed ± k`.
#[derive(Clone, Debug)]
struct Chain {
    seed: HalfInt,
    up: Vec<CVec>,
    down: Vec<CVec>,
}

impl Chain {
    fn seeded(g: HalfInt, x: &RepLabel3, nu: HalfInt) -> Result<Self> {
        let jj = x.j + nu.f();
        let seed = match x.class {
            Class3::Finite => -(x.jh() + nu),
            Class3::DiscretePlus => x.jh() + nu + HalfInt::ONE,
            Class3::DiscreteMinus => -(x.jh() + nu) - HalfInt::ONE,
            Class3::Continuous => varsigma(x.eps + g),
        };
        let (_, t) = fx_casimir_block(g, x, seed);
        let q = -jj * (jj + 1.0);
        let mut v = refine_null_vector(&t, q, &tridiag_null_vector(&t, q)?);
        let n = csqrt(v.iter().map(|z| z * z).sum::<C64>());
        if n.norm() < 1e-300 {
            return Err(Error::ZeroNorm);
        }
        v /= n;
        let mut ch = Chain { seed, up: vec![v.clone()], down: vec![v] };
        // fix the overall sign at the first weight where the reference entry is usable
        let dir = if x.class == Class3::DiscreteMinus { -1 } else { 1 };
        for k in 0..=(4 * g.twice() + 4) {
            let m = seed + HalfInt::int(dir * k);
            if !present_nus(g, x, m).contains(&nu) {
                break;
            }
            ch.extend_to(g, x, nu, m)?;
            let mus = fx_rows(g, x, m);
            if mus.last() != Some(&g) {
                continue;
            }
            let r = reference_entry(g, x.j, nu, m);
            if r.is_finite() && r.norm() > 1e-9 {
                let v = ch.get(m).unwrap();
                if (v[mus.len() - 1] * r.conj()).re < 0.0 {
                    for w in ch.up.iter_mut().chain(ch.down.iter_mut()) {
                        *w = -w.clone();
                    }
                }
                break;
            }
        }
        Ok(ch)
    }

    fn get(&self, m: HalfInt) -> Option<CVec> {
        let k = (m - self.seed).as_int();
        if k >= 0 {
            self.up.get(k as usize).cloned()
        } else {
            self.down.get((-k) as usize).cloned()
        }
    }

    fn extend_to(&mut self, g: HalfInt, x: &RepLabel3, nu: HalfInt, m: HalfInt) -> Result<()> {
        let k = (m - self.seed).as_int();
        let jj = x.j + nu.f();
        while k > 0 && self.up.len() as i64 <= k {
            let at = self.seed + HalfInt::int(self.up.len() as i64 - 1);
            let v = ladder_step(g, x, jj, at, self.up.last().unwrap(), 1)?;
            self.up.push(v);
        }
        while k < 0 && self.down.len() as i64 <= -k {
            let at = self.seed - HalfInt::int(self.down.len() as i64 - 1);
            let v = ladder_step(g, x, jj, at, self.down.last().unwrap(), -1)?;
            self.down.push(v);
        }
        Ok(())
    }
}

fn fx_rows(g: HalfInt, x: &RepLabel3, m: HalfInt) -> Vec<HalfInt> {
    (-g).range_to(g).filter(|mu| x.contains(m - *mu)).collect()
}

/// `J^s v / Γ^s(J, M)` for `v` on the rows of block `M`, expressed on block `M + s`.
fn ladder_step(g: HalfInt, x: &RepLabel3, jj: C64, m: HalfInt, v: &CVec, s: i8) -> Result<CVec> {
    let step = HalfInt::int(s as i64);
    let from = fx_rows(g, x, m);
    let to = fx_rows(g, x, m + step);
    let gj = gamma(jj, m, s);
    if gj.norm() < 1e-12 {
        return Err(Error::InvalidLabel(format!("ladder leaves the coupled module at weight {m}")));
    }
    let gc = re(g.f());
    let mut w = CVec::zeros(to.len());
    for (r, &mu) in from.iter().enumerate() {
        let mm = m - mu;
        if let Some(k) = to.iter().position(|t| *t == mu + step) {
            w[k] += gamma(gc, mu, s) * v[r];
        }
        if let Some(k) = to.iter().position(|t| *t == mu) {
            w[k] += gamma(x.j, mm, s) * v[r];
        }
    }
    Ok(w / gj)
}

/// Same-sign discrete block from the real symmetric total Casimir.
fn dd_block(l1: &RepLabel3, l2: &RepLabel3, m: HalfInt) -> Result<CgBlock> {
    let (j1, j2) = (l1.jh(), l2.jh());
    let plus = l1.class == Class3::DiscretePlus;
    let (lo, hi) = if plus {
        (j1 + HalfInt::ONE, m - j2 - HalfInt::ONE)
    } else {
        (m + j2 + HalfInt::ONE, -j1 - HalfInt::ONE)
    };
    let m1s: Vec<HalfInt> = lo.range_to(hi).collect();
    let d = m1s.len();
    if d == 0 {
        return Err(Error::InvalidLabel(format!("weight {m} is not in {l1} ⊗ {l2}")));
    }
    let (c1, c2) = (l1.j, l2.j);
    let mut q = DMatrix::<f64>::zeros(d, d);
    for (a, m1) in m1s.iter().enumerate() {
        let m2 = m - *m1;
        q[(a, a)] = (-c1 * (c1 + 1.0) - c2 * (c2 + 1.0)).re - 2.0 * m1.f() * m2.f();
        if a + 1 < d {
            let off = gamma(c1, *m1, 1) * gamma(c2, m2, -1);
            q[(a, a + 1)] = off.re;
            q[(a + 1, a)] = off.re;
        }
    }
    let eig = q.symmetric_eigen();
    let base = j1 + j2 + HalfInt::ONE;
    let mut cols: BTreeMap<i64, CVec> = BTreeMap::new();
    for k in 0..d {
        let lam = eig.eigenvalues[k];
        // -J(J+1) = lam  =>  J = (-1 + sqrt(1 - 4 lam)) / 2
        let jj = (-1.0 + (1.0 - 4.0 * lam).sqrt()) / 2.0;
        let idx = (jj - base.f()).round() as i64;
        let mut v: CVec = eig.eigenvectors.column(k).map(re);
        let edge = if plus { v[0].re } else { v[d - 1].re };
        if edge < 0.0 {
            v = -v;
        }
        cols.insert(idx, v);
    }
    if cols.len() != d || cols.keys().next() != Some(&0) || cols.keys().last() != Some(&(d as i64 - 1)) {
        return Err(Error::NonConvergence);
    }
    let mut a = CMat::zeros(d, d);
    for (c, v) in cols.values().enumerate() {
        a.set_column(c, v);
    }
    let coupled = (0..d as i64)
        .map(|k| RepLabel3::with_class_j(l1.class, base + HalfInt::int(k)))
        .collect();
    let rows = m1s.iter().map(|m1| (*m1, m - *m1)).collect();
    Ok(CgBlock { m, rows, coupled, a })
}

/// Coefficients of one coupling over a range of total weights.
#[derive(Clone, Debug)]
pub struct CgTable {
    pub l1: RepLabel3,
    pub l2: RepLabel3,
    pub blocks: Vec<Arc<CgBlock>>,
}

impl CgTable {
    pub fn build(l1: &RepLabel3, l2: &RepLabel3, ms: impl IntoIterator<Item = HalfInt>) -> Result<Self> {
        let eng = engine();
        let blocks = ms.into_iter().map(|m| eng.block(l1, l2, m)).collect::<Result<_>>()?;
        Ok(Self { l1: *l1, l2: *l2, blocks })
    }

    pub fn block(&self, m: HalfInt) -> Option<&CgBlock> {
        self.blocks.iter().find(|b| b.m == m).map(|b| b.as_ref())
    }

    /// `A(m1, M-m1 | J, M)`, zero outside the table.
    pub fn get(&self, jl: &RepLabel3, m: HalfInt, m1: HalfInt) -> C64 {
        self.block(m).map(|b| b.get(m1, jl)).unwrap_or_default()
    }

    pub fn to_json_value(&self) -> TableJson {
        TableJson {
            coupling: [self.l1.to_string(), self.l2.to_string()],
            convention: "appB-rescaled",
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockJson {
                    m: b.m.to_string(),
                    rows: b.rows.iter().map(|(a, c)| [a.to_string(), c.to_string()]).collect(),
                    labels: b.coupled.iter().map(|l| l.to_string()).collect(),
                    a: mat_json(&b.a),
                    b: mat_json(&b.b()),
                })
                .collect(),
        }
    }

    /// CSV lines `M,m1,m2,J,re,im` of one block.
    pub fn block_csv(&self, m: HalfInt) -> Option<String> {
        let b = self.block(m)?;
        let mut s = String::from("M,m1,m2,J,re,im\n");
        for (r, (m1, m2)) in b.rows.iter().enumerate() {
            for (c, l) in b.coupled.iter().enumerate() {
                let v = b.a[(r, c)];
                s.push_str(&format!("{},{},{},{},{:.16e},{:.16e}\n", b.m, m1, m2, l, v.re, v.im));
            }
        }
        Some(s)
    }
}

#[derive(Serialize)]
pub struct TableJson {
    pub coupling: [String; 2],
    pub convention: &'static str,
    pub blocks: Vec<BlockJson>,
}

#[derive(Serialize)]
pub struct BlockJson {
    #[serde(rename = "M")]
    pub m: String,
    pub rows: Vec<[String; 2]>,
    pub labels: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<[f64; 2]>>,
}

fn mat_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

/// Windows need an interior block, at distance one from both edges.
fn check_window(blocks: i64) -> Result<()> {
    if blocks < 3 {
        return Err(Error::WindowTooSmall(format!("{blocks} weight blocks leave no interior")));
    }
    Ok(())
}

/// `F_γ ⊗ D±_j` over `w + 1` blocks starting at the extreme weight.
pub fn cg_finite_discrete(g: HalfInt, j: HalfInt, sign: i8, w: i64) -> Result<CgTable> {
    let x = RepLabel3::discrete(sign, j);
    if !fx_decomposable(g, &x) {
        return Err(Error::NotDecomposable(format!("F_{g} ⊗ {x}")));
    }
    check_window(w + 1)?;
    let edge = j - g + HalfInt::ONE;
    let ms: Vec<HalfInt> = (0..=w)
        .map(|k| {
            let m = edge + HalfInt::int(k);
            if sign >= 0 {
                m
            } else {
                -m
            }
        })
        .collect();
    CgTable::build(&RepLabel3::finite(g), &x, ms)
}

/// `F_γ ⊗ C^ε_j` over the `2w + 1` blocks nearest `M = 0`.
pub fn cg_finite_continuous(g: HalfInt, j: C64, eps: HalfInt, w: i64) -> Result<CgTable> {
    let x = RepLabel3::continuous(j, eps)?;
    if !fx_decomposable(g, &x) {
        return Err(Error::NotDecomposable(format!("F_{g} ⊗ {x}")));
    }
    check_window(2 * w + 1)?;
    let e = varsigma(eps + g);
    let ms = (-w..=w).map(|k| e + HalfInt::int(k));
    CgTable::build(&RepLabel3::finite(g), &x, ms)
}

/// `F_a ⊗ F_b`, all blocks.
pub fn cg_finite_finite(a: HalfInt, b: HalfInt) -> Result<CgTable> {
    let top = a + b;
    CgTable::build(&RepLabel3::finite(a), &RepLabel3::finite(b), (-top).range_to(top))
}

/// Same-sign `D±_j ⊗ D±_j'` over `w + 1` blocks from the extreme weight.
pub fn cg_discrete_discrete(j: HalfInt, jp: HalfInt, sign: i8, w: i64) -> Result<CgTable> {
    check_window(w + 1)?;
    let (l1, l2) = (RepLabel3::discrete(sign, j), RepLabel3::discrete(sign, jp));
    let edge = j + jp + HalfInt::int(2);
    let ms = (0..=w).map(|k| {
        let m = edge + HalfInt::int(k);
        if sign >= 0 {
            m
        } else {
            -m
        }
    });
    CgTable::build(&l1, &l2, ms)
}

/// Largest `|A^T A - 1|` and `|A A^T - 1|` entry over all blocks.
pub fn orthogonality_residual(t: &CgTable) -> f64 {
    t.blocks
        .iter()
        .map(|b| {
            let n = b.a.nrows();
            let ab = b.b() * &b.a - CMat::identity(n, n);
            let ba = &b.a * b.b() - CMat::identity(n, n);
            crate::numeric::max_abs(&ab).max(crate::numeric::max_abs(&ba))
        })
        .fold(0.0, f64::max)
}

/// Largest modulus of the ladder recursion over adjacent blocks of the table.
pub fn recursion_residual(t: &CgTable) -> f64 {
    let mut worst = 0.0f64;
    for b in &t.blocks {
        for s in [1i8, -1] {
            let step = HalfInt::int(s as i64);
            let Some(nb) = t.block(b.m + step) else { continue };
            for jl in &b.coupled {
                for &(m1, m2) in &nb.rows {
                    let lhs = gamma(jl.j, b.m, s) * nb.get(m1, jl);
                    let r1 = gamma(t.l1.j, m1 - step, s) * b.get(m1 - step, jl);
                    let r2 = if t.l2.contains(m2 - step) {
                        gamma(t.l2.j, m2 - step, s) * b.get(m1, jl)
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    let r1 = if t.l1.contains(m1 - step) { r1 } else { C64::new(0.0, 0.0) };
                    worst = worst.max((lhs - r1 - r2).norm());
                }
            }
        }
    }
    worst
}

/// Largest deviation of `B(J+1,M|γ,-γ;..)/B(J,M|γ,-γ;..) · √(J+M+1)/√(J-M+1)`
/// from its value at the first usable `M`, per `J`, relative to that value.
pub fn ratio_deviation(t: &CgTable) -> f64 {
    assert_eq!(t.l1.class, Class3::Finite, "ratio check needs F_γ first");
    let g = t.l1.jh();
    let mut alphas: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    let mut labels: Vec<RepLabel3> = Vec::new();
    for b in &t.blocks {
        for jl in &b.coupled {
            let next = RepLabel3 { j: jl.j + 1.0, ..*jl };
            if b.col_of(&next).is_none() {
                continue;
            }
            let den = b.get(-g, jl);
            let num = b.get(-g, &next);
            let m = b.m.f();
            let f = csqrt(jl.j - m + 1.0) / csqrt(jl.j + m + 1.0);
            if den.norm() < 1e-12 || f.norm() < 1e-12 {
                continue;
            }
            let idx = match labels.iter().position(|l| same_label(l, jl)) {
                Some(i) => i,
                None => {
                    labels.push(*jl);
                    labels.len() - 1
                }
            };
            alphas.entry(idx).or_default().push(num / den / f);
        }
    }
    alphas
        .values()
        .map(|v| v.iter().map(|a| (a - v[0]).norm() / v[0].norm().max(1e-300)).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Whether the ratio factor is `M`-independent across the table.
pub fn ratio_check_appb(t: &CgTable) -> bool {
    ratio_deviation(t) < 1e-9
}

/// Largest ladder-consistency defect `|J±|J,M⟩ − Γ±(J,M)|J,M±1⟩|` over the table.
pub fn ladder_residual(t: &CgTable) -> f64 {
    let mut worst = 0.0f64;
    for b in &t.blocks {
        for s in [1i8, -1] {
            let step = HalfInt::int(s as i64);
            let Some(nb) = t.block(b.m + step) else { continue };
            for (c, jl) in b.coupled.iter().enumerate() {
                let mut w: BTreeMap<HalfInt, C64> = BTreeMap::new();
                for (r, &(m1, m2)) in b.rows.iter().enumerate() {
                    let amp = b.a[(r, c)];
                    if t.l1.contains(m1 + step) {
                        *w.entry(m1 + step).or_default() += gamma(t.l1.j, m1, s) * amp;
                    }
                    if t.l2.contains(m2 + step) {
                        *w.entry(m1).or_default() += gamma(t.l2.j, m2, s) * amp;
                    }
                }
                let gj = gamma(jl.j, b.m, s);
                for &(m1, _) in &nb.rows {
                    let lhs = w.get(&m1).copied().unwrap_or_default();
                    worst = worst.max((lhs - gj * nb.get(m1, jl)).norm());
                }
            }
        }
    }
    worst
}

/// `Q` eigenvalue residual: `max |(Q − q_J) v_J|` over the table's columns.
pub fn casimir_residual(t: &CgTable) -> f64 {
    let mut worst = 0.0f64;
    for b in &t.blocks {
        let d = b.rows.len();
        let (c1, c2) = (t.l1.j, t.l2.j);
        for (c, jl) in b.coupled.iter().enumerate() {
            let q = -jl.j * (jl.j + 1.0);
            for r in 0..d {
                let (m1, m2) = b.rows[r];
                let mut acc = (-c1 * (c1 + 1.0) - c2 * (c2 + 1.0) - 2.0 * m1.f() * m2.f() - q) * b.a[(r, c)];
                if r + 1 < d {
                    acc += gamma(c1, m1, 1) * gamma(c2, m2, -1) * b.a[(r + 1, c)];
                }
                if r > 0 {
                    acc += gamma(c1, m1, -1) * gamma(c2, m2, 1) * b.a[(r - 1, c)];
                }
                worst = worst.max(acc.norm());
            }
        }
    }
    worst
}

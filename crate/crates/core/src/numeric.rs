//! Dense complex linear algebra: general eigenproblems, tridiagonal null
//! vectors, the canonical form of antisymmetric matrices and PSD square roots.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, DefaultHasher};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

/// Hash map with a fixed hasher, so iteration order (and the rounding of
/// sums taken in that order) is the same in every run.
pub type StableMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Default relative tolerance.
pub const TOL: f64 = 1e-10;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Principal square root, argument in (-pi, pi]. A negative real (with either
/// sign of zero imaginary part) maps to `+i sqrt(|x|)`.
pub fn csqrt(z: C64) -> C64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            return C64::new(z.re.sqrt(), 0.0);
        }
        return C64::new(0.0, (-z.re).sqrt());
    }
    z.sqrt()
}

pub fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Rotate `v` so that its largest-modulus component is positive real, and
/// scale it to unit Euclidean norm.
pub fn fix_phase(v: &mut CVec) {
    let n = v.norm();
    if n == 0.0 {
        return;
    }
    let mut k = 0;
    for i in 1..v.len() {
        if v[i].norm() > v[k].norm() * (1.0 + 1e-12) {
            k = i;
        }
    }
    let ph = v[k].conj() / v[k].norm();
    for z in v.iter_mut() {
        *z = *z * ph / n;
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: C64,
    pub vector: CVec,
}

/// Eigenvalues of a square complex matrix with one eigenvector per
/// independent direction. A defective eigenvalue yields only as many pairs as
/// its geometric multiplicity.
pub fn solve_eigen_general(m: &CMat) -> Result<Vec<EigenPair>> {
    solve_eigen_general_tol(m, 1e-8)
}

pub fn solve_eigen_general_tol(m: &CMat, null_tol: f64) -> Result<Vec<EigenPair>> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let scale = one_norm(m).max(1e-300);
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or(Error::NonConvergence)?;
    let (_, t) = schur.unpack();
    let mut vals: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    // clusters: a Jordan block of size k splits by roughly eps^(1/k)
    let ctol = 1e-5 * scale.max(1.0);
    let mut clusters: Vec<Vec<C64>> = vec![];
    for v in vals {
        match clusters
            .iter_mut()
            .find(|c| c.iter().any(|w| (*w - v).norm() < ctol))
        {
            Some(c) => c.push(v),
            None => clusters.push(vec![v]),
        }
    }
    let mut out = vec![];
    for c in clusters {
        let lam = c.iter().sum::<C64>() / c.len() as f64;
        let shifted = m - CMat::identity(n, n) * lam;
        for v in null_space(&shifted, null_tol * scale, c.len()) {
            out.push(EigenPair { value: lam, vector: v });
        }
    }
    Ok(out)
}

/// Orthonormal basis of the numerical null space (at most `cap` vectors).
pub fn null_space(a: &CMat, tol: f64, cap: usize) -> Vec<CVec> {
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap()
    });
    let mut out = vec![];
    // rank-deficient wide case: svd of an n x n matrix always has n values
    for &i in idx.iter().take(cap) {
        if svd.singular_values[i] <= tol {
            let mut v = CVec::from_iterator(n, vt.row(i).iter().map(|z| z.conj()));
            fix_phase(&mut v);
            out.push(v);
        }
    }
    out
}

/// Number of singular values below `tol` times the 1-norm.
pub fn nullity(a: &CMat, tol: f64) -> usize {
    let scale = one_norm(a).max(1e-300);
    a.clone()
        .singular_values()
        .iter()
        .filter(|s| **s <= tol * scale)
        .count()
}

/// Tridiagonal matrix with `sub[i] = T[i+1][i]` and `sup[i] = T[i][i+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalMatrix {
    pub diag: Vec<C64>,
    pub sub: Vec<C64>,
    pub sup: Vec<C64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<C64>, sub: Vec<C64>, sup: Vec<C64>) -> Self {
        assert!(sub.len() + 1 == diag.len().max(1) && sup.len() == sub.len());
        Self { diag, sub, sup }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.sub[i];
                m[(i, i + 1)] = self.sup[i];
            }
        }
        m
    }

    pub fn from_dense(m: &CMat) -> Self {
        let n = m.nrows();
        Self {
            diag: (0..n).map(|i| m[(i, i)]).collect(),
            sub: (0..n.saturating_sub(1)).map(|i| m[(i + 1, i)]).collect(),
            sup: (0..n.saturating_sub(1)).map(|i| m[(i, i + 1)]).collect(),
        }
    }

    fn scale(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.sub)
            .chain(&self.sup)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(1e-300)
    }
}

/// Null vector of `T - lambda` by forward substitution with `x[0] = 1`.
/// Requires every superdiagonal entry to be nonzero. The vector is returned
/// unnormalised.
pub fn tridiag_null_vector(t: &TridiagonalMatrix, lambda: C64) -> Result<CVec> {
    tridiag_null_vector_tol(t, lambda, 1e-8)
}

pub fn tridiag_null_vector_tol(t: &TridiagonalMatrix, lambda: C64, tol: f64) -> Result<CVec> {
    let n = t.dim();
    let mut x = CVec::zeros(n);
    if n == 0 {
        return Ok(x);
    }
    x[0] = C64::new(1.0, 0.0);
    for i in 0..n - 1 {
        let mut s = (t.diag[i] - lambda) * x[i];
        if i > 0 {
            s += t.sub[i - 1] * x[i - 1];
        }
        x[i + 1] = -s / t.sup[i];
    }
    let last = n - 1;
    let mut res = (t.diag[last] - lambda) * x[last];
    if last > 0 {
        res += t.sub[last - 1] * x[last - 1];
    }
    let xmax = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let residual = res.norm() / (xmax * (t.scale() + lambda.norm()));
    if residual > tol {
        return Err(Error::NotAnEigenvalue { residual });
    }
    Ok(x)
}

/// Two steps of inverse iteration on `T - lambda`, starting from `x`.
pub fn refine_null_vector(t: &TridiagonalMatrix, lambda: C64, x: &CVec) -> CVec {
    let n = t.dim();
    let shift = lambda + C64::new(1e-13 * (t.scale() + lambda.norm()), 0.0);
    let a = t.to_dense() - CMat::identity(n, n) * shift;
    let lu = a.lu();
    let mut v = x.clone();
    for _ in 0..2 {
        match lu.solve(&v) {
            Some(y) if y.iter().all(|z| z.is_finite()) => {
                let nrm = y.norm();
                if nrm == 0.0 {
                    break;
                }
                v = y / C64::new(nrm, 0.0);
            }
            _ => break,
        }
    }
    v
}

/// `X = U M U^T` with `M` the direct sum of `lambda_a [[0,-1],[1,0]]`
/// (padded with a zero when n is odd).
#[derive(Clone, Debug)]
pub struct AntisymCanonicalForm {
    pub u: CMat,
    pub lambdas: Vec<f64>,
}

impl AntisymCanonicalForm {
    pub fn m_matrix(&self) -> CMat {
        canonical_block_matrix(&self.lambdas, self.u.nrows())
    }

    pub fn reconstruct(&self) -> CMat {
        &self.u * self.m_matrix() * self.u.transpose()
    }

    pub fn rank(&self, tol: f64) -> usize {
        2 * self.lambdas.iter().filter(|l| **l > tol).count()
    }
}

pub fn canonical_block_matrix(lambdas: &[f64], n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    for (a, l) in lambdas.iter().enumerate() {
        m[(2 * a, 2 * a + 1)] = C64::new(-l, 0.0);
        m[(2 * a + 1, 2 * a)] = C64::new(*l, 0.0);
    }
    m
}

pub fn antisym_canonical(x: &CMat) -> Result<AntisymCanonicalForm> {
    if !x.is_square() {
        return Err(Error::NotSquare(x.nrows(), x.ncols()));
    }
    let n = x.nrows();
    let scale = max_abs(x).max(1.0);
    let skew = max_abs(&(x + x.transpose()));
    if skew > TOL * scale {
        return Err(Error::NotAntisymmetric(skew));
    }
    let h = x.adjoint() * x;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());

    // w-space holds conj of the columns of U
    let mut used: Vec<CVec> = vec![];
    let mut cols: Vec<CVec> = vec![];
    let mut lambdas = vec![];
    let cut = 1e-9 * scale;
    let project = |v: &CVec, used: &[CVec]| -> CVec {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in used {
                let p = u.dotc(&w);
                w -= u * p;
            }
        }
        w
    };
    for &k in &order {
        if lambdas.len() == n / 2 {
            break;
        }
        let l2 = eig.eigenvalues[k].max(0.0);
        if l2.sqrt() <= cut {
            break;
        }
        // search the eigenspace of l2 for a direction not yet used
        let mut best: Option<CVec> = None;
        for &k2 in &order {
            if (eig.eigenvalues[k2] - l2).abs() > 1e-7 * scale * scale {
                continue;
            }
            let w = project(&eig.eigenvectors.column(k2).into_owned(), &used);
            if w.norm() > 0.5 {
                best = Some(w);
                break;
            }
        }
        let Some(w) = best else { continue };
        let w = &w / C64::new(w.norm(), 0.0);
        // |X w| is accurate where sqrt of a tiny eigenvalue is not
        let xw = x * &w;
        let lam = xw.norm();
        if lam <= cut {
            break;
        }
        let u2 = xw / C64::new(lam, 0.0);
        let w2 = u2.map(|z| z.conj());
        cols.push(w.map(|z| z.conj()));
        cols.push(u2);
        used.push(w);
        used.push(w2);
        lambdas.push(lam);
    }
    // complete with the kernel
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut unit = CVec::zeros(n);
        unit[e] = C64::new(1.0, 0.0);
        let w = project(&unit, &used);
        if w.norm() > 1e-6 {
            let w = &w / C64::new(w.norm(), 0.0);
            cols.push(w.map(|z| z.conj()));
            used.push(w);
        }
    }
    while lambdas.len() < n / 2 {
        lambdas.push(0.0);
    }
    let u = CMat::from_columns(&cols);
    Ok(AntisymCanonicalForm { u, lambdas })
}

/// Positive semi-definite square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let scale = max_abs(m).max(1.0);
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut d = CMat::zeros(m.nrows(), m.nrows());
    for (i, l) in eig.eigenvalues.iter().enumerate() {
        if *l < -TOL * scale {
            return Err(Error::NotPsd(*l));
        }
        d[(i, i)] = C64::new(l.max(0.0).sqrt(), 0.0);
    }
    let v = &eig.eigenvectors;
    Ok(v * d * v.adjoint())
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

pub fn det(m: &CMat) -> C64 {
    m.clone().determinant()
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

fn ln_fact(n: i64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// SU(2) Clebsch–Gordan coefficient `⟨j1,m1; j2,m2 | j,m⟩` (Condon–Shortley
/// phases) by the Racah formula. Arguments are twice the spins.
pub fn su2_cg(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    if j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j + m) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i64| x / 2;
    let pre = 0.5
        * (((j + 1) as f64).ln()
            + ln_fact(h(j1 + j2 - j))
            + ln_fact(h(j1 - j2 + j))
            + ln_fact(h(-j1 + j2 + j))
            - ln_fact(h(j1 + j2 + j) + 1)
            + ln_fact(h(j1 + m1))
            + ln_fact(h(j1 - m1))
            + ln_fact(h(j2 + m2))
            + ln_fact(h(j2 - m2))
            + ln_fact(h(j + m))
            + ln_fact(h(j - m)));
    let kmin = 0.max(h(j2 - j - m1)).max(h(j1 + m2 - j));
    let kmax = h(j1 + j2 - j).min(h(j1 - m1)).min(h(j2 + m2));
    let mut s = 0.0;
    for k in kmin..=kmax {
        let d = ln_fact(k)
            + ln_fact(h(j1 + j2 - j) - k)
            + ln_fact(h(j1 - m1) - k)
            + ln_fact(h(j2 + m2) - k)
            + ln_fact(h(j - j2 + m1) + k)
            + ln_fact(h(j - j1 - m2) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * (pre - d).exp();
    }
    s
}

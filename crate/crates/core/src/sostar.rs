//! SO*(2n): group elements, the bounded domain `Ω_n`, coherent
//! intertwiners and their statistics, semiclassical normals and the
//! embedding into the Bogoliubov group.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{
    antisym_canonical, c64, canonical_block_matrix, conj, det, inverse, max_abs, psd_sqrt, re,
    AntisymCanonicalForm, CMat, C64,
};

/// Singular values below this count as zero when computing ranks.
pub const RANK_CUT: f64 = 1e-9;

fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

fn blocks(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let n = a.nrows();
    let mut m = CMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

fn block(m: &CMat, r: usize, c: usize) -> CMat {
    let n = m.nrows() / 2;
    m.view((r * n, c * n), (n, n)).into_owned()
}

fn inv(m: &CMat) -> Result<CMat> {
    inverse(m).ok_or_else(|| Error::OutsideDomain("singular matrix".into()))
}

/// `[[A, B], [-conj(B), conj(A)]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SOStarElement {
    pub a: CMat,
    pub b: CMat,
}

impl SOStarElement {
    pub fn identity(n: usize) -> Self {
        SOStarElement { a: eye(n), b: CMat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Element of the maximal compact subgroup, `diag(U, conj(U))`.
    pub fn compact(u: &CMat) -> Self {
        SOStarElement { a: u.clone(), b: CMat::zeros(u.nrows(), u.nrows()) }
    }

    pub fn matrix(&self) -> CMat {
        blocks(&self.a, &self.b, &(-conj(&self.b)), &conj(&self.a))
    }

    /// Reads `A`, `B` from a `2n × 2n` matrix, checking the block pattern.
    pub fn from_matrix(m: &CMat) -> Result<Self> {
        if !m.is_square() || m.nrows() % 2 == 1 {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        let (a, b) = (block(m, 0, 0), block(m, 0, 1));
        let scale = max_abs(m).max(1.0);
        let off = max_abs(&(block(m, 1, 0) + conj(&b))).max(max_abs(&(block(m, 1, 1) - conj(&a))));
        if off > 1e-10 * scale {
            return Err(Error::OutsideDomain(format!("block pattern violated by {off:e}")));
        }
        Ok(SOStarElement { a, b })
    }

    /// Largest violation of the four block conditions.
    pub fn membership_residual(&self) -> f64 {
        let (a, b) = (&self.a, &self.b);
        let n = self.n();
        [
            max_abs(&(a * a.adjoint() - b * b.adjoint() - eye(n))),
            max_abs(&(a.adjoint() * a - b.transpose() * conj(b) - eye(n))),
            max_abs(&(a.adjoint() * b + b.transpose() * conj(a))),
            max_abs(&(b * a.transpose() + a * b.transpose())),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn inverse(&self) -> Self {
        SOStarElement { a: self.a.adjoint(), b: self.b.transpose() }
    }

    pub fn compose(&self, other: &SOStarElement) -> Self {
        let m = self.matrix() * other.matrix();
        SOStarElement { a: block(&m, 0, 0), b: block(&m, 0, 1) }
    }

    /// Möbius action `(Aζ + B)(Cζ + D)⁻¹` on the bounded domain.
    pub fn act(&self, z: &DomainPoint) -> Result<DomainPoint> {
        let c = -conj(&self.b);
        let d = conj(&self.a);
        let w = (&self.a * &z.zeta + &self.b) * inv(&(c * &z.zeta + d))?;
        DomainPoint::new(w)
    }
}

/// Violation of `g* diag(1,-1) g = diag(1,-1)` and `gᵀ [[0,1],[1,0]] g =
/// [[0,1],[1,0]]` for an arbitrary `2n × 2n` matrix.
pub fn group_residual(m: &CMat) -> f64 {
    let n = m.nrows() / 2;
    let z = CMat::zeros(n, n);
    let eta = blocks(&eye(n), &z, &z, &(-eye(n)));
    let j = blocks(&z, &eye(n), &eye(n), &z);
    max_abs(&(m.adjoint() * &eta * m - &eta)).max(max_abs(&(m.transpose() * &j * m - &j)))
}

/// A point of `Ω_n`: `ζᵀ = -ζ` and `ζ*ζ < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainPoint {
    pub zeta: CMat,
}

impl DomainPoint {
    pub fn new(zeta: CMat) -> Result<Self> {
        if !zeta.is_square() {
            return Err(Error::NotSquare(zeta.nrows(), zeta.ncols()));
        }
        let skew = max_abs(&(&zeta + zeta.transpose()));
        if skew > 1e-10 * max_abs(&zeta).max(1.0) {
            return Err(Error::NotAntisymmetric(skew));
        }
        let top = Self::top_eigenvalue(&zeta);
        if top >= 1.0 {
            return Err(Error::OutsideDomain(format!("largest eigenvalue of ζ*ζ is {top}")));
        }
        Ok(DomainPoint { zeta })
    }

    fn top_eigenvalue(zeta: &CMat) -> f64 {
        if zeta.nrows() == 0 {
            return 0.0;
        }
        let h = zeta.adjoint() * zeta;
        let h = (&h + h.adjoint()) * re(0.5);
        h.symmetric_eigen().eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    pub fn origin(n: usize) -> Self {
        DomainPoint { zeta: CMat::zeros(n, n) }
    }

    /// `ζ = U M Uᵀ` with `M` built from the given singular values.
    pub fn from_canonical(u: &CMat, lambdas: &[f64]) -> Result<Self> {
        let m = canonical_block_matrix(lambdas, u.nrows());
        Self::new(u * m * u.transpose())
    }

    /// Random point with singular values uniform in `(0, radius]`.
    pub fn random<R: Rng>(n: usize, radius: f64, rng: &mut R) -> Result<Self> {
        let lambdas: Vec<f64> = (0..n / 2).map(|_| radius * (1.0 - rng.random::<f64>())).collect();
        Self::from_canonical(&random_unitary(n, rng), &lambdas)
    }

    /// Random rank-2 point with `tr(ζ*ζ) = trace`.
    pub fn random_rank2<R: Rng>(n: usize, trace: f64, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::NotRank2(0));
        }
        Self::from_canonical(&random_unitary(n, rng), &[(trace / 2.0).sqrt()])
    }

    pub fn n(&self) -> usize {
        self.zeta.nrows()
    }

    pub fn zeta_star_zeta(&self) -> CMat {
        self.zeta.adjoint() * &self.zeta
    }

    /// `σ = (1 - ζ*ζ)⁻¹`.
    pub fn sigma(&self) -> CMat {
        inverse(&(eye(self.n()) - self.zeta_star_zeta())).expect("inside the domain")
    }

    pub fn canonical(&self) -> Result<AntisymCanonicalForm> {
        antisym_canonical(&self.zeta)
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.canonical()?.rank(RANK_CUT))
    }

    /// `det(1 - ζ*ζ)^{½}`, the normalisation of `|ζ⟩`.
    pub fn normalisation(&self) -> f64 {
        det(&(eye(self.n()) - self.zeta_star_zeta())).re.sqrt()
    }
}

/// Haar-ish random unitary from the QR decomposition of a complex Gaussian
/// matrix, with the phases of `R` removed.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let mut g = || rng.sample::<f64, _>(StandardNormal);
    let m = CMat::from_fn(n, n, |_, _| c64(g(), g()));
    let qr = m.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { re(1.0) };
        for i in 0..n {
            q[(i, k)] *= ph;
        }
    }
    q
}

/// `g_ζ = [[X, ζ conj(X)], [ζ* X, conj(X)]]`, `X = ((1 - ζζ*)⁻¹)^{½}`.
pub fn g_zeta(z: &DomainPoint) -> Result<SOStarElement> {
    let n = z.n();
    let x = psd_sqrt(&inv(&(eye(n) - &z.zeta * z.zeta.adjoint()))?)?;
    Ok(SOStarElement { b: &z.zeta * conj(&x), a: x })
}

/// `g = [[1, α], [0, 1]] · diag(e^L, e^{-Lᵀ}) · [[1, 0], [-conj(β), 1]]`
/// with `α = B conj(A)⁻¹`, `e^L = (A*)⁻¹`, `β = A⁻¹B`.
#[derive(Clone, Debug)]
pub struct UdlFactors {
    pub alpha: CMat,
    pub e_l: CMat,
    pub beta: CMat,
}

impl UdlFactors {
    pub fn upper(&self) -> CMat {
        let n = self.alpha.nrows();
        blocks(&eye(n), &self.alpha, &CMat::zeros(n, n), &eye(n))
    }

    pub fn middle(&self) -> CMat {
        let n = self.alpha.nrows();
        let lower_right = inv(&self.e_l).expect("invertible").transpose();
        blocks(&self.e_l, &CMat::zeros(n, n), &CMat::zeros(n, n), &lower_right)
    }

    pub fn lower(&self) -> CMat {
        let n = self.alpha.nrows();
        blocks(&eye(n), &CMat::zeros(n, n), &(-conj(&self.beta)), &eye(n))
    }

    pub fn reconstruct(&self) -> CMat {
        self.upper() * self.middle() * self.lower()
    }

    /// `det(e^L)`: the eigenvalue of `exp(E_L)` on the vacuum.
    pub fn vacuum_factor(&self) -> C64 {
        det(&self.e_l)
    }
}

pub fn udl_decompose(g: &SOStarElement) -> Result<UdlFactors> {
    let a_inv = inv(&g.a)?;
    Ok(UdlFactors {
        alpha: &g.b * conj(&a_inv),
        e_l: inv(&g.a.adjoint())?,
        beta: a_inv * &g.b,
    })
}

/// `⟨ω|ζ⟩ = det(1-ζ*ζ)^{½} det(1-ω*ω)^{½} / det(1-ω*ζ)`.
pub fn inner_product(w: &DomainPoint, z: &DomainPoint) -> C64 {
    let n = z.n();
    re(z.normalisation() * w.normalisation()) / det(&(eye(n) - w.zeta.adjoint() * &z.zeta))
}

/// Ratios `⟨ω|X_ab|ζ⟩ / ⟨ω|ζ⟩` for `X = E, F, F̃`.
#[derive(Clone, Debug)]
pub struct CoherentElements {
    pub e: CMat,
    pub f: CMat,
    pub ft: CMat,
}

pub fn generator_matrix_elements(w: &DomainPoint, z: &DomainPoint) -> Result<CoherentElements> {
    let n = z.n();
    let r = inv(&(eye(n) - w.zeta.adjoint() * &z.zeta))?;
    Ok(CoherentElements {
        e: eye(n) + w.zeta.adjoint() * &z.zeta * &r * re(2.0),
        f: &z.zeta * &r * re(2.0),
        ft: &r * conj(&w.zeta) * re(2.0),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaStatistics {
    pub means: Vec<f64>,
    pub total_mean: f64,
    pub variances: Vec<f64>,
    pub total_variance: f64,
    pub coefficient_of_variation: f64,
    /// `(tr σ / (tr σ - n))^{½}`.
    pub cv_bound: f64,
}

pub fn area_statistics(z: &DomainPoint) -> AreaStatistics {
    let n = z.n();
    let sigma = z.sigma();
    let x = z.zeta_star_zeta() * &sigma;
    let means: Vec<f64> = (0..n).map(|a| x[(a, a)].re).collect();
    let total_mean: f64 = means.iter().sum();
    let variances = means.iter().map(|m| 0.5 * m * (m + 1.0)).collect();
    let mut total_variance = 0.0;
    for a in 0..n {
        for b in 0..n {
            let d = if a == b { 1.0 } else { 0.0 };
            total_variance += (x[(a, b)] * (x[(b, a)] + d)).re;
        }
    }
    let tr = sigma.trace().re;
    AreaStatistics {
        means,
        total_mean,
        variances,
        total_variance,
        coefficient_of_variation: if total_mean > 0.0 {
            total_variance.sqrt() / total_mean
        } else {
            f64::INFINITY
        },
        cv_bound: (tr / (tr - n as f64)).sqrt(),
    }
}

/// Full covariance matrix `Cov(𝒜_a, 𝒜_b)`.
pub fn area_covariance(z: &DomainPoint) -> CMat {
    let n = z.n();
    let s = z.sigma();
    let sz = &s * z.zeta.adjoint();
    let zs = &z.zeta * &s;
    CMat::from_fn(n, n, |a, b| {
        let d = if a == b { s[(a, b)] } else { re(0.0) };
        (s[(a, b)] * s[(b, a)] + sz[(a, b)] * zs[(b, a)] - d) * 0.5
    })
}

/// `det(1-ζ*ζ) (½ tr ζ*ζ)^J (J+1)`.
pub fn rank2_probability(trace: f64, j: usize) -> f64 {
    let x = 0.5 * trace;
    (1.0 - x) * (1.0 - x) * x.powi(j as i32) * (j + 1) as f64
}

/// Total-area distribution `P(0..=j_max)` for a rank-2 point.
pub fn rank2_distribution(z: &DomainPoint, j_max: usize) -> Result<Vec<f64>> {
    let rank = z.rank()?;
    if rank != 2 {
        return Err(Error::NotRank2(rank));
    }
    let d = det(&(eye(z.n()) - z.zeta_star_zeta())).re;
    let x = 0.5 * z.zeta_star_zeta().trace().re;
    Ok((0..=j_max).map(|j| d * x.powi(j as i32) * (j + 1) as f64).collect())
}

/// Distribution for any rank-2 point with `tr(ζ*ζ) = trace`.
pub fn rank2_distribution_for_trace(trace: f64, j_max: usize) -> Result<Vec<f64>> {
    if !(0.0..2.0).contains(&trace) {
        return Err(Error::OutsideDomain(format!("tr(ζ*ζ) = {trace} not in [0, 2)")));
    }
    Ok((0..=j_max).map(|j| rank2_probability(trace, j)).collect())
}

/// Mean and variance of a distribution given as `P(0), P(1), …`.
pub fn distribution_moments(p: &[f64]) -> (f64, f64) {
    let m1: f64 = p.iter().enumerate().map(|(j, q)| j as f64 * q).sum();
    let m2: f64 = p.iter().enumerate().map(|(j, q)| (j * j) as f64 * q).sum();
    (m1, m2 - m1 * m1)
}

/// Spinors `|z^α_a⟩` and the normals `V⃗^(a) = Σ_α ½⟨z^α_a|σ⃗|z^α_a⟩`.
#[derive(Clone, Debug)]
pub struct Semiclassical {
    pub lambdas: Vec<f64>,
    /// `spinors[α][a] = (x^α_a, y^α_a)`.
    pub spinors: Vec<Vec<[C64; 2]>>,
    pub normals: Vec<[f64; 3]>,
}

impl Semiclassical {
    pub fn n(&self) -> usize {
        self.normals.len()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.normals.iter().map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()).collect()
    }

    pub fn closure(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for v in &self.normals {
            for k in 0..3 {
                s[k] += v[k];
            }
        }
        s
    }

    /// `e_ab = Σ_α ⟨z^α_a|z^α_b⟩`.
    pub fn e(&self) -> CMat {
        let n = self.n();
        CMat::from_fn(n, n, |a, b| {
            self.spinors
                .iter()
                .map(|z| z[a][0].conj() * z[b][0] + z[a][1].conj() * z[b][1])
                .sum()
        })
    }

    /// `Σ_α λ_α⁻¹ [z^α_a|z^α_b⟩`, the expectation of `F_ab`.
    pub fn f(&self) -> CMat {
        let n = self.n();
        CMat::from_fn(n, n, |a, b| {
            self.spinors
                .iter()
                .zip(&self.lambdas)
                .map(|(z, l)| (z[a][1] * z[b][0] - z[a][0] * z[b][1]) / *l)
                .sum()
        })
    }

    /// Expectation of `F̃_ab = F_ab†`, the complex conjugate of [`Self::f`].
    pub fn ft(&self) -> CMat {
        conj(&self.f())
    }

    /// `¼ e_aa²`, equal to `|V⃗^(a)|²` in rank 2.
    pub fn quarter_e_sq(&self) -> Vec<f64> {
        let e = self.e();
        (0..self.n()).map(|a| 0.25 * e[(a, a)].re * e[(a, a)].re).collect()
    }
}

pub fn semiclassical_normals(z: &DomainPoint) -> Result<Semiclassical> {
    let n = z.n();
    let canon = z.canonical()?;
    let mut lambdas = vec![];
    let mut spinors = vec![];
    for (al, &l) in canon.lambdas.iter().enumerate() {
        if l <= RANK_CUT {
            continue;
        }
        let s = (2.0 * l * l / (1.0 - l * l)).sqrt();
        spinors.push(
            (0..n)
                .map(|a| [canon.u[(a, 2 * al)] * s, canon.u[(a, 2 * al + 1)] * s])
                .collect::<Vec<_>>(),
        );
        lambdas.push(l);
    }
    let normals = (0..n)
        .map(|a| {
            let mut v = [0.0; 3];
            for sp in &spinors {
                let [x, y] = sp[a];
                v[0] += (x.conj() * y).re;
                v[1] += (x.conj() * y).im;
                v[2] += 0.5 * (x.norm_sqr() - y.norm_sqr());
            }
            v
        })
        .collect();
    Ok(Semiclassical { lambdas, spinors, normals })
}

/// `[[U, V], [conj(V), conj(U)]]` acting on `(A, B, A†, B†)`.
#[derive(Clone, Debug)]
pub struct Bogoliubov {
    pub u: CMat,
    pub v: CMat,
}

impl Bogoliubov {
    pub fn matrix(&self) -> CMat {
        blocks(&self.u, &self.v, &conj(&self.v), &conj(&self.u))
    }

    /// Violation of `UU† - VV† = 1` and `UVᵀ = VUᵀ`.
    pub fn residual(&self) -> f64 {
        let n = self.u.nrows();
        max_abs(&(&self.u * self.u.adjoint() - &self.v * self.v.adjoint() - eye(n)))
            .max(max_abs(&(&self.u * self.v.transpose() - &self.v * self.u.transpose())))
    }

    /// Squeezed-vacuum matrix `S = -U⁻¹V`.
    pub fn squeeze(&self) -> Result<CMat> {
        Ok(-inv(&self.u)? * &self.v)
    }
}

/// `[[X, Y], [-conj(Y), conj(X)]] ↦ U = diag(X, X)`, `V = [[0, -Y], [Y, 0]]`.
pub fn bogoliubov_embed(g: &SOStarElement) -> Bogoliubov {
    let n = g.n();
    let z = CMat::zeros(n, n);
    Bogoliubov {
        u: blocks(&g.a, &z, &z, &g.a),
        v: blocks(&z, &(-&g.b), &g.b, &z),
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Weyl dimension of the U(n) irrep with highest weight `lambda`.
pub fn u_n_dimension(lambda: &[i64]) -> u64 {
    let n = lambda.len();
    let (mut num, mut den) = (1i128, 1i128);
    for a in 0..n {
        for b in a + 1..n {
            num *= (lambda[a] - lambda[b] + (b - a) as i64) as i128;
            den *= (b - a) as i128;
        }
    }
    (num / den) as u64
}

/// Hook-content formula `Π (n + c(□)) / h(□)` over the Young diagram of
/// `lambda` (shifted so its last row is empty).
pub fn hook_length_dimension(lambda: &[i64]) -> u64 {
    let n = lambda.len() as i64;
    let Some(&shift) = lambda.iter().min() else { return 1 };
    let rows: Vec<i64> = lambda.iter().map(|l| l - shift).collect();
    let (mut num, mut den) = (1u128, 1u128);
    for (i, &len) in rows.iter().enumerate() {
        for col in 0..len {
            let arm = len - col - 1;
            let leg = rows[i + 1..].iter().filter(|&&r| r > col).count() as i64;
            num *= (n + col - i as i64) as u128;
            den *= (arm + leg + 1) as u128;
        }
    }
    (num / den) as u64
}

/// `dim H^J_n = C(J+n-1, J) C(J+n-2, J) / (J+1)`.
pub fn intertwiner_dimension(n: usize, j: usize) -> u64 {
    if n < 2 {
        return u64::from(j == 0);
    }
    let (n, j) = (n as u64, j as u64);
    binomial(j + n - 1, j) * binomial(j + n - 2, j) / (j + 1)
}

/// Highest weight `[J+1, J+1, 1, …, 1]` of `H^J_n`.
pub fn intertwiner_highest_weight(n: usize, j: usize) -> Vec<i64> {
    (0..n).map(|a| if a < 2 { j as i64 + 1 } else { 1 }).collect()
}

use anyhow::Context;
use clap::{Args, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use spinnet::cg::{
    cg_discrete_discrete, cg_finite_continuous, cg_finite_discrete, cg_finite_finite,
    orthogonality_residual, recursion_residual, CgTable,
};
use spinnet::fock::{oracle_moments, FramedOracle};
use spinnet::lqg::{annihilation_report, Bracket, HamiltonianVariant, TetNetwork};
use spinnet::racah::{admissible, pentagon_residual, r6, RacahKey};
use spinnet::sostar::{area_statistics, distribution_moments, rank2_distribution_for_trace, DomainPoint};
use spinnet::spin21::Class3;
use spinnet::spin31::{casimir_block_on_vj, cg4_chain, BlockReport, Rep4Label};
use spinnet::verify::{self, random_finite_pentagons, random_mixed_pentagons, VerifyConfig, CRITERIA};
use spinnet::{CMat, HalfInt, C64};

use crate::parse::{self, bad};
use crate::{Format, Global, Outcome};

fn json_out<T: Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_out(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn e(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn cplx(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn format_or(g: &Global, d: Format) -> Format {
    g.format.unwrap_or(d)
}

// cg

#[derive(Args, Debug)]
pub struct CgArgs {
    /// Spin of the left factor.
    #[arg(long)]
    gamma: String,
    /// Class of the left factor: F, or D+/D- for a discrete pair.
    #[arg(long, default_value = "F")]
    left: String,
    /// Class of the right factor: F, D+, D- or C.
    #[arg(long)]
    class: String,
    /// Label of the right factor; complex for the continuous class.
    #[arg(long, allow_hyphen_values = true)]
    j: String,
    /// Parity of the continuous class, 0 or 1/2.
    #[arg(long, default_value = "0")]
    eps: String,
    /// Number of weight blocks for infinite-dimensional factors.
    #[arg(long, default_value_t = 40)]
    window: i64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn build_cg(a: &CgArgs) -> anyhow::Result<CgTable> {
    let g = parse::half(&a.gamma)?;
    if g.0 < 0 {
        return Err(bad("gamma must be non-negative"));
    }
    if a.window < 1 {
        return Err(bad("window must be positive"));
    }
    let left = parse::class(&a.left)?;
    let right = parse::class(&a.class)?;
    let t = match (left, right) {
        (Class3::Finite, Class3::Continuous) => {
            cg_finite_continuous(g, parse::complex(&a.j)?, parse::half(&a.eps)?, a.window)?
        }
        (Class3::Finite, c) => {
            let x = parse::label_with_class(c, &a.j, HalfInt::ZERO)?;
            match c {
                Class3::Finite => cg_finite_finite(g, x.jh())?,
                Class3::DiscretePlus => cg_finite_discrete(g, x.jh(), 1, a.window)?,
                _ => cg_finite_discrete(g, x.jh(), -1, a.window)?,
            }
        }
        (l @ (Class3::DiscretePlus | Class3::DiscreteMinus), r) if l == r => {
            let x = parse::label_with_class(r, &a.j, HalfInt::ZERO)?;
            let sign = if l == Class3::DiscretePlus { 1 } else { -1 };
            cg_discrete_discrete(g, x.jh(), sign, a.window)?
        }
        (l, r) => return Err(bad(format!("no coupling {} with {}", l.tag(), r.tag()))),
    };
    Ok(t)
}

pub fn cg(a: &CgArgs, g: &Global) -> anyhow::Result<Outcome> {
    let t = build_cg(a)?;
    let orth = orthogonality_residual(&t);
    let rec = recursion_residual(&t);
    let passed = orth <= a.tol && rec <= a.tol;
    let output = match format_or(g, Format::Csv) {
        Format::Csv => {
            let mut rows = vec![];
            for b in &t.blocks {
                for (r, (m1, m2)) in b.rows.iter().enumerate() {
                    for (c, l) in b.coupled.iter().enumerate() {
                        let v = b.a[(r, c)];
                        rows.push(vec![b.m.to_string(), m1.to_string(), m2.to_string(), l.to_string(), e(v.re), e(v.im)]);
                    }
                }
            }
            csv_out(&["M", "m1", "m2", "J", "re", "im"], rows)?
        }
        Format::Json => json_out(&json!({
            "table": t.to_json_value(),
            "orthogonality_residual": orth,
            "recursion_residual": rec,
            "tolerance": a.tol,
            "passed": passed,
        }))?,
    };
    Ok(Outcome { output, passed })
}

// racah

#[derive(Args, Debug)]
pub struct RacahArgs {
    /// Six labels `j1,j2,j12,j3,j,j23`, each bare or as `F:`, `D+:`, `D-:`, `C0:`, `C1/2:`.
    #[arg(long, allow_hyphen_values = true)]
    labels: String,
    /// Class of bare labels.
    #[arg(long, default_value = "F")]
    class: String,
}

pub fn racah(a: &RacahArgs, g: &Global) -> anyhow::Result<Outcome> {
    let c = parse::class(&a.class)?;
    let l = parse::list(&a.labels, |s| parse::label(s, c))?;
    let [j1, j2, j12, j3, j, j23] = l[..] else {
        return Err(bad(format!("expected 6 labels, got {}", l.len())));
    };
    let key = RacahKey::new(j1, j2, j12, j3, j, j23);
    if !key.couplings().iter().all(|(x, y, z)| admissible(x, y, z)) {
        return Err(bad("labels are not admissible"));
    }
    let v = r6(j1, j2, j12, j3, j, j23)?;
    let names: Vec<String> = l.iter().map(|x| x.to_string()).collect();
    let output = match format_or(g, Format::Json) {
        Format::Json => json_out(&json!({ "labels": names, "value": cplx(v) }))?,
        Format::Csv => {
            let mut row = names;
            row.extend([e(v.re), e(v.im)]);
            csv_out(&["j1", "j2", "j12", "j3", "j", "j23", "re", "im"], [row])?
        }
    };
    Ok(Outcome { output, passed: v.re.is_finite() && v.im.is_finite() })
}

// pentagon

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Every label finite.
    Finite,
    /// `j2 = F_1/2`, every other label in D+.
    Mixed,
}

#[derive(Args, Debug)]
pub struct PentagonArgs {
    #[arg(long, value_enum, default_value = "finite")]
    regime: Regime,
    /// Number of configurations; 50 finite, 20 mixed by default.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Defaults to 1e-11 finite, 1e-9 mixed.
    #[arg(long)]
    tol: Option<f64>,
}

pub fn pentagon(a: &PentagonArgs, g: &Global) -> anyhow::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (configs, tol) = match a.regime {
        Regime::Finite => (random_finite_pentagons(a.trials.unwrap_or(50), &mut rng), 1e-11),
        Regime::Mixed => (random_mixed_pentagons(a.trials.unwrap_or(20), &mut rng), 1e-9),
    };
    let tol = a.tol.unwrap_or(tol);
    let mut residuals = vec![];
    for p in &configs {
        let r: Vec<f64> = (1..=5).map(|v| pentagon_residual(p, v)).collect::<Result<_, _>>()?;
        residuals.push(r);
    }
    let max = residuals.iter().flatten().fold(0.0f64, |m, &x| if x.is_nan() { f64::INFINITY } else { m.max(x) });
    let passed = max <= tol;
    eprintln!("max residual {max:.3e} over {} configurations (tol {tol:.0e})", configs.len());
    let output = match format_or(g, Format::Json) {
        Format::Json => json_out(&json!({
            "regime": a.regime,
            "trials": configs.len(),
            "seed": a.seed,
            "tolerance": tol,
            "max_residual": max,
            "passed": passed,
            "configurations": configs,
            "residuals": residuals,
        }))?,
        Format::Csv => csv_out(
            &["trial", "variant", "residual"],
            residuals.iter().enumerate().flat_map(|(t, r)| {
                r.iter().enumerate().map(move |(v, x)| vec![t.to_string(), (v + 1).to_string(), e(*x)])
            }),
        )?,
    };
    Ok(Outcome { output, passed })
}

// hamiltonian

#[derive(Args, Debug)]
pub struct HamiltonianArgs {
    /// Six edge labels `j1..j6`, bare or prefixed as for `racah`.
    #[arg(long, allow_hyphen_values = true)]
    labels: String,
    #[arg(long, default_value = "F")]
    class: String,
    /// angle, square, angle-square (angle-bracket), square-angle, or all.
    #[arg(long, default_value = "all")]
    variant: String,
    /// Cycle of edges such as `3,4,2`; all clockwise cycles when omitted.
    #[arg(long)]
    cycle: Option<String>,
    /// Defaults to 1e-10 when every label is finite, 1e-8 otherwise.
    #[arg(long)]
    tol: Option<f64>,
}

fn brackets(s: &str) -> anyhow::Result<Vec<Bracket>> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "all" => Bracket::ALL.to_vec(),
        "angle" => vec![Bracket::Angle],
        "square" => vec![Bracket::Square],
        "angle-square" | "angle-bracket" => vec![Bracket::AngleSquare],
        "square-angle" | "square-bracket" => vec![Bracket::SquareAngle],
        other => vec![Bracket::parse(other).ok_or_else(|| bad(format!("unknown variant `{s}`")))?],
    })
}

pub fn hamiltonian(a: &HamiltonianArgs, g: &Global) -> anyhow::Result<Outcome> {
    let c = parse::class(&a.class)?;
    let l = parse::list(&a.labels, |s| parse::label(s, c))?;
    let labels: [_; 6] = l.try_into().map_err(|l: Vec<_>| bad(format!("expected 6 labels, got {}", l.len())))?;
    let net = TetNetwork::new(labels);
    if !net.is_admissible() {
        return Err(bad("network labels are not admissible"));
    }
    let cycles: Vec<[u8; 3]> = match &a.cycle {
        Some(s) => {
            let v = parse::list(s, |x| x.parse::<u8>().map_err(|_| bad(format!("bad edge `{x}`"))))?;
            vec![v.try_into().map_err(|_| bad("a cycle has three edges"))?]
        }
        None => HamiltonianVariant::CYCLES.to_vec(),
    };
    let mut reports = vec![];
    for b in brackets(&a.variant)? {
        for &cy in &cycles {
            reports.push(annihilation_report(HamiltonianVariant::new(b, cy)?, &net)?);
        }
    }
    let all_finite = labels.iter().all(|x| x.class == Class3::Finite);
    let tol = a.tol.unwrap_or(if all_finite { 1e-10 } else { 1e-8 });
    let passed = reports.iter().all(|r| r.residual <= tol && r.mismatched == 0.0);
    let output = match format_or(g, Format::Json) {
        Format::Json => json_out(&json!({ "tolerance": tol, "passed": passed, "reports": reports }))?,
        Format::Csv => csv_out(
            &["variant", "residual", "max_term", "terms", "mismatched", "racah_calls"],
            reports.iter().map(|r| {
                vec![
                    r.variant.clone(),
                    e(r.residual),
                    e(r.max_term),
                    r.terms.to_string(),
                    e(r.mismatched),
                    r.racah_calls.to_string(),
                ]
            }),
        )?,
    };
    Ok(Outcome { output, passed })
}

// spin31

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Ratio chain where available, eigen-solve below it.
    Auto,
    Chain,
    Eigen,
}

#[derive(Args, Debug)]
pub struct Spin31Args {
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long, allow_hyphen_values = true)]
    rho: String,
    #[arg(long, default_value = "1/2")]
    gamma: String,
    /// Sign A of the finite factor.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    a: i8,
    /// Total SU(2) spin J.
    #[arg(long)]
    j: String,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
}

pub fn spin31(a: &Spin31Args, g: &Global) -> anyhow::Result<Outcome> {
    if a.a.abs() != 1 {
        return Err(bad("a must be 1 or -1"));
    }
    let label = Rep4Label::new(parse::half(&a.lambda)?, parse::complex(&a.rho)?);
    let gamma = parse::half(&a.gamma)?;
    let big_j = parse::half(&a.j)?;
    let chain_ok = a.method != Method::Eigen && label.j_min() + gamma <= big_j;
    let (method, js, labels, b) = if chain_ok {
        let t = cg4_chain(label, gamma, a.a)?.table(big_j)?;
        ("chain", t.js, t.labels, t.b)
    } else if a.method == Method::Chain {
        return Err(bad(format!("the ratio chain starts at J = {}", label.j_min() + gamma)));
    } else {
        let blk = casimir_block_on_vj(label, gamma, a.a, big_j)?;
        match blk.report()? {
            BlockReport::Diagonalizable(eig) => {
                let mut b = CMat::zeros(blk.js.len(), eig.len());
                for (c, x) in eig.iter().enumerate() {
                    b.set_column(c, &x.vector);
                }
                ("eigen", blk.js.clone(), eig.iter().map(|x| x.label).collect(), b)
            }
            BlockReport::Defective { eigenvectors, dim } => {
                return Err(spinnet::Error::NotDecomposable(format!(
                    "Casimir block at J = {big_j} is defective ({eigenvectors} eigenvectors, dimension {dim})"
                ))
                .into())
            }
        }
    };
    let output = match format_or(g, Format::Json) {
        Format::Json => json_out(&json!({
            "label": label,
            "gamma": gamma.to_string(),
            "a": a.a,
            "J": big_j.to_string(),
            "method": method,
            "js": js.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "labels": labels,
            "b": (0..b.nrows()).map(|r| (0..b.ncols()).map(|c| cplx(b[(r, c)])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }))?,
        Format::Csv => {
            let mut rows = vec![];
            for (r, j) in js.iter().enumerate() {
                for (c, l) in labels.iter().enumerate() {
                    let v = b[(r, c)];
                    rows.push(vec![
                        big_j.to_string(),
                        j.to_string(),
                        l.lambda.to_string(),
                        e(l.rho.re),
                        e(l.rho.im),
                        e(v.re),
                        e(v.im),
                    ]);
                }
            }
            csv_out(&["J", "j", "Lambda", "P_re", "P_im", "re", "im"], rows)?
        }
    };
    Ok(Outcome { output, passed: b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) })
}

// coherent

#[derive(Subcommand, Debug)]
pub enum CoherentCmd {
    /// Area distribution P(J) of a rank-2 coherent state.
    Dist(DistArgs),
    /// Area moments of a random coherent state, optionally checked against the Fock oracle.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
pub struct DistArgs {
    /// tr(zeta* zeta), in [0, 2).
    #[arg(long)]
    trace: f64,
    #[arg(long, default_value_t = 24)]
    jmax: usize,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Number of legs.
    #[arg(long)]
    n: usize,
    /// Largest singular value of zeta, below 1.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Compare with the truncated Fock oracle.
    #[arg(long)]
    oracle: bool,
    /// Shell cap of the oracle.
    #[arg(long, default_value_t = 24)]
    jmax: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

pub fn coherent(c: &CoherentCmd, g: &Global) -> anyhow::Result<Outcome> {
    match c {
        CoherentCmd::Dist(a) => dist(a, g),
        CoherentCmd::Stats(a) => stats(a, g),
    }
}

fn dist(a: &DistArgs, g: &Global) -> anyhow::Result<Outcome> {
    let p = rank2_distribution_for_trace(a.trace, a.jmax)?;
    let output = match format_or(g, Format::Csv) {
        Format::Csv => csv_out(&["J", "P"], p.iter().enumerate().map(|(j, x)| vec![j.to_string(), e(*x)]))?,
        Format::Json => {
            let (mean, var) = distribution_moments(&p);
            json_out(&json!({
                "trace": a.trace,
                "jmax": a.jmax,
                "probabilities": p,
                "captured_mass": p.iter().sum::<f64>(),
                "mean": mean,
                "variance": var,
            }))?
        }
    };
    Ok(Outcome { output, passed: true })
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let top = b.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / top
}

fn stats(a: &StatsArgs, g: &Global) -> anyhow::Result<Outcome> {
    if a.n < 2 {
        return Err(bad("n must be at least 2"));
    }
    if !(0.0..1.0).contains(&a.radius) {
        return Err(bad("radius must lie in [0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let z = DomainPoint::random(a.n, a.radius, &mut rng)?;
    let s = area_statistics(&z);
    let mut passed = true;
    let oracle = if a.oracle {
        let mut o = FramedOracle::new(&z.zeta, a.jmax)?;
        if o.tail_factor() > a.tol {
            return Err(spinnet::Error::WindowTooSmall(format!(
                "J_max = {} leaves a tail factor {:.1e} above the tolerance",
                a.jmax,
                o.tail_factor()
            ))
            .into());
        }
        let m = oracle_moments(&mut o);
        let r = [
            rel(&m.means, &s.means),
            rel(&m.variances, &s.variances),
            rel(&[m.total_variance], &[s.total_variance]),
        ];
        passed = r.iter().all(|x| *x <= a.tol);
        Some(json!({
            "jmax": a.jmax,
            "means_rel": r[0],
            "variances_rel": r[1],
            "total_variance_rel": r[2],
            "tolerance": a.tol,
            "passed": passed,
        }))
    } else {
        None
    };
    let output = match format_or(g, Format::Json) {
        Format::Json => {
            let zeta: Vec<Vec<[f64; 2]>> =
                (0..a.n).map(|r| (0..a.n).map(|c| cplx(z.zeta[(r, c)])).collect()).collect();
            json_out(&json!({
                "n": a.n,
                "radius": a.radius,
                "seed": a.seed,
                "zeta": zeta,
                "statistics": s,
                "oracle": oracle,
            }))?
        }
        Format::Csv => csv_out(
            &["leg", "mean", "variance"],
            s.means.iter().zip(&s.variances).enumerate().map(|(k, (m, v))| vec![(k + 1).to_string(), e(*m), e(*v)]),
        )?,
    };
    Ok(Outcome { output, passed })
}

// verify-all

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Weight window of the infinite-dimensional tables.
    #[arg(long, default_value_t = 40)]
    window: i64,
    /// Shell cap of the per-block Fock oracles.
    #[arg(long, default_value_t = 24)]
    jmax: usize,
    /// Comma-separated criterion numbers; all when omitted.
    #[arg(long)]
    only: Option<String>,
}

pub fn verify_all(a: &VerifyArgs, g: &Global) -> anyhow::Result<Outcome> {
    let ids: Vec<u8> = match &a.only {
        Some(s) => parse::list(s, |x| {
            let id: u8 = x.parse().map_err(|_| bad(format!("bad criterion `{x}`")))?;
            CRITERIA.iter().any(|c| c.0 == id).then_some(id).ok_or_else(|| bad(format!("no criterion {id}")))
        })?,
        None => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let cfg = VerifyConfig { seed: a.seed, window: a.window, fock_j_max: a.jmax };
    let mut reports = vec![];
    for id in ids {
        let r = verify::run(id, &cfg);
        eprintln!("{r}");
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    let output = match format_or(g, Format::Json) {
        Format::Json => json_out(&reports).context("serialising reports")?,
        Format::Csv => csv_out(
            &["id", "name", "part", "worst", "tolerance", "checks", "passed"],
            reports.iter().flat_map(|r| {
                let head = if r.parts.is_empty() {
                    vec![vec![
                        r.id.to_string(),
                        r.name.clone(),
                        r.error.clone().unwrap_or_default(),
                        String::new(),
                        String::new(),
                        "0".into(),
                        r.passed.to_string(),
                    ]]
                } else {
                    vec![]
                };
                head.into_iter().chain(r.parts.iter().map(|p| {
                    vec![
                        r.id.to_string(),
                        r.name.clone(),
                        p.label.clone(),
                        e(p.worst),
                        e(p.tolerance),
                        p.checks.to_string(),
                        p.passed().to_string(),
                    ]
                }))
            }),
        )?,
    };
    Ok(Outcome { output, passed })
}

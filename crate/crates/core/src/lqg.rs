//! Three-valent intertwiners, the triangular network `ψ(j2, j3, j4)` and the
//! quantum Hamiltonian constraints acting on it.
//!
//! A node `(j1 j2 → j3)` has two incoming legs and one outgoing leg (`Lr`),
//! its mirror `(j3 → j1 j2)` has one incoming and two outgoing legs (`Rl`).
//! Scalar operators on a pair of legs of a node shift both labels by `±½`
//! and multiply the node by a Racah coefficient with one `F_½` label:
//!
//! ```text
//! lr, legs 1 2:  ±D(k1)D(j2) R{k1 ½ j1; j2 j3 k2} (k1 k2 → j3)
//! rl, legs 1 2:  ±D(k1)D(j2) R{k1 ½ j1; j2 j3 k2} (j3 → k1 k2)
//! lr, legs 2 3:  ±D(j2)D(j3) R{j1 j2 j3; ½ k3 k2} (j1 k2 → k3)
//! ```
//!
//! The network has three nodes sharing the edges 2, 3 and 4:
//! `A = (j1 j2 → j3)`, `B = (j3 j4 → j5)` and `C = (j6 → j2 j4)`, and reduces
//! to `R{j1 j2 j3; j4 j5 j6} (j1 j6 → j5)`.

use crate::numeric::StableMap;
use std::fmt;

use serde::Serialize;

use crate::cg::{engine, fx_decomposable};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::jordan_schwinger::shifted_label;
use crate::numeric::{re, C64};
use crate::racah::{admissible, dim_factor, r6};
use crate::spin21::{Class3, RepLabel3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    /// Legs 1 and 2 incoming, leg 3 outgoing.
    Lr,
    /// Leg 3 incoming, legs 1 and 2 outgoing.
    Rl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TriNode {
    pub j1: RepLabel3,
    pub j2: RepLabel3,
    pub j3: RepLabel3,
    pub orientation: Orientation,
}

impl TriNode {
    pub fn lr(j1: RepLabel3, j2: RepLabel3, j3: RepLabel3) -> Self {
        Self { j1, j2, j3, orientation: Orientation::Lr }
    }

    pub fn rl(j1: RepLabel3, j2: RepLabel3, j3: RepLabel3) -> Self {
        Self { j1, j2, j3, orientation: Orientation::Rl }
    }

    /// `j3 ∈ j1 ⊗ j2` as a discrete summand.
    pub fn is_admissible(&self) -> bool {
        admissible(&self.j1, &self.j2, &self.j3)
    }

    pub fn label(&self, leg: u8) -> RepLabel3 {
        match leg {
            1 => self.j1,
            2 => self.j2,
            _ => self.j3,
        }
    }
}

/// Quantum scalar operators; `Et` is `Ẽ_ab = -E_ba`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OpKind {
    E,
    Et,
    F,
    Ft,
}

/// A scalar operator on legs `a`, `b` (numbered 1 to 3) of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NodeOp {
    pub kind: OpKind,
    pub a: u8,
    pub b: u8,
}

impl NodeOp {
    pub fn new(kind: OpKind, a: u8, b: u8) -> Self {
        Self { kind, a, b }
    }
}

impl fmt::Display for NodeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            OpKind::E => "E",
            OpKind::Et => "Et",
            OpKind::F => "F",
            OpKind::Ft => "Ft",
        };
        write!(f, "{k}{}{}", self.a, self.b)
    }
}

/// `coefficient · node`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NodeAction {
    #[serde(serialize_with = "ser_c64")]
    pub coefficient: C64,
    pub node: TriNode,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Row {
    Lr12,
    Rl12,
    Lr23,
}

/// `(sign, shift of the first leg, shift of the second leg)` for the
/// operator with legs in increasing order (`forward`) or reversed.
fn row_entry(row: Row, kind: OpKind, forward: bool) -> Option<(f64, i64, i64)> {
    use OpKind::*;
    let t = match (row, kind, forward) {
        (Row::Lr12, E, true) => (1.0, -1, 1),
        (Row::Lr12, E, false) => (-1.0, 1, -1),
        (Row::Lr12, F, _) => (-1.0, 1, 1),
        (Row::Lr12, Ft, _) => (-1.0, -1, -1),
        (Row::Rl12, E, true) => (-1.0, 1, -1),
        (Row::Rl12, E, false) => (1.0, -1, 1),
        (Row::Rl12, F, _) => (-1.0, -1, -1),
        (Row::Rl12, Ft, _) => (-1.0, 1, 1),
        (Row::Lr23, E, true) => (1.0, -1, -1),
        (Row::Lr23, E, false) => (1.0, 1, 1),
        (Row::Lr23, F, _) => (1.0, 1, -1),
        (Row::Lr23, Ft, _) => (-1.0, -1, 1),
        (_, Et, _) => return None,
    };
    Some(t)
}

fn shift(l: &RepLabel3, twice: i64) -> Option<RepLabel3> {
    shifted_label(l, twice > 0)
}

fn check_decomposable(couplings: [(RepLabel3, RepLabel3); 4]) -> Result<()> {
    for (a, b) in couplings {
        let ok = match (a.class, b.class) {
            (Class3::Finite, _) => fx_decomposable(a.jh(), &b),
            (_, Class3::Finite) => fx_decomposable(b.jh(), &a),
            _ => true,
        };
        if !ok {
            return Err(Error::NotDecomposable(format!("{a} ⊗ {b}")));
        }
    }
    Ok(())
}

fn node_action_counted(op: NodeOp, node: &TriNode, calls: &mut usize) -> Result<NodeAction> {
    if op.kind == OpKind::Et {
        let a = node_action_counted(NodeOp::new(OpKind::E, op.b, op.a), node, calls)?;
        return Ok(NodeAction { coefficient: -a.coefficient, node: a.node });
    }
    let pair = (op.a.min(op.b), op.a.max(op.b));
    let forward = op.a < op.b;
    let row = match (node.orientation, pair) {
        (Orientation::Lr, (1, 2)) => Row::Lr12,
        (Orientation::Rl, (1, 2)) => Row::Rl12,
        (Orientation::Lr, (2, 3)) => Row::Lr23,
        _ => {
            return Err(Error::UnsupportedCoupling(format!(
                "{op} on a {:?} node has no closed-form action",
                node.orientation
            )))
        }
    };
    let (s, d1, d2) = row_entry(row, op.kind, forward).expect("E, F, F̃ rows");
    // F and F̃ are antisymmetric in their legs.
    let anti = if op.kind != OpKind::E && !forward { -1.0 } else { 1.0 };
    let half = RepLabel3::finite(HalfInt::HALF);
    let zero = |node: TriNode| NodeAction { coefficient: re(0.0), node };
    match row {
        Row::Lr12 | Row::Rl12 => {
            let (Some(k1), Some(k2)) = (shift(&node.j1, d1), shift(&node.j2, d2)) else {
                return Ok(zero(*node));
            };
            let out = TriNode { j1: k1, j2: k2, ..*node };
            check_decomposable([(k1, half), (node.j1, node.j2), (half, node.j2), (k1, k2)])?;
            *calls += 1;
            let r = r6(k1, half, node.j1, node.j2, node.j3, k2)?;
            Ok(NodeAction { coefficient: dim_factor(&k1) * dim_factor(&node.j2) * r * (s * anti), node: out })
        }
        Row::Lr23 => {
            let (Some(k2), Some(k3)) = (shift(&node.j2, d1), shift(&node.j3, d2)) else {
                return Ok(zero(*node));
            };
            let out = TriNode { j2: k2, j3: k3, ..*node };
            check_decomposable([(node.j1, node.j2), (node.j3, half), (node.j2, half), (node.j1, k2)])?;
            *calls += 1;
            let r = r6(node.j1, node.j2, node.j3, half, k3, k2)?;
            Ok(NodeAction { coefficient: dim_factor(&node.j2) * dim_factor(&node.j3) * r * (s * anti), node: out })
        }
    }
}

/// Action of a scalar operator on a node. Supported leg pairs are `{1,2}` on
/// both orientations and `{2,3}` on `Lr` nodes, in either order.
///
/// Fails with `NotDecomposable` when a finite module meets a discrete one
/// below the decomposability threshold in the Racah coefficient (e.g. `F_½`
/// with `D⁺_{-½}`); the closed form does not apply there.
pub fn node_action(op: NodeOp, node: &TriNode) -> Result<NodeAction> {
    node_action_counted(op, node, &mut 0)
}

/// Labels `j1 … j6` of the triangular network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TetNetwork {
    pub j: [RepLabel3; 6],
}

impl TetNetwork {
    pub fn new(j: [RepLabel3; 6]) -> Self {
        Self { j }
    }

    /// `(j1 j2 → j3)`, `(j3 j4 → j5)`, `(j2 j4 → j6)` and `(j1 j6 → j5)`.
    pub fn couplings(&self) -> [(RepLabel3, RepLabel3, RepLabel3); 4] {
        let j = &self.j;
        [(j[0], j[1], j[2]), (j[2], j[3], j[4]), (j[1], j[3], j[5]), (j[0], j[5], j[4])]
    }

    pub fn is_admissible(&self) -> bool {
        self.couplings().iter().all(|(a, b, c)| admissible(a, b, c))
    }

    /// `R{j1 j2 j3; j4 j5 j6}`, the coefficient of `(j1 j6 → j5)` in the
    /// reduced network.
    pub fn amplitude(&self) -> Result<C64> {
        let j = self.j;
        r6(j[0], j[1], j[2], j[3], j[4], j[5])
    }

    pub fn with_inner(&self, j2: RepLabel3, j3: RepLabel3, j4: RepLabel3) -> Self {
        let mut n = *self;
        n.j[1] = j2;
        n.j[2] = j3;
        n.j[3] = j4;
        n
    }
}

impl fmt::Display for TetNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.j.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", s.join(", "))
    }
}

/// Largest `|Σ_m2 B B A - R B|` over sampled weights, for the contraction of
/// the three nodes over the internal weights with the external weights of
/// `j1` and `j5` fixed.
pub fn tet_reduction_residual(net: &TetNetwork) -> Result<f64> {
    let [j1, j2, j3, j4, j5, j6] = net.j;
    let eng = engine();
    let r = net.amplitude()?;
    let span: f64 = net.j.iter().map(|l| l.j.norm()).sum();
    let k = HalfInt::from_twice(2 * (span.ceil() as i64 + 4));
    let m5s: Vec<HalfInt> = j5.weights_in(-k, k).into_iter().take(3).collect();
    let mut worst: f64 = 0.0;
    for m in m5s {
        for m1 in j1.weights_in(-k, k) {
            let mut lhs = re(0.0);
            for m2 in j2.weights_in(-k - k, k + k) {
                let (m3, m4) = (m1 + m2, m - m1 - m2);
                if !j3.contains(m3) || !j4.contains(m4) {
                    continue;
                }
                let a = eng.coefficient(&j3, &j1, m1, &j2, m2)?;
                let b = eng.coefficient(&j5, &j3, m3, &j4, m4)?;
                let c = eng.coefficient(&j6, &j2, m2, &j4, m4)?;
                lhs += a * b * c;
            }
            let rhs = r * eng.coefficient(&j5, &j1, m1, &j6, m - m1)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// `⟨⟩`, `[[ ]]`, `⟨]` and `[⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Bracket {
    Angle,
    Square,
    AngleSquare,
    SquareAngle,
}

impl Bracket {
    pub const ALL: [Bracket; 4] = [Bracket::Angle, Bracket::Square, Bracket::AngleSquare, Bracket::SquareAngle];

    pub fn tag(self) -> &'static str {
        match self {
            Bracket::Angle => "<>",
            Bracket::Square => "[[",
            Bracket::AngleSquare => "<]",
            Bracket::SquareAngle => "[>",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.tag() == s || format!("{b:?}").eq_ignore_ascii_case(s))
    }
}

/// A constraint `H^bracket_abc` for a cycle `(a, b, c)` of the edges 2, 3, 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HamiltonianVariant {
    pub bracket: Bracket,
    pub cycle: [u8; 3],
}

impl HamiltonianVariant {
    /// The even permutations of `(3, 4, 2)`.
    pub const CYCLES: [[u8; 3]; 3] = [[3, 4, 2], [4, 2, 3], [2, 3, 4]];

    /// Any permutation of `{2, 3, 4}` is accepted; the odd ones give the
    /// counter-clockwise constraints.
    pub fn new(bracket: Bracket, cycle: [u8; 3]) -> Result<Self> {
        let mut s = cycle;
        s.sort_unstable();
        if s != [2, 3, 4] {
            return Err(Error::InvalidLabel(format!("cycle {cycle:?} is not a permutation of (2, 3, 4)")));
        }
        Ok(Self { bracket, cycle })
    }

    pub fn is_clockwise(&self) -> bool {
        Self::CYCLES.contains(&self.cycle)
    }

    /// All four brackets over the three clockwise cycles.
    pub fn all() -> Vec<Self> {
        Bracket::ALL
            .into_iter()
            .flat_map(|bracket| Self::CYCLES.into_iter().map(move |cycle| Self { bracket, cycle }))
            .collect()
    }

    /// `(sign, operators in the order they act, with E_b⁻¹)`.
    fn terms(&self) -> [(f64, Vec<(OpKind, u8, u8)>, bool); 3] {
        use OpKind::*;
        let [a, b, c] = self.cycle;
        match self.bracket {
            Bracket::Angle => [
                (1.0, vec![(Et, c, a), (E, c, a)], false),
                (-1.0, vec![(Et, c, a), (E, b, a), (E, c, b)], true),
                (1.0, vec![(Et, c, a), (F, b, a), (Ft, c, b)], true),
            ],
            Bracket::Square => [
                (1.0, vec![(E, c, a), (Et, c, a)], false),
                (-1.0, vec![(E, c, a), (Ft, b, a), (F, c, b)], true),
                (1.0, vec![(E, c, a), (Et, b, a), (Et, c, b)], true),
            ],
            Bracket::AngleSquare => [
                (1.0, vec![(F, c, a), (Ft, c, a)], false),
                (-1.0, vec![(F, c, a), (Ft, b, a), (E, c, b)], true),
                (1.0, vec![(F, c, a), (Et, b, a), (Ft, c, b)], true),
            ],
            Bracket::SquareAngle => [
                (1.0, vec![(Ft, c, a), (F, c, a)], false),
                (-1.0, vec![(Ft, c, a), (E, b, a), (F, c, b)], true),
                (1.0, vec![(Ft, c, a), (F, b, a), (Et, c, b)], true),
            ],
        }
    }
}

impl fmt::Display for HamiltonianVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.cycle;
        write!(f, "{}{a}{b}{c}", self.bracket.tag())
    }
}

/// Edge labels as seen by each node: `A = (j1 e2A → e3A)`,
/// `B = (e3B e4B → j5)`, `C = (j6 → e2C e4C)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Split([RepLabel3; 6]);

impl Split {
    fn consistent(&self) -> Option<(RepLabel3, RepLabel3, RepLabel3)> {
        let [e2a, e3a, e3b, e4b, e2c, e4c] = self.0;
        (e2a == e2c && e3a == e3b && e4b == e4c).then_some((e2a, e3a, e4b))
    }
}

fn apply_op(
    kind: OpKind,
    x: u8,
    y: u8,
    state: &StableMap<Split, C64>,
    net: &TetNetwork,
    calls: &mut usize,
) -> Result<StableMap<Split, C64>> {
    let [j1, _, _, _, j5, j6] = net.j;
    let mut out: StableMap<Split, C64> = StableMap::default();
    let pair = (x.min(y), x.max(y));
    for (lab, c) in state {
        let [e2a, e3a, e3b, e4b, e2c, e4c] = lab.0;
        let (node, ab) = match pair {
            (2, 3) => (TriNode::lr(j1, e2a, e3a), [2, 3]),
            (3, 4) => (TriNode::lr(e3b, e4b, j5), [1, 2]),
            (2, 4) => (TriNode::rl(e2c, e4c, j6), [1, 2]),
            _ => unreachable!("edges are 2, 3, 4"),
        };
        let (a, b) = if (x, y) == pair { (ab[0], ab[1]) } else { (ab[1], ab[0]) };
        let act = node_action_counted(NodeOp::new(kind, a, b), &node, calls)?;
        if act.coefficient == re(0.0) {
            continue;
        }
        let n = act.node;
        let new = match pair {
            (2, 3) => [n.j2, n.j3, e3b, e4b, e2c, e4c],
            (3, 4) => [e2a, e3a, n.j1, n.j2, e2c, e4c],
            _ => [e2a, e3a, e3b, e4b, n.j1, n.j2],
        };
        *out.entry(Split(new)).or_default() += c * act.coefficient;
    }
    Ok(out)
}

/// `Ĥ ψ` as a combination of networks with shifted `(j2, j3, j4)`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Combination {
    /// `(network, coefficient)`; the amplitude of a term is
    /// `coefficient · R(network)`.
    pub terms: Vec<(TetNetwork, [f64; 2])>,
    /// Largest coefficient left on a state whose nodes disagree on an edge
    /// label; zero for a well-formed constraint.
    pub mismatched: f64,
    pub racah_calls: usize,
}

/// Applies the constraint to `ψ(j2, j3, j4)`. `E_b⁻¹` acts first, as
/// multiplication by `1/(2j_b + 1)`.
pub fn hamiltonian_apply(variant: HamiltonianVariant, net: &TetNetwork) -> Result<Combination> {
    let mut comb = Combination::default();
    if !net.is_admissible() {
        return Ok(comb);
    }
    let [_, j2, j3, j4, _, _] = net.j;
    let init = Split([j2, j3, j3, j4, j2, j4]);
    let eb = match variant.cycle[1] {
        2 => j2,
        3 => j3,
        _ => j4,
    };
    let d = eb.j * 2.0 + 1.0;
    if d.norm() == 0.0 {
        return Err(Error::InvalidLabel(format!("E_{} is not invertible on {eb}", variant.cycle[1])));
    }
    let mut total: StableMap<Split, C64> = StableMap::default();
    for (sign, ops, inv) in variant.terms() {
        let mut st: StableMap<Split, C64> = [(init, if inv { re(1.0) / d } else { re(1.0) })].into_iter().collect();
        for (kind, x, y) in ops {
            st = apply_op(kind, x, y, &st, net, &mut comb.racah_calls)?;
        }
        for (k, v) in st {
            *total.entry(k).or_default() += v * sign;
        }
    }
    let mut terms: Vec<(TetNetwork, C64)> = Vec::new();
    for (lab, c) in total {
        match lab.consistent() {
            Some((e2, e3, e4)) => terms.push((net.with_inner(e2, e3, e4), c)),
            None => comb.mismatched = comb.mismatched.max(c.norm()),
        }
    }
    terms.sort_by(|a, b| {
        let key = |n: &TetNetwork| (n.j[1].j.re, n.j[2].j.re, n.j[3].j.re);
        key(&a.0).partial_cmp(&key(&b.0)).unwrap()
    });
    comb.terms = terms.into_iter().map(|(n, c)| (n, [c.re, c.im])).collect();
    Ok(comb)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilationReport {
    pub labels: [RepLabel3; 6],
    pub variant: String,
    pub residual: f64,
    /// Weight sums in the Racah coefficients are exact, so no window is used.
    pub window: Option<u32>,
    pub racah_calls: usize,
    pub terms: usize,
    pub max_term: f64,
    pub mismatched: f64,
}

/// Evaluates `Ĥ ψ` through the reduction of each network to its Racah
/// coefficient; the residual is `|Σ amplitudes| / max |amplitude|`, and zero
/// when every amplitude vanishes.
pub fn annihilation_report(variant: HamiltonianVariant, net: &TetNetwork) -> Result<AnnihilationReport> {
    let comb = hamiltonian_apply(variant, net)?;
    let mut calls = comb.racah_calls;
    let mut sum = re(0.0);
    let mut max_term: f64 = 0.0;
    for (n, c) in &comb.terms {
        calls += 1;
        let t = C64::new(c[0], c[1]) * n.amplitude()?;
        sum += t;
        max_term = max_term.max(t.norm());
    }
    let residual = if max_term > 0.0 { sum.norm() / max_term } else { 0.0 };
    Ok(AnnihilationReport {
        labels: net.j,
        variant: variant.to_string(),
        residual,
        window: None,
        racah_calls: calls,
        terms: comb.terms.len(),
        max_term,
        mismatched: comb.mismatched,
    })
}

pub fn annihilation_residual(net: &TetNetwork, variant: HamiltonianVariant) -> Result<f64> {
    Ok(annihilation_report(variant, net)?.residual)
}

use std::collections::HashMap;

use proptest::prelude::*;
use spinnet::numeric::{c64, re, su2_cg, CMat, I};
use spinnet::spin31::*;
use spinnet::{Error, HalfInt, C64};

fn h(t: i64) -> HalfInt {
    HalfInt(t)
}

fn lab(twice_lambda: i64, rho: C64) -> Rep4Label {
    Rep4Label::new(HalfInt(twice_lambda), rho)
}

fn apply(g: Generator4, s: &SU2TowerState) -> SU2TowerState {
    apply_generator(g, s)
}

fn js(op: JsOp4, s: &SU2TowerState) -> SU2TowerState {
    js4_apply(op, s).unwrap()
}

fn all_basis(l: Rep4Label, cut: HalfInt) -> Vec<SU2TowerState> {
    let s = SU2TowerState::new(l, cut).unwrap();
    s.keys()
        .into_iter()
        .filter(|(j, _)| s.is_interior(*j) || l.is_finite())
        .map(|(j, m)| SU2TowerState::basis(l, cut, j, m).unwrap())
        .collect()
}

use Generator4::*;

/// `[X, Y] = Σ c_k Z_k` in the J±, K± basis.
fn relations() -> Vec<(Generator4, Generator4, Vec<(Generator4, f64)>)> {
    vec![
        (J0, Jplus, vec![(Jplus, 1.0)]),
        (J0, Jminus, vec![(Jminus, -1.0)]),
        (Jplus, Jminus, vec![(J0, 2.0)]),
        (J0, Kplus, vec![(Kplus, 1.0)]),
        (J0, Kminus, vec![(Kminus, -1.0)]),
        (J0, K0, vec![]),
        (Jplus, K0, vec![(Kplus, -1.0)]),
        (Jminus, K0, vec![(Kminus, 1.0)]),
        (Jplus, Kminus, vec![(K0, 2.0)]),
        (Jminus, Kplus, vec![(K0, -2.0)]),
        (Jplus, Kplus, vec![]),
        (Jminus, Kminus, vec![]),
        (Kplus, Kminus, vec![(J0, -2.0)]),
        (K0, Kplus, vec![(Jplus, -1.0)]),
        (K0, Kminus, vec![(Jminus, 1.0)]),
    ]
}

fn commutation_residual(l: Rep4Label, cut: HalfInt) -> f64 {
    let mut worst: f64 = 0.0;
    for b in all_basis(l, cut) {
        for (x, y, rhs) in relations() {
            let mut d = apply(x, &apply(y, &b)).minus(&apply(y, &apply(x, &b)));
            for (z, c) in rhs {
                d = d.minus(&apply(z, &b).scaled(re(c)));
            }
            let r = if l.is_finite() { d.max_abs() } else { d.interior_max() };
            worst = worst.max(r);
        }
    }
    worst
}

fn casimir_residual(l: Rep4Label, cut: HalfInt) -> f64 {
    let (c1, c2) = casimir_values(&l);
    let mut worst: f64 = 0.0;
    for b in all_basis(l, cut) {
        let k0j0 = apply(J0, &apply(K0, &b));
        let a = apply(Jminus, &apply(Kplus, &b));
        let bb = apply(Jplus, &apply(Kminus, &b));
        let cc1 = k0j0.plus(&a.plus(&bb).scaled(re(0.5)));
        let jsq = apply(Jplus, &apply(Jminus, &b))
            .plus(&apply(J0, &apply(J0, &b)))
            .minus(&apply(J0, &b));
        let cc2 = jsq
            .minus(&apply(J0, &b))
            .minus(&apply(K0, &apply(K0, &b)))
            .minus(&apply(Kplus, &apply(Kminus, &b)));
        for (got, want) in [(cc1, c1), (cc2, c2)] {
            let d = got.minus(&b.scaled(want));
            let r = if l.is_finite() { d.max_abs() } else { d.interior_max() };
            worst = worst.max(r);
        }
    }
    worst
}

#[test]
fn labels_dictionary_and_finiteness() {
    let l = lab(2, re(-2.0));
    assert!(l.is_finite());
    assert_eq!(l.j_max(), Some(h(2)));
    assert_eq!(lab(0, re(1.0)).casimirs(), (c64(0.0, 0.0), c64(0.0, 0.0)));
    let s = 0.7;
    let (c1, c2) = lab(1, c64(0.0, s)).casimirs();
    assert!((c1 - re(-s / 2.0)).norm() < 1e-15);
    assert!((c2 - re(0.25 - s * s - 1.0)).norm() < 1e-15);
    assert!(!lab(1, c64(0.0, 0.3)).is_finite());
    assert!(!lab(2, re(1.5)).is_finite());
    assert!(!lab(2, re(1.0)).is_finite());

    let w = Rep4Label::from_finite(h(1), h(0));
    assert_eq!((w.lambda, w.rho), (h(1), re(-1.5)));
    let s0 = Rep4Label::from_finite(h(0), h(0));
    assert_eq!((s0.lambda, s0.rho), (h(0), re(-1.0)));
    for a in 0..7 {
        for b in 0..7 {
            let l = Rep4Label::from_finite(h(a), h(b));
            assert_eq!(l.to_finite(), Some((h(a), h(b))), "({a}/2, {b}/2)");
            assert_eq!(l.dim(), Some(((a + 1) * (b + 1)) as usize));
            assert_eq!(l.j_max(), Some(h(a + b)));
        }
    }
    assert_eq!(lab(1, c64(0.0, 0.3)).to_finite(), None);
}

#[test]
fn canonical_form_and_equivalence() {
    let l = lab(-3, c64(0.2, -0.5));
    let c = l.canonical();
    assert_eq!(c.lambda, h(3));
    assert_eq!(c.rho, c64(-0.2, 0.5));
    assert!(l.equivalent(&c));
    assert_eq!(lab(0, c64(0.1, -1.0)).canonical().rho, c64(-0.1, 1.0));
    for j in 0..8 {
        let j = h(3 + 2 * j);
        assert!((l.p(j) - c.p(j)).norm() < 1e-15);
        assert!((l.p_minus(j) - c.p_minus(j)).norm() < 1e-15);
    }
    assert_eq!(l.casimirs(), c.casimirs());
}

#[test]
fn label_json_round_trip() {
    let l = lab(3, c64(0.25, -1.5));
    let s = serde_json::to_string(&l).unwrap();
    assert_eq!(s, r#"{"lambda":[3,2],"rho":[0.25,-1.5]}"#);
    let back: Rep4Label = serde_json::from_str(&s).unwrap();
    assert_eq!(back, l);
    let i: Rep4Label = serde_json::from_str(r#"{"lambda":[2,1],"rho":[0,0]}"#).unwrap();
    assert_eq!(i.lambda, h(4));
    assert!(serde_json::from_str::<Rep4Label>(r#"{"lambda":[1,3],"rho":[0,0]}"#).is_err());
}

#[test]
fn tower_edges() {
    for (tl, tw) in [(0, 2), (1, 3), (2, 4), (3, 7)] {
        let w = h(tw);
        let rho = re(w.f() + 1.0);
        let l = lab(tl, rho);
        assert_eq!(l.j_max(), Some(w));
        assert_eq!(l.p_plus(w), re(0.0));
        assert_eq!(lab(tl, -rho).p_plus(w), re(0.0));
        assert!(l.p_plus(w - h(2)).norm() > 1e-3);
    }
    for t in 0..10 {
        assert_eq!(lab(0, c64(0.3, 0.8)).p(h(2 * t)), re(0.0));
    }
    assert!(SU2TowerState::new(lab(2, re(-3.0)), h(6)).is_err());
    assert!(SU2TowerState::new(lab(2, re(0.3)), h(3)).is_err());
    assert_eq!(SU2TowerState::default_cut(&lab(1, c64(0.0, 0.3))), h(17));
    assert_eq!(SU2TowerState::default_cut(&lab(2, re(-3.0))), h(4));
}

#[test]
fn lorentz_commutators_on_interiors() {
    let r = commutation_residual(lab(1, c64(0.0, 0.3)), h(17));
    assert!(r <= 1e-10, "(1/2, 0.3i): {r:e}");
    for (tl, rho) in [
        (0, re(0.5)),
        (2, c64(0.25, 0.4)),
        (-3, re(1.3)),
        (4, c64(-0.7, 2.0)),
        (0, c64(0.0, 0.0)),
    ] {
        let l = lab(tl, rho);
        let r = commutation_residual(l, l.j_min() + h(10));
        assert!(r <= 1e-10, "{l}: {r:e}");
    }
}

#[test]
fn finite_modules_close_exactly() {
    for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 1), (3, 2), (0, 4)] {
        let l = Rep4Label::from_finite(h(a), h(b));
        let w = l.j_max().unwrap();
        assert!(commutation_residual(l, w) <= 1e-12, "{l}");
        assert!(casimir_residual(l, w) <= 1e-12, "{l}");
    }
}

#[test]
fn casimirs_act_as_scalars() {
    for (tl, rho) in [(1, c64(0.0, 0.3)), (0, re(0.5)), (2, re(0.25)), (-1, c64(1.2, -0.4)), (3, re(0.0))] {
        let l = lab(tl, rho);
        let r = casimir_residual(l, l.j_min() + h(10));
        assert!(r <= 1e-10, "{l}: {r:e}");
    }
}

/// Finite modules: `K0† = −K0` and `K+† = −K−`, i.e. each `M^A` is
/// self-adjoint.
#[test]
fn finite_modules_have_anti_hermitian_boosts() {
    for (a, b) in [(1, 0), (1, 1), (2, 1), (3, 3)] {
        let l = Rep4Label::from_finite(h(a), h(b));
        let w = l.j_max().unwrap();
        let basis = all_basis(l, w);
        let elem = |g: Generator4, x: &SU2TowerState, y: &SU2TowerState| {
            let gy = apply(g, y);
            x.iter().map(|(k, v)| v.conj() * gy.get(k.0, k.1)).sum::<C64>()
        };
        for x in &basis {
            for y in &basis {
                let k0 = elem(K0, x, y) + elem(K0, y, x).conj();
                let kp = elem(Kplus, x, y) + elem(Kminus, y, x).conj();
                assert!(k0.norm() < 1e-13 && kp.norm() < 1e-13, "{l}");
            }
        }
    }
}

/// Unitarity classes coincide with reality of `P(j)` and `P⁻(j)`.
#[test]
fn unitarity_detector_matches_reality_of_matrix_elements() {
    let rhos = [
        c64(0.0, 0.3),
        c64(0.0, -2.0),
        c64(0.0, 0.0),
        re(0.5),
        re(-0.3),
        re(1.0),
        re(-1.0),
        re(1.5),
        re(2.0),
        re(3.0),
        re(0.25),
        c64(0.5, 0.5),
        c64(0.5, 1.0),
        c64(-1.2, 0.1),
    ];
    for tl in [0, 1, 2, -3] {
        for &rho in &rhos {
            let l = lab(tl, rho);
            let cut = SU2TowerState::default_cut(&l);
            let real = l
                .j_min()
                .range_to(cut)
                .all(|j| l.p(j).im.abs() < 1e-13 && l.p_minus(j).im.abs() < 1e-13);
            assert_eq!(l.is_unitary(), real, "{l}");
        }
    }
}

fn jvals(lo: i64, hi: i64) -> Vec<HalfInt> {
    (lo..=hi).map(HalfInt).collect()
}

#[test]
fn support_sets_match_brute_force() {
    for tl in -4..=4 {
        for tg in 1..=6 {
            let (l, g) = (h(tl), h(tg));
            let mut seen = std::collections::BTreeSet::new();
            for j in l.abs().range_to(l.abs() + h(40)) {
                for big in (j - g).abs().range_to(j + g) {
                    seen.insert(big);
                }
            }
            let lo = j_support_min(l, g);
            let expect: Vec<_> = lo.range_to(h(30)).collect();
            let got: Vec<_> = seen.into_iter().filter(|x| *x <= h(30)).collect();
            assert_eq!(got, expect, "λ={l} γ={g}");
            for big in jvals(0, 30) {
                let brute: Vec<HalfInt> = l
                    .abs()
                    .range_to(l.abs() + h(60))
                    .filter(|j| (*j - g).abs() <= big && big <= *j + g && (*j + g - big).is_integer())
                    .collect();
                if in_j_support(big, l, g) {
                    assert_eq!(omega(big, l, g), brute, "λ={l} γ={g} J={big}");
                    let dim = if big >= g - l.abs() {
                        ((big + g - l.abs()).f() as usize + 1).min(g.twice() as usize + 1)
                    } else {
                        big.twice() as usize + 1
                    };
                    assert_eq!(brute.len(), dim);
                } else {
                    assert!(brute.is_empty(), "λ={l} γ={g} J={big}");
                }
            }
        }
    }
}

/// Table j_values, γ = |λ| + ½ + n with n = 1: rows for the smallest J.
#[test]
fn support_table_rows() {
    let l = h(1);
    let g = l + h(1) + h(2);
    assert_eq!(omega(h(1), l, g), vec![l + h(2), l + h(4)]);
    assert_eq!(omega(h(3), l, g), vec![l, l + h(2), l + h(4), l + h(6)]);
    assert_eq!(omega(h(5), l, g).len(), 5);
    let g = l + h(2) + h(2);
    assert_eq!(omega(h(0), l, g), vec![l + h(4)]);
    assert_eq!(omega(h(2), l, g), vec![l + h(2), l + h(4), l + h(6)]);
}

/// Independent construction of the Casimir blocks on the full product
/// `F^A_γ ⊗ V_{λ,ρ}` from the generator actions and SU(2) CG vectors.
mod product {
    use super::*;

    pub type Key = (i64, HalfInt, HalfInt);
    pub type State = HashMap<Key, C64>;

    pub struct Product {
        pub label: Rep4Label,
        pub gamma: HalfInt,
        pub a: i8,
        pub cut: HalfInt,
    }

    impl Product {
        fn f_action(&self, g: Generator4, mu: i64) -> Option<(i64, C64)> {
            let (gg, m) = (self.gamma.f(), mu as f64 / 2.0);
            let ia = I * self.a as f64;
            let cp = |s: f64| ((gg - s * m) * (gg + s * m + 1.0)).max(0.0).sqrt();
            let (to, v) = match g {
                J0 => (mu, re(m)),
                Jplus => (mu + 2, re(cp(1.0))),
                Jminus => (mu - 2, re(cp(-1.0))),
                K0 => (mu, ia * m),
                Kplus => (mu + 2, ia * cp(1.0)),
                Kminus => (mu - 2, ia * cp(-1.0)),
            };
            (to.abs() <= self.gamma.twice()).then_some((to, v))
        }

        pub fn apply(&self, g: Generator4, s: &State) -> State {
            let mut out: State = HashMap::new();
            for (&(mu, j, m), &c) in s {
                if let Some((mu2, v)) = self.f_action(g, mu) {
                    *out.entry((mu2, j, m)).or_default() += c * v;
                }
                let b = SU2TowerState::basis(self.label, self.cut, j, m).unwrap();
                for ((j2, m2), v) in apply_generator(g, &b).iter() {
                    *out.entry((mu, j2, m2)).or_default() += c * v;
                }
            }
            out
        }

        /// `|(j) J, J⟩`.
        pub fn coupled(&self, j: HalfInt, big_j: HalfInt) -> State {
            let mut s = HashMap::new();
            for mu in (-self.gamma).range_to(self.gamma) {
                let m = big_j - mu;
                let c = su2_cg(self.gamma.twice(), mu.twice(), j.twice(), m.twice(), big_j.twice(), big_j.twice());
                if c != 0.0 {
                    s.insert((mu.twice(), j, m), re(c));
                }
            }
            s
        }

        pub fn project(&self, s: &State, j: HalfInt, big_j: HalfInt) -> C64 {
            self.coupled(j, big_j)
                .iter()
                .map(|(k, c)| c * s.get(k).copied().unwrap_or_default())
                .sum()
        }
    }

    pub fn add(a: &State, b: &State, s: C64) -> State {
        let mut out = a.clone();
        for (k, v) in b {
            *out.entry(*k).or_default() += v * s;
        }
        out
    }
}

fn oracle_blocks(label: Rep4Label, gamma: HalfInt, a: i8, big_j: HalfInt) -> (CMat, CMat) {
    use product::*;
    let p = Product { label, gamma, a, cut: big_j + gamma + h(8) };
    let js = omega(big_j, label.lambda, gamma);
    let n = js.len();
    let (mut m1, mut m2) = (CMat::zeros(n, n), CMat::zeros(n, n));
    for (c, &j) in js.iter().enumerate() {
        let v = p.coupled(j, big_j);
        let ap = |g: Generator4, s: &State| p.apply(g, s);
        let c1 = add(
            &ap(J0, &ap(K0, &v)),
            &add(&ap(Jminus, &ap(Kplus, &v)), &ap(Jplus, &ap(Kminus, &v)), re(1.0)),
            re(0.5),
        );
        let jsq = add(&add(&ap(Jplus, &ap(Jminus, &v)), &ap(J0, &ap(J0, &v)), re(1.0)), &ap(J0, &v), re(-1.0));
        let c2 = add(
            &add(&add(&jsq, &ap(J0, &v), re(-1.0)), &ap(K0, &ap(K0, &v)), re(-1.0)),
            &ap(Kplus, &ap(Kminus, &v)),
            re(-1.0),
        );
        for (r, &jr) in js.iter().enumerate() {
            m1[(r, c)] = p.project(&c1, jr, big_j);
            m2[(r, c)] = p.project(&c2, jr, big_j);
        }
    }
    (m1, m2)
}

#[test]
fn casimir_blocks_match_product_space_oracle() {
    let cases = [
        (1, c64(0.0, 0.3), 1, 1, 2),
        (1, c64(0.0, 0.3), -1, 1, 4),
        (2, re(0.25), 1, 1, 3),
        (1, c64(0.0, 0.3), 1, 2, 5),
        (0, c64(0.3, 0.7), -1, 2, 0),
        (0, c64(0.3, 0.7), 1, 2, 2),
        (2, c64(-0.4, 1.1), -1, 3, 1),
        (2, c64(-0.4, 1.1), 1, 3, 7),
        (-2, re(0.6), 1, 3, 3),
        (4, c64(0.2, 0.5), -1, 4, 4),
    ];
    for (tl, rho, a, tg, tj) in cases {
        let l = lab(tl, rho);
        let (g, bj) = (h(tg), h(tj));
        let blk = casimir_block_on_vj(l, g, a, bj).unwrap();
        let (o1, o2) = oracle_blocks(l, g, a, bj);
        let d1 = (blk.c1.to_dense() - &o1).camax();
        let d2 = (blk.c2.to_dense() - &o2).camax();
        assert!(d1 < 1e-12 && d2 < 1e-12, "{l} γ={g} A={a} J={bj}: {d1:e} {d2:e}");
    }
}

fn align(col: &[C64], want: &[C64]) -> f64 {
    let d = |s: f64| col.iter().zip(want).map(|(x, y)| (x * s - y).norm()).fold(0.0, f64::max);
    d(1.0).min(d(-1.0))
}

#[test]
fn gamma_half_eigenvectors_match_closed_form_table() {
    for (tl, rho) in [(1, c64(0.0, 0.3)), (2, re(0.25)), (-1, c64(0.4, -0.2)), (3, c64(0.0, 1.7))] {
        for a in [1i8, -1] {
            let l = lab(tl, rho);
            let lo = l.j_min() - h(1);
            let start = if lo < HalfInt::ZERO { l.j_min() + h(1) } else { lo };
            for bj in start.range_to(l.j_min() + h(12)) {
                let tab = cg4_half(l, a, bj).unwrap();
                let blk = casimir_block_on_vj(l, h(1), a, bj).unwrap();
                let BlockReport::Diagonalizable(eig) = blk.report().unwrap() else {
                    panic!("{l} A={a} J={bj} defective");
                };
                assert_eq!(eig.len(), tab.labels.len());
                for (c, e) in eig.iter().enumerate() {
                    assert!(e.label.equivalent(&tab.labels[c]) || e.label == tab.labels[c]);
                    assert!(e.match_residual < 1e-12 && e.c2_residual < 1e-12);
                    let want: Vec<C64> = tab.b.column(c).iter().copied().collect();
                    let err = align(e.vector.as_slice(), &want);
                    assert!(err < 1e-12, "{l} A={a} J={bj} col {c}: {err:e}");
                }
            }
        }
    }
}

/// `𝒞^A_J(λ,ρ,½)`: both shifted pairs for `J ≥ |λ|+½`, the single pair
/// `(λ − ½ sgn λ, ρ − ½ A sgn λ)` at `J = |λ| − ½`.
#[test]
fn gamma_half_eigenvalue_pairs() {
    for (tl, rho) in [(1, c64(0.0, 0.3)), (-1, c64(0.0, 0.3)), (4, re(0.4)), (-4, c64(0.2, 0.2))] {
        for a in [1i8, -1] {
            let l = lab(tl, rho);
            let bottom = casimir_block_on_vj(l, h(1), a, l.j_min() - h(1)).unwrap();
            let BlockReport::Diagonalizable(e) = bottom.report().unwrap() else { panic!() };
            let sg = if tl > 0 { 1.0 } else { -1.0 };
            let want = Rep4Label::new(l.lambda - HalfInt((sg as i64) * 1), rho - 0.5 * a as f64 * sg);
            assert_eq!(e.len(), 1);
            assert_eq!(e[0].label.lambda, want.lambda);
            assert!((e[0].label.rho - want.rho).norm() < 1e-15);
            assert!(e[0].match_residual < 1e-12);
            let top = casimir_block_on_vj(l, h(1), a, l.j_min() + h(3)).unwrap();
            let BlockReport::Diagonalizable(e) = top.report().unwrap() else { panic!() };
            let nus: Vec<_> = e.iter().map(|x| x.nu).collect();
            assert_eq!(nus, vec![h(-1), h(1)]);
            assert!(e.iter().all(|x| x.match_residual < 1e-12));
        }
    }
}

#[test]
fn gamma_one_block_has_three_distinct_pairs() {
    let l = lab(1, c64(0.0, 0.3));
    for a in [1i8, -1] {
        let blk = casimir_block_on_vj(l, h(2), a, h(5)).unwrap();
        assert_eq!(blk.dim(), 3);
        let BlockReport::Diagonalizable(e) = blk.report().unwrap() else { panic!() };
        assert_eq!(e.iter().map(|x| x.nu).collect::<Vec<_>>(), vec![h(-2), h(0), h(2)]);
        for x in &e {
            let want = I * (0.5 + x.nu.f()) * (c64(0.0, 0.3) + a as f64 * x.nu.f());
            assert!((x.c1 - want).norm() < 1e-12);
            assert!(x.c2_residual < 1e-12);
        }
        for i in 0..3 {
            for k in 0..i {
                assert!((e[i].c1 - e[k].c1).norm() > 1e-3);
            }
        }
    }
}

#[test]
fn integer_offset_makes_block_defective() {
    let l = lab(1, re(0.5));
    let blk = casimir_block_on_vj(l, h(2), 1, h(5)).unwrap();
    match blk.report().unwrap() {
        BlockReport::Defective { eigenvectors, dim } => {
            assert_eq!(dim, 3);
            assert!(eigenvectors < dim);
        }
        other => panic!("expected defective, got {other:?}"),
    }
}

/// Defective exactly when `ρ + Aλ ∈ (−2γ, 2γ) ∩ ℤ`, for γ ≤ 3/2, |λ| ≤ 1.
#[test]
fn decomposability_frontier_4d() {
    let mut defective = 0;
    let mut checked = 0;
    for tg in 1..=3 {
        let g = h(tg);
        for tl in -2..=2 {
            for a in [1i8, -1] {
                let lam = h(tl);
                let mut rhos: Vec<C64> = vec![];
                for n in -(tg + 1)..=(tg + 1) {
                    rhos.push(re(n as f64 - a as f64 * lam.f()));
                }
                rhos.extend([c64(0.3, 0.0), c64(0.0, 0.7), c64(0.5, 0.5), re(-a as f64 * lam.f() + 0.5)]);
                for rho in rhos {
                    let l = Rep4Label::new(lam, rho);
                    if l.is_finite() {
                        continue;
                    }
                    let expect = !f4_decomposable(g, a, lam, rho);
                    for k in 0..3 {
                        let bj = l.j_min() + g + h(2 * k);
                        let r = casimir_block_on_vj(l, g, a, bj).unwrap().report().unwrap();
                        assert_eq!(r.is_defective(), expect, "{l} γ={g} A={a} J={bj}");
                        checked += 1;
                        defective += expect as usize;
                    }
                }
            }
        }
    }
    assert!(defective > 20 && checked - defective > 20);
}

#[test]
fn cg4_half_rejects_degenerate_pairs() {
    for (tl, a) in [(1, 1i8), (1, -1), (2, 1), (0, 1)] {
        let lam = h(tl);
        let rho = re(-(a as f64) * lam.f());
        let e = cg4_half(Rep4Label::new(lam, rho), a, lam + h(1));
        assert!(matches!(e, Err(Error::NotDecomposable(_))), "λ={lam} A={a}");
    }
    let l = lab(1, c64(0.0, 0.3));
    assert!(matches!(cg4_half(l, 1, h(3)), Err(Error::InvalidLabel(_))));
    assert!(cg4_half(l, 1, h(4)).is_ok());
    assert_eq!(cg4_half(l, 1, h(0)).unwrap().js, vec![h(1)]);
}

/// `(λ,ρ) = (0, ½)`, `A = +1`: exactly one of the two resulting modules is
/// unitary.
#[test]
fn one_unitary_summand() {
    let l = lab(0, re(0.5));
    let tab = cg4_half(l, 1, h(1)).unwrap();
    let unitary: Vec<_> = tab.labels.iter().filter(|x| x.is_unitary()).collect();
    assert_eq!(unitary.len(), 1);
    assert_eq!(unitary[0].lambda, h(-1));
    assert_eq!(unitary[0].rho, re(0.0));
}

#[test]
fn corollary_predicate() {
    assert!(!finite_pair_decomposable(h(2), h(2), h(2), re(0.0)));
    assert!(finite_pair_decomposable(h(2), h(2), h(2), c64(0.0, 0.4)));
    assert!(finite_pair_decomposable(h(1), h(4), h(0), re(1.5)));
    assert!(!finite_pair_decomposable(h(1), h(1), h(1), re(0.5)));
    assert!(finite_pair_decomposable(h(1), h(1), h(2), re(2.5)));
}

#[test]
fn chain_reproduces_half_table_alpha() {
    for (tl, rho) in [(1, c64(0.0, 0.3)), (2, re(0.25))] {
        for a in [1i8, -1] {
            let ch = cg4_chain(lab(tl, rho), h(1), a).unwrap();
            assert_eq!(ch.alpha.len(), 1);
            assert!((ch.alpha[0] + I * a as f64).norm() < 1e-12, "{:?}", ch.alpha);
        }
    }
}

#[test]
fn chain_tables_match_eigen_solve() {
    for (tl, rho) in [(1, c64(0.0, 0.3)), (2, c64(0.2, 0.7)), (0, re(2.5)), (-2, c64(0.3, -0.9))] {
        for tg in 1..=4 {
            for a in [1i8, -1] {
                let l = lab(tl, rho);
                let g = h(tg);
                let ch = match cg4_chain(l, g, a) {
                    Ok(c) => c,
                    Err(Error::NotDecomposable(_)) => {
                        assert!(!f4_decomposable(g, a, l.lambda, rho));
                        continue;
                    }
                    Err(e) => panic!("{e}"),
                };
                for k in 0..6 {
                    let bj = ch.j0 + h(2 * k);
                    let tab = ch.table(bj).unwrap();
                    let n = tab.js.len();
                    let orth = (tab.b.transpose() * &tab.b - CMat::identity(n, n)).camax();
                    assert!(orth < 1e-9, "{l} γ={g} A={a} J={bj}: {orth:e}");
                    let blk = casimir_block_on_vj(l, g, a, bj).unwrap();
                    let BlockReport::Diagonalizable(eig) = blk.report().unwrap() else { panic!() };
                    for (c, e) in eig.iter().enumerate() {
                        let want: Vec<C64> = tab.b.column(c).iter().copied().collect();
                        let err = align(e.vector.as_slice(), &want);
                        let scale = want.iter().map(|z| z.norm()).fold(1.0, f64::max);
                        assert!(err < 1e-9 * scale, "{l} γ={g} A={a} J={bj} ν={}: {err:e}", e.nu);
                    }
                }
                assert!(ch.table(ch.j0 - h(2)).is_err());
            }
        }
    }
}

fn js_labels() -> Vec<Rep4Label> {
    vec![
        lab(1, c64(0.0, 0.3)),
        lab(0, c64(0.2, 0.9)),
        lab(2, re(0.25)),
        lab(-3, c64(0.4, -1.1)),
        lab(4, c64(0.0, 2.5)),
    ]
}

#[test]
fn js_heisenberg_relations() {
    for l in js_labels() {
        let cut = l.j_min() + h(12);
        for b in all_basis(l, cut) {
            for a in [1i8, -1] {
                for bb in [1i8, -1] {
                    let delta = if a == bb { 1.0 } else { 0.0 };
                    let pairs = [
                        (JsOp4::t(a, true), JsOp4::tt(bb, false), delta),
                        (JsOp4::tt(a, true), JsOp4::t(bb, false), delta),
                        (JsOp4::t(a, false), JsOp4::tt(bb, true), -delta),
                        (JsOp4::tt(a, false), JsOp4::t(bb, true), -delta),
                        (JsOp4::t(a, true), JsOp4::tt(bb, true), 0.0),
                        (JsOp4::t(a, false), JsOp4::tt(bb, false), 0.0),
                    ];
                    for (x, y, d) in pairs {
                        let c = js(x, &js(y, &b)).minus(&js(y, &js(x, &b)));
                        let r = c.minus(&b.scaled(re(d))).interior_max();
                        assert!(r <= 1e-12, "{l} [{x}, {y}]: {r:e}");
                    }
                    for p in [true, false] {
                        for q in [true, false] {
                            for tilde in [false, true] {
                                let x = JsOp4 { tilde, a, plus: p };
                                let y = JsOp4 { tilde, a: bb, plus: q };
                                let c = js(x, &js(y, &b)).minus(&js(y, &js(x, &b)));
                                assert!(c.interior_max() <= 1e-12, "{l} [{x}, {y}]");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn js_reconstructs_generators() {
    for l in js_labels() {
        let cut = l.j_min() + h(12);
        for b in all_basis(l, cut) {
            for a in [1i8, -1] {
                let ia = I * a as f64;
                let m = |j: Generator4, k: Generator4| {
                    apply(j, &b).minus(&apply(k, &b).scaled(ia)).scaled(re(0.5))
                };
                let mp = js(JsOp4::t(a, true), &js(JsOp4::tt(a, true), &b));
                let mm = js(JsOp4::t(a, false), &js(JsOp4::tt(a, false), &b)).scaled(re(-1.0));
                let m0 = js(JsOp4::t(a, false), &js(JsOp4::tt(a, true), &b))
                    .plus(&js(JsOp4::t(a, true), &js(JsOp4::tt(a, false), &b)))
                    .scaled(re(-0.5));
                for (got, want) in [(mp, m(Jplus, Kplus)), (mm, m(Jminus, Kminus)), (m0, m(J0, K0))] {
                    let r = got.minus(&want).interior_max();
                    assert!(r <= 1e-12, "{l} A={a}: {r:e}");
                }
            }
        }
    }
}

#[test]
fn js_unsupported_labels() {
    let cut = h(8);
    for l in [lab(0, re(0.0)), lab(2, re(1.0)), lab(2, re(-1.0)), lab(2, re(2.0)), lab(2, re(-2.0))] {
        let cut = SU2TowerState::default_cut(&l).min(cut);
        let s = SU2TowerState::basis(l, cut, l.j_min(), l.j_min()).unwrap();
        assert!(matches!(js4_apply(JsOp4::t(1, true), &s), Err(Error::UnsupportedLabel(_))), "{l}");
    }
    let s = SU2TowerState::basis(lab(1, re(0.3)), h(7), h(1), h(1)).unwrap();
    assert!(js4_apply(JsOp4::t(2, true), &s).is_err());
}

#[test]
fn js_label_shifts() {
    let l = lab(1, c64(0.1, 0.3));
    let s = SU2TowerState::basis(l, h(9), h(3), h(1)).unwrap();
    let t = js(JsOp4::t(1, true), &s);
    assert_eq!(t.label.lambda, h(0));
    assert!((t.label.rho - c64(-0.4, 0.3)).norm() < 1e-15);
    assert_eq!(t.j_cut, h(10));
    let tt = js(JsOp4::tt(-1, false), &s);
    assert_eq!(tt.label.lambda, h(2));
    assert!((tt.label.rho - c64(-0.4, 0.3)).norm() < 1e-15);
    assert_eq!(JsOp4::parse("Tt-", 1), Some(JsOp4::tt(1, false)));
    assert_eq!(JsOp4::parse("T+", -1), Some(JsOp4::t(-1, true)));
    assert_eq!(JsOp4::parse("X+", 1), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn commutators_hold_for_random_labels(tl in -4i64..=4, re_r in -2.0f64..2.0, im_r in -2.0f64..2.0) {
        let l = lab(tl, c64(re_r, im_r));
        prop_assume!(!l.is_finite());
        let r = commutation_residual(l, l.j_min() + h(8));
        prop_assert!(r <= 1e-10, "{} {:e}", l, r);
        let c = casimir_residual(l, l.j_min() + h(8));
        prop_assert!(c <= 1e-10, "{} {:e}", l, c);
    }

    #[test]
    fn casimir_blocks_are_complex_symmetric(tl in -3i64..=3, tg in 1i64..=4, a in prop::sample::select(vec![1i8, -1]),
                                            re_r in -2.0f64..2.0, im_r in 0.1f64..2.0, k in 0i64..5) {
        let l = lab(tl, c64(re_r, im_r));
        let g = h(tg);
        let bj = j_support_min(l.lambda, g) + h(2 * k);
        let b = casimir_block_on_vj(l, g, a, bj).unwrap();
        for t in [&b.c1, &b.c2] {
            let d = t.to_dense();
            prop_assert!((d.transpose() - &d).camax() <= 1e-12 * d.camax().max(1.0));
        }
        let m1 = b.c1.to_dense();
        let m2 = b.c2.to_dense();
        prop_assert!((&m1 * &m2 - &m2 * &m1).camax() <= 1e-11 * m1.camax().max(1.0) * m2.camax().max(1.0));
    }
}

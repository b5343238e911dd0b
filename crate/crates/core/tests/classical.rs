use nalgebra::Matrix2;
use num_complex::Complex;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinnet::classical::*;
use spinnet::lqg::Bracket;
use spinnet::numeric::C64;

type P = PoissonPolynomial;

fn c(re: i64, im: i64) -> Coef {
    Complex::new(Rational64::from_integer(re), Rational64::from_integer(im))
}

fn minus_i(p: &P) -> P {
    p.scale(c(0, -1))
}

fn delta(a: u16, b: u16) -> Coef {
    c((a == b) as i64, 0)
}

#[test]
fn generator_brackets() {
    use Component::*;
    let g = |l, x| Gen::new(l, x);
    assert_eq!(generator_bracket(g(1, Plus), g(1, TildeMinus)), c(0, -1));
    assert_eq!(generator_bracket(g(1, TildePlus), g(1, Minus)), c(0, -1));
    assert_eq!(generator_bracket(g(1, TildeMinus), g(1, Plus)), c(0, 1));
    assert_eq!(generator_bracket(g(1, Plus), g(2, TildeMinus)), c(0, 0));
    assert_eq!(generator_bracket(g(1, Plus), g(1, TildePlus)), c(0, 0));
    assert_eq!(generator_bracket(g(1, Minus), g(1, Plus)), c(0, 0));
}

/// Dequantising `[J0, J±] = ±J±`, `[J+, J-] = -2J0` with `[·,·] → i{·,·}`.
#[test]
fn flux_algebra() {
    let x0 = x0(1);
    let (xp, xm) = (x_pm(1, 1), x_pm(1, -1));
    assert_eq!(bracket(&x0, &xp), xp.scale(c(0, -1)));
    assert_eq!(bracket(&x0, &xm), xm.scale(c(0, 1)));
    assert_eq!(bracket(&xp, &xm), x0.scale(c(0, 2)));
}

#[test]
fn flux_from_sigma_matrices() {
    let [a0, a1, a2] = flux(3);
    let (xp, xm) = (x_pm(3, 1), x_pm(3, -1));
    let half = Complex::new(Rational64::new(1, 2), Rational64::from_integer(0));
    assert_eq!(a0, x0(3));
    assert_eq!(a1, xp.add(&xm).scale(half));
    // (x+ - x-) / 2i = -i (x+ - x-) / 2
    assert_eq!(a2, xp.sub(&xm).scale(half * c(0, -1)));
}

#[test]
fn observables_close_under_brackets() {
    let legs = [1u16, 2, 3];
    for &a in &legs {
        for &b in &legs {
            for &cc in &legs {
                for &d in &legs {
                    let lhs = bracket(&e(a, b), &e(cc, d));
                    let rhs = minus_i(&e(a, d).scale(delta(cc, b)).sub(&e(cc, b).scale(delta(a, d))));
                    assert_eq!(lhs, rhs, "{{e{a}{b}, e{cc}{d}}}");

                    let lhs = bracket(&e(a, b), &f(cc, d));
                    let rhs = minus_i(&f(b, cc).scale(delta(a, d)).sub(&f(b, d).scale(delta(a, cc))));
                    assert_eq!(lhs, rhs, "{{e{a}{b}, f{cc}{d}}}");

                    let lhs = bracket(&e(a, b), &ft(cc, d));
                    let rhs = minus_i(&ft(a, d).scale(delta(b, cc)).sub(&ft(a, cc).scale(delta(b, d))));
                    assert_eq!(lhs, rhs, "{{e{a}{b}, ft{cc}{d}}}");

                    let lhs = bracket(&f(a, b), &ft(cc, d));
                    let rhs = minus_i(
                        &e(cc, a)
                            .scale(delta(d, b))
                            .add(&e(d, b).scale(delta(cc, a)))
                            .sub(&e(d, a).scale(delta(cc, b)))
                            .sub(&e(cc, b).scale(delta(d, a))),
                    );
                    assert_eq!(lhs, rhs, "{{f{a}{b}, ft{cc}{d}}}");

                    assert!(bracket(&f(a, b), &f(cc, d)).is_zero());
                    assert!(bracket(&ft(a, b), &ft(cc, d)).is_zero());
                }
            }
        }
    }
}

#[test]
fn tilde_e_is_minus_transposed_e() {
    for (a, b) in [(1, 2), (2, 1), (3, 3)] {
        assert_eq!(et(a, b), e(b, a).scale(c(-1, 0)));
    }
}

#[test]
fn f_ft_minus_e_et_is_product_of_norms() {
    for (cc, a) in [(2, 3), (4, 2), (1, 1)] {
        let lhs = f(cc, a).mul(&ft(cc, a)).sub(&e(cc, a).mul(&et(cc, a)));
        let rhs = e(a, a).mul(&e(cc, cc));
        assert_eq!(lhs, rhs, "{cc}{a}");
    }
}

fn poly_strategy() -> impl Strategy<Value = P> {
    let term = (
        -3i64..=3,
        -3i64..=3,
        prop::collection::vec((1u16..=2, 0usize..4), 1..=3),
    );
    prop::collection::vec(term, 1..5).prop_map(|terms| {
        let mut p = P::zero();
        for (re, im, gens) in terms {
            let mut m = P::constant(c(re, im));
            for (leg, k) in gens {
                m = m.mul(&P::var(leg, Component::ALL[k]));
            }
            p = p.add(&m);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(a in poly_strategy(), b in poly_strategy(), d in poly_strategy()) {
        prop_assert!(bracket(&a, &b).add(&bracket(&b, &a)).is_zero());
        let j = bracket(&a, &bracket(&b, &d))
            .add(&bracket(&b, &bracket(&d, &a)))
            .add(&bracket(&d, &bracket(&a, &b)));
        prop_assert!(j.is_zero(), "{}", j);
    }

    #[test]
    fn bracket_obeys_leibniz(a in poly_strategy(), b in poly_strategy(), d in poly_strategy()) {
        let lhs = bracket(&a, &b.mul(&d));
        let rhs = bracket(&a, &b).mul(&d).add(&b.mul(&bracket(&a, &d)));
        prop_assert_eq!(lhs, rhs);
    }
}

fn rc(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random pair with `Re ⟨τ|τ⟩ > 0`, so the principal root of `⟨τ|τ⟩²` is
/// `⟨τ|τ⟩` itself.
fn random_pair(rng: &mut ChaCha8Rng) -> SpinorPair {
    let mut p = SpinorPair::new([rc(rng), rc(rng)], [rc(rng), rc(rng)]);
    if p.norm().re < 0.0 {
        p.tilde = [-p.tilde[0], -p.tilde[1]];
    }
    p
}

/// Random target pair satisfying the matching constraint with `tau`.
fn matched(rng: &mut ChaCha8Rng, tau: &SpinorPair) -> SpinorPair {
    let w = SpinorPair::new([rc(rng), rc(rng)], [rc(rng), rc(rng)]);
    w.scaled_ket(tau.norm() / w.norm())
}

fn random_face(rng: &mut ChaCha8Rng) -> FaceSpinors {
    let tau = [random_pair(rng), random_pair(rng), random_pair(rng)];
    let w = [matched(rng, &tau[0]), matched(rng, &tau[1]), matched(rng, &tau[2])];
    FaceSpinors { edges: [2, 3, 4], tau, w }
}

fn max_abs(m: &Matrix2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn holonomy_numerator_determinant_is_product_of_norms() {
    let n = holonomy_numerator(1, 2);
    let det = n[0][0].mul(&n[1][1]).sub(&n[0][1].mul(&n[1][0]));
    assert_eq!(det, e(1, 1).mul(&e(2, 2)));
}

#[test]
fn holonomy_has_unit_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let (t, w) = (random_pair(&mut rng), random_pair(&mut rng));
        let g = holonomy(&t, &w).unwrap();
        assert!((g.determinant() - 1.0).norm() < 1e-14 * max_abs(&g).powi(2).max(1.0));
        for s in [1.0, -1.0] {
            let t = SpinorPair::bound([rc(&mut rng), rc(&mut rng)], s);
            let w = SpinorPair::bound([rc(&mut rng), rc(&mut rng)], s);
            let g = holonomy(&t, &w).unwrap();
            assert!((g.determinant() - 1.0).norm() < 1e-14 * max_abs(&g).powi(2).max(1.0));
        }
    }
}

#[test]
fn holonomy_transports_spinors() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let t = random_pair(&mut rng);
        let w = matched(&mut rng, &t);
        let g = holonomy(&t, &w).unwrap();
        let gi = holonomy_inverse(&t, &w).unwrap();
        let err = |a: [C64; 2], b: [C64; 2]| (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
        let s = max_abs(&g) * 4.0;
        assert!(err(apply(&g, t.ket()), w.ket()) < 1e-14 * s);
        assert!(err(apply(&g, t.ket_t()), w.ket_t()) < 1e-14 * s);
        assert!(err(apply_bra(w.bra(), &g), t.bra()) < 1e-14 * s);
        assert!(err(apply_bra(w.bra_t(), &g), t.bra_t()) < 1e-14 * s);
        assert!(err(apply(&gi, w.ket()), t.ket()) < 1e-14 * s);
        assert!(err(apply(&gi, w.ket_t()), t.ket_t()) < 1e-14 * s);
        assert!(err(apply_bra(t.bra(), &gi), w.bra()) < 1e-14 * s);
        assert!(err(apply_bra(t.bra_t(), &gi), w.bra_t()) < 1e-14 * s);
        assert!(max_abs(&(g * gi - Matrix2::identity())) < 1e-13 * s * s);
    }
}

#[test]
fn lorentzian_binding_gives_su11_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 50 {
        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let t = SpinorPair::bound([rc(&mut rng), rc(&mut rng)], s);
        let w = SpinorPair::bound([rc(&mut rng), rc(&mut rng)], s);
        // The principal root is real only when the norms have the same sign.
        if (t.norm() * w.norm()).re <= 0.0 {
            continue;
        }
        let g = holonomy(&t, &w).unwrap();
        assert!((g[(0, 0)] - g[(1, 1)].conj()).norm() < 1e-13 * max_abs(&g));
        assert!((g[(0, 1)] - g[(1, 0)].conj()).norm() < 1e-13 * max_abs(&g));
        checked += 1;
    }
}

#[test]
fn euclidean_binding_gives_su2_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let t = SpinorPair::euclidean([rc(&mut rng), rc(&mut rng)]);
        let w = SpinorPair::euclidean([rc(&mut rng), rc(&mut rng)]);
        assert!(t.norm().re > 0.0 && t.norm().im.abs() < 1e-15);
        let g = holonomy(&t, &w).unwrap();
        assert!((g[(1, 1)] - g[(0, 0)].conj()).norm() < 1e-14);
        assert!((g[(1, 0)] + g[(0, 1)].conj()).norm() < 1e-14);
        assert!((g.determinant() - 1.0).norm() < 1e-14);
    }
}

#[test]
fn reality_binding_relates_f_and_ft() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // f̃_ab = -s_a s_b conj(f_ab) for τ̃± = s conj(τ∓) on each leg.
    for (sa, sb, want) in [(1.0, 1.0, -1.0), (-1.0, -1.0, -1.0), (1.0, -1.0, 1.0), (-1.0, 1.0, 1.0)] {
        let pa = SpinorPair::bound([rc(&mut rng), rc(&mut rng)], sa);
        let pb = SpinorPair::bound([rc(&mut rng), rc(&mut rng)], sb);
        let val = |g: Gen| if g.leg == 1 { pa.get(g.comp) } else { pb.get(g.comp) };
        let fv = f(1, 2).eval(&val);
        let ftv = ft(1, 2).eval(&val);
        assert!((ftv - fv.conj() * want).norm() < 1e-14, "{sa} {sb}");
    }
}

#[test]
fn zero_norm_is_reported() {
    let t = SpinorPair::new([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
    let w = SpinorPair::new([C64::new(1.0, 0.0), C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    assert!(holonomy(&t, &w).is_err());
}

#[test]
fn observable_forms_match_the_holonomy_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let face = random_face(&mut rng);
        for [a, b, cc] in [[3, 4, 2], [4, 2, 3], [2, 3, 4]] {
            for (br, h) in classical_hamiltonians(a, b, cc) {
                let direct = face.hamiltonian_direct(br, a, b, cc).unwrap();
                let obs = h.eval(&|g| face.value(g)).unwrap();
                let scale = direct.norm().max(obs.norm()).max(1.0);
                assert!((direct - obs).norm() < 1e-12 * scale, "{br:?}{a}{b}{cc}: {direct} vs {obs}");
            }
        }
    }
}

#[test]
fn trace_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let face = random_face(&mut rng);
        for [a, b, cc] in [[3, 4, 2], [4, 2, 3], [2, 3, 4]] {
            let (lhs, rhs) = face.trace_identity_sides(a, b, cc).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn flat_faces_satisfy_all_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        // Edges (a, b, c) = (3, 4, 2); choose g_c = g_a⁻¹ g_b so that
        // g_c g_b⁻¹ g_a = 1.
        let mut face = random_face(&mut rng);
        let (ga, gb) = (face.holonomy(3).unwrap(), face.holonomy(4).unwrap());
        let gc = ga.try_inverse().unwrap() * gb;
        let tc = face.tau[0];
        face.w[0] = SpinorPair::new(apply(&gc, tc.ket()), apply(&gc, tc.ket_t()));
        assert!(max_abs(&(face.holonomy(2).unwrap() - gc)) < 1e-12 * max_abs(&gc));
        assert!(max_abs(&(face.face_holonomy(3, 4, 2).unwrap() - Matrix2::identity())) < 1e-11);
        for (br, h) in classical_hamiltonians(3, 4, 2) {
            let v = h.eval(&|g| face.value(g)).unwrap();
            let scale = h.lead.eval(&|g| face.value(g)).norm().max(1.0);
            assert!(v.norm() < 1e-11 * scale, "{br:?}: {v}");
        }
    }
}

#[test]
fn bracket_tags_cover_all_four_constraints() {
    let tags: Vec<_> = classical_hamiltonians(3, 4, 2).iter().map(|(b, _)| *b).collect();
    assert_eq!(tags, Bracket::ALL.to_vec());
}

#[test]
fn pretty_printer() {
    assert_eq!(x_pm(1, 1).to_string(), "(0+1i)·t+1·tt+1");
    assert_eq!(P::zero().to_string(), "0");
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinnet::fock::{
    e_op, exp_e, exp_nilpotent, exp_truncated, f_of, f_op, ft_op, half_ft, invariant_count, occ,
    oracle_moments, Expectation, FockOracle, FockVec, FramedOracle, Poly,
};
use spinnet::numeric::{conj, det, max_abs, re};
use spinnet::sostar::*;
use spinnet::{CMat, Error, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

fn random_element(n: usize, radius: f64, seed: u64) -> SOStarElement {
    let mut r = rng(seed);
    let z = DomainPoint::random(n, radius, &mut r).unwrap();
    let k = SOStarElement::compact(&random_unitary(n, &mut r));
    k.compose(&g_zeta(&z).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn crel(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(1e-300)
}

/// Enough shells that `x^J J²` drops below `eps` with `x = ½ tr ζ*ζ`.
fn shells_for(z: &DomainPoint, eps: f64) -> usize {
    let x = 0.5 * z.zeta_star_zeta().trace().re;
    let mut j = 4;
    while x.powi(j as i32) * (j * j) as f64 > eps {
        j += 1;
    }
    j
}

#[test]
fn g_zeta_is_a_group_element_mapping_origin_to_zeta() {
    let mut r = rng(1);
    for n in 2..=5 {
        for _ in 0..5 {
            let z = DomainPoint::random(n, 0.9, &mut r).unwrap();
            let g = g_zeta(&z).unwrap();
            assert!(g.membership_residual() < 1e-12);
            assert!(group_residual(&g.matrix()) < 1e-12);
            let image = g.act(&DomainPoint::origin(n)).unwrap();
            assert!(max_abs(&(&image.zeta - &z.zeta)) < 1e-12);
        }
    }
}

#[test]
fn inverse_and_composition_stay_in_the_group() {
    for seed in 0..6 {
        let g = random_element(4, 0.8, seed);
        let h = random_element(4, 0.5, seed + 100);
        let gh = g.compose(&h);
        assert!(gh.membership_residual() < 1e-11);
        let id = g.compose(&g.inverse());
        assert!(max_abs(&(id.matrix() - eye(8))) < 1e-12);
        let roundtrip = SOStarElement::from_matrix(&gh.matrix()).unwrap();
        assert_eq!(roundtrip, gh);
    }
}

#[test]
fn from_matrix_rejects_wrong_block_pattern() {
    let mut m = SOStarElement::identity(2).matrix();
    m[(3, 3)] = re(2.0);
    assert!(SOStarElement::from_matrix(&m).is_err());
    assert!(SOStarElement::from_matrix(&CMat::zeros(3, 3)).is_err());
}

#[test]
fn action_preserves_the_domain_and_is_a_left_action() {
    let mut r = rng(7);
    for seed in 0..8 {
        let z = DomainPoint::random(4, 0.85, &mut r).unwrap();
        let g = random_element(4, 0.7, seed);
        let h = random_element(4, 0.6, seed + 50);
        let gz = g.act(&z).unwrap();
        let lhs = g.compose(&h).act(&z).unwrap();
        let rhs = g.act(&h.act(&z).unwrap()).unwrap();
        assert!(max_abs(&(&gz.zeta + gz.zeta.transpose())) < 1e-12);
        assert!(max_abs(&(lhs.zeta - rhs.zeta)) < 1e-11);
    }
}

#[test]
fn compact_elements_act_by_congruence() {
    let mut r = rng(11);
    let z = DomainPoint::random(5, 0.8, &mut r).unwrap();
    let u = random_unitary(5, &mut r);
    assert!(max_abs(&(u.adjoint() * &u - eye(5))) < 1e-12);
    let k = SOStarElement::compact(&u);
    assert!(k.membership_residual() < 1e-12);
    let w = k.act(&z).unwrap();
    assert!(max_abs(&(w.zeta - &u * &z.zeta * u.transpose())) < 1e-12);
}

#[test]
fn domain_point_validation() {
    let sym = CMat::from_row_slice(2, 2, &[re(0.0), re(0.3), re(0.3), re(0.0)]);
    assert!(matches!(DomainPoint::new(sym), Err(Error::NotAntisymmetric(_))));
    let big = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(-1.0), re(0.0)]);
    assert!(matches!(DomainPoint::new(big), Err(Error::OutsideDomain(_))));
    assert!(matches!(DomainPoint::new(CMat::zeros(2, 3)), Err(Error::NotSquare(2, 3))));
    let z = DomainPoint::random(6, 0.5, &mut rng(3)).unwrap();
    let canon = z.canonical().unwrap();
    assert!(canon.lambdas.iter().all(|l| *l <= 0.5 + 1e-12));
    assert_eq!(z.rank().unwrap(), 6);
    assert_eq!(DomainPoint::random_rank2(5, 0.8, &mut rng(4)).unwrap().rank().unwrap(), 2);
    assert_eq!(DomainPoint::origin(3).rank().unwrap(), 0);
}

#[test]
fn udl_reconstructs_group_elements() {
    for n in 2..=5 {
        for seed in 0..5 {
            let g = random_element(n, 0.9, 31 * n as u64 + seed);
            let f = udl_decompose(&g).unwrap();
            assert!(max_abs(&(f.reconstruct() - g.matrix())) < 1e-12);
            assert!(max_abs(&(&f.alpha + f.alpha.transpose())) < 1e-12);
            assert!(max_abs(&(&f.beta + f.beta.transpose())) < 1e-12);
            // individual factors are not in the real form once B ≠ 0
            assert!(group_residual(&f.upper()) > 1e-3);
            assert!(group_residual(&f.lower()) > 1e-3);
            // α = g(0)
            let origin_image = g.act(&DomainPoint::origin(n)).unwrap();
            assert!(max_abs(&(&f.alpha - origin_image.zeta)) < 1e-12);
        }
    }
}

#[test]
fn udl_of_identity_is_trivial() {
    let f = udl_decompose(&SOStarElement::identity(3)).unwrap();
    assert_eq!(max_abs(&f.alpha), 0.0);
    assert_eq!(max_abs(&f.beta), 0.0);
    assert_eq!(max_abs(&(f.e_l - eye(3))), 0.0);
}

#[test]
fn vacuum_factor_of_g_zeta_is_the_normalisation() {
    let mut r = rng(5);
    for n in 2..=5 {
        let z = DomainPoint::random(n, 0.9, &mut r).unwrap();
        let f = udl_decompose(&g_zeta(&z).unwrap()).unwrap();
        let v = f.vacuum_factor();
        assert!((v - re(z.normalisation())).norm() < 1e-12);
        assert!(max_abs(&(f.alpha - &z.zeta)) < 1e-12);
    }
}

#[test]
fn inner_product_basic_properties() {
    let mut r = rng(9);
    for n in 2..=5 {
        let z = DomainPoint::random(n, 0.9, &mut r).unwrap();
        let w = DomainPoint::random(n, 0.9, &mut r).unwrap();
        assert!((inner_product(&z, &z) - re(1.0)).norm() < 1e-12);
        assert!(inner_product(&w, &z).norm() < 1.0);
        assert!((inner_product(&w, &z) - inner_product(&z, &w).conj()).norm() < 1e-13);
        let o = DomainPoint::origin(n);
        assert!((inner_product(&o, &z) - re(z.normalisation())).norm() < 1e-13);
    }
}

#[test]
fn inner_product_matches_fock_overlap() {
    let mut r = rng(13);
    for n in [2, 3] {
        for _ in 0..3 {
            let z = DomainPoint::random(n, 0.5, &mut r).unwrap();
            let w = DomainPoint::random(n, 0.5, &mut r).unwrap();
            let j = shells_for(&z, 1e-14).max(shells_for(&w, 1e-14));
            let mut bra = FockOracle::new(&w.zeta, j).unwrap();
            let ket = FockOracle::new(&z.zeta, j).unwrap();
            let o = bra.overlap(&ket);
            assert!((o - inner_product(&w, &z)).norm() < 1e-10, "{o} vs {}", inner_product(&w, &z));
        }
    }
}

#[test]
fn fock_norm_matches_closed_form() {
    let mut r = rng(17);
    let z = DomainPoint::random(3, 0.5, &mut r).unwrap();
    let j = shells_for(&z, 1e-15);
    let o = FockOracle::new(&z.zeta, j).unwrap();
    let n2 = z.normalisation().powi(2);
    assert!(rel(o.norm_sq() * n2, 1.0) < 1e-12);
    assert!(o.tail_factor() < 1e-12);
}

#[test]
fn generator_elements_at_the_origin() {
    let o = DomainPoint::origin(4);
    let m = generator_matrix_elements(&o, &o).unwrap();
    assert_eq!(max_abs(&(m.e - eye(4))), 0.0);
    assert_eq!(max_abs(&m.f), 0.0);
    assert_eq!(max_abs(&m.ft), 0.0);
}

#[test]
fn generator_elements_antisymmetry() {
    let mut r = rng(19);
    let z = DomainPoint::random(5, 0.8, &mut r).unwrap();
    let w = DomainPoint::random(5, 0.8, &mut r).unwrap();
    let m = generator_matrix_elements(&w, &z).unwrap();
    assert!(max_abs(&(&m.f + m.f.transpose())) < 1e-12);
    assert!(max_abs(&(&m.ft + m.ft.transpose())) < 1e-12);
    // ⟨ζ|F̃|ζ⟩ = conj⟨ζ|F|ζ⟩
    let d = generator_matrix_elements(&z, &z).unwrap();
    assert!(max_abs(&(d.ft - conj(&d.f))) < 1e-12);
    assert!(max_abs(&(&d.e - d.e.adjoint())) < 1e-12);
}

#[test]
fn generator_elements_match_fock_oracle_off_diagonal() {
    let mut r = rng(23);
    for n in [2, 3] {
        let z = DomainPoint::random(n, 0.5, &mut r).unwrap();
        let w = DomainPoint::random(n, 0.5, &mut r).unwrap();
        let j = shells_for(&z, 1e-14).max(shells_for(&w, 1e-14));
        let mut bra = FockOracle::new(&w.zeta, j).unwrap();
        let ket = FockOracle::new(&z.zeta, j).unwrap();
        let ov = bra.overlap(&ket);
        let m = generator_matrix_elements(&w, &z).unwrap();
        for a in 0..n {
            for b in 0..n {
                let e = bra.matrix_element(&e_op(a, b), &ket) / ov;
                let f = bra.matrix_element(&f_op(a, b), &ket) / ov;
                let ft = bra.matrix_element(&ft_op(a, b), &ket) / ov;
                assert!((e - m.e[(a, b)]).norm() < 1e-9, "E {a}{b}: {e} vs {}", m.e[(a, b)]);
                assert!((f - m.f[(a, b)]).norm() < 1e-9, "F {a}{b}: {f} vs {}", m.f[(a, b)]);
                assert!((ft - m.ft[(a, b)]).norm() < 1e-9, "F̃ {a}{b}: {ft} vs {}", m.ft[(a, b)]);
            }
        }
    }
}

fn so_star_commutator_expected(
    kind: (char, char),
    (a, b): (usize, usize),
    (c, d): (usize, usize),
) -> Poly<i64> {
    let dl = |x: usize, y: usize| i64::from(x == y);
    let mut p = Poly::zero();
    let mut add = |k: i64, q: Poly<i64>| {
        if k != 0 {
            p = std::mem::replace(&mut p, Poly::zero()).plus(&q.scaled(k));
        }
    };
    match kind {
        ('E', 'E') => {
            add(dl(c, b), e_op(a, d));
            add(-dl(a, d), e_op(c, b));
        }
        ('E', 'T') => {
            add(dl(b, c), ft_op(a, d));
            add(-dl(b, d), ft_op(a, c));
        }
        ('E', 'F') => {
            add(dl(a, d), f_op(b, c));
            add(-dl(a, c), f_op(b, d));
        }
        ('F', 'T') => {
            add(dl(d, b), e_op(c, a));
            add(dl(c, a), e_op(d, b));
            add(-dl(c, b), e_op(d, a));
            add(-dl(d, a), e_op(c, b));
        }
        _ => {}
    }
    p
}

fn op(kind: char, a: usize, b: usize) -> Poly<i64> {
    match kind {
        'E' => e_op(a, b),
        'F' => f_op(a, b),
        _ => ft_op(a, b),
    }
}

#[test]
fn fock_generators_satisfy_the_so_star_algebra_exactly() {
    let n = 3;
    let states: Vec<FockVec<i64>> = [
        occ(&[0, 0, 0], &[0, 0, 0]),
        occ(&[1, 0, 2], &[0, 1, 0]),
        occ(&[2, 1, 0], &[1, 0, 3]),
        occ(&[0, 3, 1], &[2, 2, 1]),
    ]
    .iter()
    .map(|k| FockVec::basis(n, *k, 1))
    .collect();
    let pairs = [('E', 'E'), ('E', 'T'), ('E', 'F'), ('F', 'T'), ('F', 'F'), ('T', 'T')];
    for (x, y) in pairs {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lhs = op(x, a, b).commutator(&op(y, c, d));
                        let rhs = so_star_commutator_expected((x, y), (a, b), (c, d));
                        for s in &states {
                            let l = s.apply(&lhs).pruned();
                            let r = s.apply(&rhs).pruned();
                            assert_eq!(l, r, "[{x}{a}{b}, {y}{c}{d}]");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn lowering_generators_annihilate_the_vacuum() {
    let v = FockVec::<i64>::vacuum(4);
    for a in 0..4 {
        for b in 0..4 {
            assert!(v.apply(&f_op(a, b)).pruned().is_empty());
            let e = v.apply(&e_op(a, b)).pruned();
            if a == b {
                assert_eq!(e, v);
            } else {
                assert!(e.is_empty());
            }
        }
    }
}

#[test]
fn highest_weight_vectors_of_fixed_area() {
    let n = 4;
    for j in 0..=4usize {
        let mut psi = FockVec::<i64>::vacuum(n);
        for _ in 0..j {
            psi = psi.apply(&ft_op(0, 1)).pruned();
        }
        let to_c = |v: &FockVec<i64>| {
            let mut out = FockVec::<C64>::zero(n);
            for (k, c) in v.iter() {
                out.add_scaled(&FockVec::basis(n, *k, re(*c as f64)), re(1.0));
            }
            out
        };
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        assert!(rel(to_c(&psi).norm_sq(), fact * fact * (j + 1) as f64) < 1e-12);
        for a in 0..n {
            for b in 0..n {
                let e = psi.apply(&e_op(a, b)).pruned();
                if a < b {
                    assert!(e.is_empty(), "E_{a}{b} J={j}");
                } else if a == b {
                    let w = if a < 2 { j as i64 + 1 } else { 1 };
                    assert_eq!(e, psi.scaled(w));
                }
            }
        }
    }
}

#[test]
fn intertwiner_dimensions_three_ways() {
    for n in 2..=4 {
        for j in 0..=6 {
            let hw = intertwiner_highest_weight(n, j);
            let closed = intertwiner_dimension(n, j);
            assert_eq!(u_n_dimension(&hw), closed, "n={n} J={j}");
            assert_eq!(hook_length_dimension(&hw), closed, "n={n} J={j}");
            assert_eq!(invariant_count(n, j) as u64, closed, "n={n} J={j}");
        }
    }
}

#[test]
fn area_statistics_at_origin_vanish() {
    let s = area_statistics(&DomainPoint::origin(4));
    assert!(s.means.iter().chain(&s.variances).all(|x| *x == 0.0));
    assert_eq!(s.total_variance, 0.0);
    assert_eq!(s.total_mean, 0.0);
}

#[test]
fn rank2_area_statistics_closed_forms() {
    for n in 2..=5 {
        let z = DomainPoint::random_rank2(n, 0.8, &mut rng(n as u64)).unwrap();
        let s = area_statistics(&z);
        assert!((s.total_mean - 4.0 / 3.0).abs() < 1e-12);
        assert!((s.total_variance - 20.0 / 9.0).abs() < 1e-12);
        let p = rank2_distribution(&z, 400).unwrap();
        let (m, v) = distribution_moments(&p);
        assert!((m - 4.0 / 3.0).abs() < 1e-10);
        assert!((v - 20.0 / 9.0).abs() < 1e-10);
    }
}

#[test]
fn rank2_distribution_values() {
    let p = rank2_distribution_for_trace(0.8, 400).unwrap();
    assert!((p[0] - 0.36).abs() < 1e-14);
    assert!((p[1] - 0.288).abs() < 1e-14);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(rank2_distribution_for_trace(2.0, 3).is_err());
    let z = DomainPoint::random(4, 0.5, &mut rng(2)).unwrap();
    assert!(matches!(rank2_distribution(&z, 3), Err(Error::NotRank2(4))));
}

#[test]
fn rank2_distribution_matches_fock_shells() {
    for n in [2, 3] {
        let z = DomainPoint::random_rank2(n, 0.8, &mut rng(40 + n as u64)).unwrap();
        let p = rank2_distribution(&z, 20).unwrap();
        let o = FockOracle::new(&z.zeta, 20).unwrap();
        let d = z.normalisation().powi(2);
        for (j, pj) in p.iter().enumerate() {
            let fact: f64 = (1..=j).map(|i| i as f64).product();
            let oracle = d * o.shell_norm_sq(j) / (fact * fact);
            assert!((oracle - pj).abs() < 1e-10, "J={j}: {oracle} vs {pj}");
            // ⟨J,ζ|J,ζ⟩ = J!(J+1)!(½ tr ζ*ζ)^J
            let closed = fact * fact * (j + 1) as f64 * 0.4f64.powi(j as i32);
            assert!(rel(o.shell_norm_sq(j), closed) < 1e-10);
        }
    }
}

#[test]
fn area_statistics_match_direct_oracle() {
    let mut r = rng(29);
    for n in [2, 3] {
        for _ in 0..2 {
            let z = DomainPoint::random(n, 0.5, &mut r).unwrap();
            let mut o = FockOracle::new(&z.zeta, shells_for(&z, 1e-14)).unwrap();
            check_moments(&z, &mut o, 1e-8);
        }
    }
}

#[test]
fn area_statistics_match_framed_oracle() {
    let mut r = rng(31);
    for n in [3, 4] {
        for _ in 0..2 {
            let z = DomainPoint::random(n, 0.6, &mut r).unwrap();
            let mut o = FramedOracle::new(&z.zeta, 60).unwrap();
            check_moments(&z, &mut o, 1e-8);
        }
    }
}

#[test]
fn framed_and_direct_oracles_agree() {
    let z = DomainPoint::random(4, 0.3, &mut rng(37)).unwrap();
    let mut direct = FockOracle::new(&z.zeta, shells_for(&z, 1e-13)).unwrap();
    let mut framed = FramedOracle::new(&z.zeta, 40).unwrap();
    let a = oracle_moments(&mut direct);
    let b = oracle_moments(&mut framed);
    for k in 0..4 {
        assert!(rel(a.means[k], b.means[k]) < 1e-9);
        assert!(rel(a.variances[k], b.variances[k]) < 1e-9);
    }
    assert!(rel(a.total_variance, b.total_variance) < 1e-9);
    assert!(crel(&a.e, &b.e) < 1e-9);
    assert!(crel(&a.f, &b.f) < 1e-9);
}

fn check_moments<O: Expectation>(z: &DomainPoint, o: &mut O, tol: f64) {
    let s = area_statistics(z);
    let m = oracle_moments(o);
    let g = generator_matrix_elements(z, z).unwrap();
    for a in 0..z.n() {
        assert!(rel(m.means[a], s.means[a]) < tol, "mean {a}: {} vs {}", m.means[a], s.means[a]);
        assert!(rel(m.variances[a], s.variances[a]) < tol, "var {a}");
    }
    assert!(rel(m.total_variance, s.total_variance) < tol, "{} vs {}", m.total_variance, s.total_variance);
    assert!(crel(&m.e, &g.e) < tol);
    assert!(crel(&m.f, &g.f) < tol);
    assert!(crel(&m.ft, &g.ft) < tol);
}

#[test]
fn covariance_matches_statistics_and_oracle() {
    let z = DomainPoint::random(3, 0.5, &mut rng(41)).unwrap();
    let cov = area_covariance(&z);
    let s = area_statistics(&z);
    for a in 0..3 {
        assert!(rel(cov[(a, a)].re, s.variances[a]) < 1e-12);
    }
    let total: C64 = cov.iter().sum();
    assert!(rel(total.re, s.total_variance) < 1e-12);
    let mut o = FockOracle::new(&z.zeta, shells_for(&z, 1e-14)).unwrap();
    let area: Vec<_> = (0..3).map(|a| spinnet::fock::area_op(a, a)).collect();
    for a in 0..3 {
        for b in 0..3 {
            let ab = o.expect(&area[a].times(&area[b])).re;
            let c = ab - o.expect(&area[a]).re * o.expect(&area[b]).re;
            assert!((c - cov[(a, b)].re).abs() < 1e-9 * cov[(a, a)].re.max(1.0));
        }
    }
}

#[test]
fn coefficient_of_variation_bound() {
    let mut r = rng(43);
    for n in 2..=6 {
        for _ in 0..10 {
            let z = DomainPoint::random(n, 0.95, &mut r).unwrap();
            let s = area_statistics(&z);
            assert!(s.coefficient_of_variation <= s.cv_bound + 1e-12);
            let tr = z.sigma().trace().re;
            let lower = (tr * (tr - n as f64) / n as f64).sqrt() / (tr - n as f64);
            assert!(s.coefficient_of_variation >= lower - 1e-12);
        }
    }
}

#[test]
fn semiclassical_closure_and_rank2_norms() {
    let mut r = rng(47);
    for n in 2..=6 {
        let z = DomainPoint::random(n, 0.9, &mut r).unwrap();
        let sc = semiclassical_normals(&z).unwrap();
        assert!(sc.closure().iter().all(|c| c.abs() < 1e-12));
        let z2 = DomainPoint::random_rank2(n, 0.8, &mut r).unwrap();
        let sc2 = semiclassical_normals(&z2).unwrap();
        let s = area_statistics(&z2);
        for (norm, mean) in sc2.norms().iter().zip(&s.means) {
            assert!((norm - mean).abs() < 1e-10);
        }
        for (q, norm) in sc2.quarter_e_sq().iter().zip(sc2.norms()) {
            assert!((q - norm * norm).abs() < 1e-12);
        }
    }
}

#[test]
fn semiclassical_generators_reproduce_expectations() {
    let mut r = rng(53);
    for n in 2..=5 {
        let z = DomainPoint::random(n, 0.8, &mut r).unwrap();
        let sc = semiclassical_normals(&z).unwrap();
        let g = generator_matrix_elements(&z, &z).unwrap();
        assert!(max_abs(&(sc.e() - (&g.e - eye(n)))) < 1e-12);
        assert!(max_abs(&(sc.f() - &g.f)) < 1e-12);
        assert!(max_abs(&(sc.ft() - &g.ft)) < 1e-12);
    }
    let sc = semiclassical_normals(&DomainPoint::origin(4)).unwrap();
    assert!(sc.spinors.is_empty());
    assert!(sc.normals.iter().flatten().all(|x| *x == 0.0));
}

#[test]
fn bogoliubov_embedding() {
    let id = bogoliubov_embed(&SOStarElement::identity(3));
    assert_eq!(id.residual(), 0.0);
    assert_eq!(max_abs(&id.squeeze().unwrap()), 0.0);
    let mut r = rng(59);
    for n in 2..=4 {
        let z = DomainPoint::random(n, 0.8, &mut r).unwrap();
        let g = g_zeta(&z).unwrap();
        assert!(bogoliubov_embed(&g).residual() < 1e-12);
        let s = bogoliubov_embed(&g.inverse()).squeeze().unwrap();
        let mut expected = CMat::zeros(2 * n, 2 * n);
        expected.view_mut((0, n), (n, n)).copy_from(&(-&z.zeta));
        expected.view_mut((n, 0), (n, n)).copy_from(&z.zeta);
        assert!(max_abs(&(s - expected)) < 1e-12);
        assert!(bogoliubov_embed(&random_element(n, 0.7, n as u64)).residual() < 1e-12);
    }
}

#[test]
fn group_acts_on_coherent_states_up_to_phase() {
    let n = 2;
    let mut r = rng(61);
    for seed in 0..3 {
        let z = DomainPoint::random(n, 0.25, &mut r).unwrap();
        let g = random_element(n, 0.25, 70 + seed);
        let gz = g.act(&z).unwrap();
        let f = udl_decompose(&g).unwrap();
        let jz = 16;
        let state = FockOracle::new(&z.zeta, jz).unwrap();
        let mut psi = FockVec::zero(n);
        for sh in &state.shells {
            psi.add_scaled(sh, re(z.normalisation()));
        }
        let psi = exp_nilpotent(&psi, &f_of(&f.beta).scaled(re(-0.5)));
        let psi = exp_e(&psi, &f.e_l);
        let psi = exp_truncated(&psi, &half_ft(&f.alpha), 36);
        let mut target = FockOracle::new(&gz.zeta, jz + 36).unwrap();
        let tnorm = target.norm_sq().sqrt();
        let overlap = target.state().inner(&psi) / tnorm;
        assert!((overlap.norm() - 1.0).abs() < 1e-8, "{}", overlap.norm());
        assert!((psi.norm_sq() - 1.0).abs() < 1e-8, "norm {}", psi.norm_sq());
    }
}

#[test]
fn determinant_helper_consistency() {
    let z = DomainPoint::random(4, 0.7, &mut rng(67)).unwrap();
    let n2 = det(&(eye(4) - z.zeta_star_zeta())).re;
    assert!(rel(z.normalisation().powi(2), n2) < 1e-14);
    let c = canonical(&z);
    assert!(rel(n2, c) < 1e-12);
}

fn canonical(z: &DomainPoint) -> f64 {
    z.canonical().unwrap().lambdas.iter().map(|l| (1.0 - l * l).powi(2)).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_points_give_group_elements(seed in 0u64..10_000, n in 2usize..6, radius in 0.05f64..0.98) {
        let z = DomainPoint::random(n, radius, &mut rng(seed)).unwrap();
        let g = g_zeta(&z).unwrap();
        prop_assert!(g.membership_residual() < 1e-10);
        let f = udl_decompose(&g).unwrap();
        prop_assert!(max_abs(&(f.reconstruct() - g.matrix())) < 1e-10);
        let sc = semiclassical_normals(&z).unwrap();
        prop_assert!(sc.closure().iter().all(|c| c.abs() < 1e-10));
    }

    #[test]
    fn overlaps_are_bounded(seed in 0u64..10_000, n in 2usize..6) {
        let mut r = rng(seed);
        let z = DomainPoint::random(n, 0.9, &mut r).unwrap();
        let w = DomainPoint::random(n, 0.9, &mut r).unwrap();
        prop_assert!(inner_product(&w, &z).norm() <= 1.0 + 1e-12);
    }
}

//! Closed-form coefficient tables for small spins, used as references.

use crate::half::HalfInt;
use crate::numeric::{csqrt, C64};

/// `B(j+ν, M | ½, μ; j, M-μ)`.
pub fn table_half(j: C64, m: HalfInt, mu: HalfInt, nu: HalfInt) -> C64 {
    let mf = m.f();
    let d = csqrt(j * 2.0 + 1.0);
    let a = csqrt(j + mf + 0.5);
    let b = csqrt(j - mf + 0.5);
    match (mu.twice(), nu.twice()) {
        (-1, -1) => -a / d,
        (-1, 1) => b / d,
        (1, -1) => b / d,
        (1, 1) => a / d,
        _ => panic!("table entry out of range"),
    }
}

/// `B(j+ν, M | 1, μ; j, M-μ)`.
pub fn table_one(j: C64, m: HalfInt, mu: HalfInt, nu: HalfInt) -> C64 {
    let mf = m.f();
    let s = |z: C64| csqrt(z);
    let r2 = 2f64.sqrt();
    let (jm, jp) = (j - mf, j + mf);
    let den_m = s(j * 2.0) * s(j * 2.0 + 1.0);
    let den_0 = s(j * 2.0) * s(j * 2.0 + 2.0);
    let den_p = s(j * 2.0 + 1.0) * s(j * 2.0 + 2.0);
    match (mu.twice(), nu.twice()) {
        (-2, -2) => s(jp) * s(jp + 1.0) / den_m,
        (-2, 0) => -s(jm) * s(jp + 1.0) * r2 / den_0,
        (-2, 2) => s(jm) * s(jm + 1.0) / den_p,
        (0, -2) => -s(jm) * s(jp) * r2 / den_m,
        (0, 0) => -(m.f() * 2.0) / den_0,
        (0, 2) => s(jm + 1.0) * s(jp + 1.0) * r2 / den_p,
        (2, -2) => s(jm) * s(jm + 1.0) / den_m,
        (2, 0) => s(jp) * s(jm + 1.0) * r2 / den_0,
        (2, 2) => s(jp) * s(jp + 1.0) / den_p,
        _ => panic!("table entry out of range"),
    }
}

/// Spin(3,1) coefficient `B{(Λ,P)J | ½_A; (λ,ρ)j}` for `j = J + s/2`
/// (`s = ±1`) and `(Λ,P) = (λ + t/2, ρ + tA/2)` (`t = ±1`).
pub fn table_4d_half(lambda: f64, rho: C64, a: i8, jj: f64, s: i8, t: i8) -> C64 {
    let af = a as f64;
    let den = csqrt(C64::new(2.0 * jj + 1.0, 0.0)) * csqrt(rho * af + lambda);
    let minus = csqrt(C64::new(jj - lambda + 0.5, 0.0)) * csqrt(-rho * af + jj + 0.5) / den;
    let plus = csqrt(C64::new(jj + lambda + 0.5, 0.0)) * csqrt(rho * af + jj + 0.5) / den;
    let i = C64::new(0.0, 1.0);
    match (s, t) {
        (-1, -1) => i * af * minus,
        (-1, 1) => plus,
        (1, -1) => plus,
        (1, 1) => -i * af * minus,
        _ => panic!("table entry out of range"),
    }
}

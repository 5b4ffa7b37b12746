use quotient_mi::numerics::{integrate_nested, integrate_semi_infinite, QuadratureSpec};
use quotient_mi::specfun::{tricomi_u, TricomiParams};
use quotient_mi::{ChannelConfig, EnsembleContext};
use statrs::function::gamma::ln_gamma;

fn ctx(n: u32, na: u32, nb: u32, a: f64, b: f64) -> EnsembleContext {
    EnsembleContext::new(ChannelConfig::new(n, na, nb, a, b).unwrap()).unwrap()
}

fn fig_ctx(n: u32) -> EnsembleContext {
    ctx(n, 4, 5, 1.0, 1.0 / 3.0)
}

fn loose(a: f64) -> QuadratureSpec {
    QuadratureSpec::default()
        .with_tolerances(1e-9, 1e-13)
        .with_exponential_tail(a)
}

#[test]
fn h_entries_equal_their_defining_integrals() {
    let configs = [
        (2, 3, 4, 0.7, 1.9),
        (3, 5, 3, 2.5, 0.4),
        (4, 4, 6, 1.0, 1.0 / 3.0),
    ];
    for (n, na, nb, a, b) in configs {
        let c = ctx(n, na, nb, a, b);
        let spec = QuadratureSpec::default()
            .with_tolerances(1e-12, 1e-300)
            .with_exponential_tail(a);
        for j in 1..=n {
            for k in 1..=n {
                let q = f64::from(na - n + k);
                let (alpha, gamma) = (i64::from(nb - j + 1), i64::from(na + nb - j + 2));
                let integral = integrate_semi_infinite(
                    |l| {
                        if l == 0.0 {
                            return 0.0;
                        }
                        let u =
                            tricomi_u(&TricomiParams::new(alpha, gamma, 1.0 / b + l / a).unwrap());
                        (-l / a + (q - 1.0) * l.ln()).exp() * u
                    },
                    &spec,
                )
                .unwrap();
                let h = c.h_entry(j as usize, k as usize).unwrap();
                assert!(
                    ((h - integral) / integral).abs() <= 1e-8,
                    "cfg {n},{na},{nb}: h[{j},{k}]"
                );
            }
        }
    }
}

#[test]
fn normalization_constant_closed_form() {
    // with 1/b large the columns of h become nearly parallel, so det h
    // loses digits to conditioning rather than to the entries
    let cases = [
        (1, 1, 1, 1.0, 1.0, 1e-10),
        (3, 4, 5, 1.0, 1.0 / 3.0, 1e-10),
        (5, 8, 7, 30.0, 1.0, 1e-10),
        (5, 8, 7, 30.0, 0.01, 1e-6),
    ];
    for (n, na, nb, a, b, tol) in cases {
        let c = ctx(n, na, nb, a, b);
        let (nf, naf, nbf) = (f64::from(n), f64::from(na), f64::from(nb));
        let mut inv =
            ln_gamma(nf + 1.0) + (nf * naf - nf * (nf - 1.0) / 2.0) * a.ln() + nf * nbf * b.ln();
        for j in 1..=n {
            inv += ln_gamma(f64::from(j)) + ln_gamma(f64::from(na - j + 1));
        }
        assert!((c.log_cn().log_mag() + inv).abs() < 1e-10 * inv.abs().max(1.0));
        assert!((c.normalization_identity() - 1.0).abs() < tol);
    }
}

#[test]
fn jpdf_integrates_to_one() {
    for n in 1..=3u32 {
        let c = fig_ctx(n).with_quadrature(loose(1.0)).unwrap();
        let spec = *c.quadrature();
        let limits: Vec<Box<dyn Fn(&[f64]) -> f64>> = (0..n as usize)
            .map(|i| -> Box<dyn Fn(&[f64]) -> f64> {
                if i == 0 {
                    Box::new(|_: &[f64]| f64::INFINITY)
                } else {
                    Box::new(|outer: &[f64]| *outer.last().unwrap())
                }
            })
            .collect();
        let ordered =
            integrate_nested(|l: &[f64]| c.jpdf(l).unwrap_or(0.0), &limits, &spec).unwrap();
        let total = ordered * (1..=n).product::<u32>() as f64;
        assert!((total - 1.0).abs() <= 1e-4, "n = {n}: {total}");
    }
}

#[test]
fn jpdf_is_symmetric() {
    let c = fig_ctx(3);
    let p = c.jpdf(&[0.4, 2.0, 5.5]).unwrap();
    for perm in [[2.0, 0.4, 5.5], [5.5, 2.0, 0.4], [2.0, 5.5, 0.4]] {
        assert!(((c.jpdf(&perm).unwrap() - p) / p).abs() < 1e-12);
    }
    assert_eq!(c.jpdf(&[1.0, 1.0, 2.0]).unwrap(), 0.0);
}

#[test]
fn one_point_function_integrates_to_n() {
    for n in 1..=4u32 {
        let c = fig_ctx(n);
        let spec = loose(1.0);
        let total = integrate_semi_infinite(
            |l| {
                if l > 0.0 {
                    c.correlation_r(&[l]).unwrap()
                } else {
                    0.0
                }
            },
            &spec,
        )
        .unwrap();
        assert!((total - f64::from(n)).abs() <= 1e-6, "n = {n}: {total}");
        let marginal = integrate_semi_infinite(
            |l| {
                if l > 0.0 {
                    c.marginal_density(l).unwrap()
                } else {
                    0.0
                }
            },
            &spec,
        )
        .unwrap();
        assert!((marginal - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn two_point_function_reduces_to_one_point() {
    for n in 2..=4u32 {
        let c = fig_ctx(n);
        let spec = loose(1.0);
        for l1 in [0.05, 0.5, 1.7, 4.0, 9.0] {
            let reduced = integrate_semi_infinite(
                |l2| {
                    if l2 > 0.0 {
                        c.correlation_r(&[l1, l2]).unwrap()
                    } else {
                        0.0
                    }
                },
                &spec,
            )
            .unwrap();
            let r1 = c.correlation_r(&[l1]).unwrap();
            let want = f64::from(n - 1) * r1;
            assert!(((reduced - want) / want).abs() <= 1e-4, "n = {n}, λ = {l1}");
        }
        let inf = |_: &[f64]| f64::INFINITY;
        let pair = integrate_nested(
            |ls: &[f64]| {
                if ls[0] > 0.0 && ls[1] > 0.0 {
                    c.pair_density(ls[0], ls[1]).unwrap()
                } else {
                    0.0
                }
            },
            &[inf, inf],
            &spec,
        )
        .unwrap();
        assert!((pair - 1.0).abs() <= 1e-4, "n = {n}: {pair}");
    }
}

#[test]
fn top_correlation_is_n_factorial_jpdf() {
    let c = fig_ctx(3);
    let ls = [0.3, 1.1, 2.9];
    let rn = c.correlation_r(&ls).unwrap();
    assert!(((rn - 6.0 * c.jpdf(&ls).unwrap()) / rn).abs() < 1e-10);
}

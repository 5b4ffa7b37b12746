use quotient_mi::numerics::{integrate_semi_infinite, QuadratureSpec};
use quotient_mi::specfun::{tricomi_u, tricomi_u_log, TricomiParams};
use statrs::function::gamma::ln_gamma;

/// Euler integral `U(α,γ;x) = x^{-α}/Γ(α) ∫_0^∞ e^{-s} s^{α-1} (1 + s/x)^{γ-α-1} ds`
/// after the substitution `t = s/x`.
fn euler_integral(alpha: i64, gamma: i64, x: f64) -> f64 {
    let spec = QuadratureSpec::default()
        .with_tolerances(1e-13, 1e-300)
        .with_exponential_tail(1.0);
    let (a, m) = (alpha as f64, (gamma - alpha - 1) as f64);
    let body = integrate_semi_infinite(
        |s| {
            if s == 0.0 {
                return if alpha == 1 { 1.0 } else { 0.0 };
            }
            (-s + (a - 1.0) * s.ln() + m * (s / x).ln_1p()).exp()
        },
        &spec,
    )
    .unwrap();
    body * (-a * x.ln() - ln_gamma(a)).exp()
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[test]
fn matches_euler_integral_on_parameter_grid() {
    let xs = log_grid(1e-2, 1e2, 100);
    let mut worst = 0.0f64;
    for alpha in 1..=6 {
        for extra in 0..=8 {
            let gamma = alpha + 1 + extra;
            for &x in &xs {
                let got = tricomi_u(&TricomiParams::new(alpha, gamma, x).unwrap());
                let want = euler_integral(alpha, gamma, x);
                let rel = ((got - want) / want).abs();
                worst = worst.max(rel);
                assert!(rel <= 1e-8, "U({alpha},{gamma};{x}) = {got}, oracle {want}");
            }
        }
    }
    assert!(worst <= 1e-8);
}

#[test]
fn log_form_agrees_where_direct_is_representable() {
    for alpha in 1..=6 {
        for gamma in alpha + 1..=alpha + 9 {
            for x in [1e-3, 0.2, 7.5, 1e4] {
                let p = TricomiParams::new(alpha, gamma, x).unwrap();
                let direct = tricomi_u(&p);
                let log = tricomi_u_log(&p).to_f64();
                assert!(((direct - log) / direct).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn kummer_recurrence() {
    // U(α,γ) = α U(α+1,γ) + U(α,γ-1)
    for alpha in 1..=5 {
        for gamma in alpha + 2..=alpha + 8 {
            for x in [0.05, 1.0, 3.3, 40.0] {
                let u = |a: i64, g: i64| tricomi_u(&TricomiParams::new(a, g, x).unwrap());
                let lhs = u(alpha, gamma);
                let rhs = alpha as f64 * u(alpha + 1, gamma) + u(alpha, gamma - 1);
                assert!(
                    ((lhs - rhs) / lhs).abs() < 1e-12,
                    "α={alpha} γ={gamma} x={x}"
                );
            }
        }
    }
}

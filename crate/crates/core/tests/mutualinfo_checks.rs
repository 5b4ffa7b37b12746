use quotient_mi::curve::MiMethod;
use quotient_mi::mutualinfo::*;
use quotient_mi::numerics::{integrate, QuadratureSpec};
use quotient_mi::{ChannelConfig, EnsembleContext};
use std::f64::consts::LN_2;

fn fig_ctx(n: u32) -> EnsembleContext {
    EnsembleContext::new(ChannelConfig::new(n, 4, 5, 1.0, 1.0 / 3.0).unwrap()).unwrap()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-9, 1e-13)
}

fn upper_end(ctx: &EnsembleContext) -> f64 {
    let m = moments(ctx).unwrap();
    m.mean + 15.0 * m.std_dev()
}

#[test]
fn single_antenna_change_of_variables() {
    for (na, nb, a, b) in [(4, 5, 1.0, 1.0 / 3.0), (1, 1, 1.0, 1.0), (3, 2, 5.0, 0.2)] {
        let c = EnsembleContext::new(ChannelConfig::new(1, na, nb, a, b).unwrap()).unwrap();
        for i in [0.05, 0.4, 1.0, 2.2, 4.0] {
            let lambda = (i * LN_2).exp_m1();
            let want = LN_2 * i.exp2() * c.marginal_density(lambda).unwrap();
            let got = mi_pdf_n1(&c, i).unwrap();
            assert!(((got - want) / want).abs() <= 1e-8, "nA={na} I={i}");
        }
    }
}

#[test]
fn moments_agree_with_density() {
    for n in 1..=3 {
        let c = fig_ctx(n);
        let m = moments(&c).unwrap();
        let hi = upper_end(&c);
        let p = |i: f64| mi_pdf(&c, i, default_exact_method(n as usize)).unwrap();
        let mean = integrate(|i| i * p(i), 0.0, hi, &spec()).unwrap();
        let second = integrate(|i| i * i * p(i), 0.0, hi, &spec()).unwrap();
        assert!(((mean - m.mean) / m.mean).abs() < 1e-7, "n={n}");
        let var = second - mean * mean;
        assert!(
            ((var - m.variance) / m.variance).abs() < 1e-6,
            "n={n}: {var} vs {}",
            m.variance
        );
    }
}

#[test]
fn mgf_matches_density_and_mean() {
    for n in 1..=3 {
        let c = fig_ctx(n);
        let hi = upper_end(&c);
        let s = 0.7;
        let via_pdf = integrate(
            |i| (-s * i).exp() * mi_pdf(&c, i, default_exact_method(n as usize)).unwrap(),
            0.0,
            hi,
            &spec(),
        )
        .unwrap();
        let closed = mgf(&c, s).unwrap();
        assert!(((closed - via_pdf) / closed).abs() < 1e-7, "n={n}");
        let h = 1e-4;
        let slope = -(mgf(&c, h).unwrap() - mgf(&c, 0.0).unwrap()) / h;
        let mean = mi_mean(&c).unwrap();
        // one-sided difference; curvature term is h·E[I²]/2
        assert!((slope - mean).abs() < 1e-3, "n={n}: {slope} vs {mean}");
    }
}

#[test]
fn outage_routes_agree() {
    for n in 2..=3 {
        let c = fig_ctx(n);
        let hi = upper_end(&c) * 0.6;
        for k in 1..=12 {
            let r = hi * k as f64 / 12.0;
            let d = outage_direct(&c, r).unwrap();
            let l = outage_laplace(&c, r).unwrap();
            assert!(
                (d - l).abs() <= (1e-4 * d).max(1e-6),
                "n={n} R={r}: {d} vs {l}"
            );
        }
    }
}

#[test]
fn cdf_derivative_is_density() {
    for n in 1..=3 {
        let c = fig_ctx(n);
        for r in [1.0, 2.5, 4.0] {
            let h = 1e-4;
            let fd =
                (outage_direct(&c, r + h).unwrap() - outage_direct(&c, r - h).unwrap()) / (2.0 * h);
            let p = mi_pdf_direct(&c, r).unwrap();
            if p > 1e-6 {
                assert!(((fd - p) / p).abs() <= 1e-3, "n={n} R={r}: {fd} vs {p}");
            }
        }
    }
}

#[test]
fn outage_decreases_with_antennas() {
    let ctxs: Vec<_> = (2..=4).map(fig_ctx).collect();
    for r in [2.0, 3.0, 4.0] {
        let p: Vec<f64> = ctxs.iter().map(|c| outage_laplace(c, r).unwrap()).collect();
        assert!(p[0] > p[1] && p[1] > p[2], "R={r}: {p:?}");
    }
}

#[test]
fn outage_rate_inverts_outage() {
    for n in 2..=3 {
        let c = fig_ctx(n);
        for method in [MiMethod::DirectJpdf, MiMethod::LaplaceConvolution] {
            let r = outage_rate(&c, 0.05, method).unwrap();
            assert!((outage(&c, r, method).unwrap() - 0.05).abs() < 1e-6);
        }
        let m = moments(&c).unwrap();
        let g = outage_rate(&c, 0.05, MiMethod::GaussianApprox).unwrap();
        assert!((m.gaussian_outage(g) - 0.05).abs() < 1e-9);
    }
}

#[test]
fn sweep_is_monotone_and_ordered() {
    let cfg = ChannelConfig::new(2, 4, 5, 1.0, 1.0 / 3.0).unwrap();
    let db: Vec<f64> = (0..=30).step_by(5).map(f64::from).collect();
    let rows = outage_rate_sweep(&cfg, &db, &[2, 3, 4], 0.01, MiMethod::GaussianApprox).unwrap();
    assert_eq!(rows.len(), 21);
    for n in 2..=4u32 {
        let r: Vec<f64> = rows
            .iter()
            .filter(|row| row.n == n)
            .map(|row| row.rate)
            .collect();
        assert!(r.windows(2).all(|w| w[1] > w[0]), "n={n}");
    }
    for k in 0..db.len() {
        assert!(rows[k].rate < rows[7 + k].rate && rows[7 + k].rate < rows[14 + k].rate);
    }
    assert!(outage_rate_sweep(&cfg, &[3.0, 1.0], &[2], 0.01, MiMethod::GaussianApprox).is_err());
}

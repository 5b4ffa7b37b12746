use quotient_mi::montecarlo::*;
use quotient_mi::mutualinfo::{mi_mean, outage_direct};
use quotient_mi::numerics::{integrate_semi_infinite, QuadratureSpec};
use quotient_mi::{ChannelConfig, EnsembleContext};

const COUNT: usize = 100_000;

#[test]
fn scalar_law_mean() {
    let cfg = ChannelConfig::new(1, 1, 1, 1.0, 1.0).unwrap();
    let ctx = EnsembleContext::new(cfg).unwrap();
    let spec = QuadratureSpec::default()
        .with_tolerances(1e-10, 1e-14)
        .with_exponential_tail(1.0);
    let exact = integrate_semi_infinite(
        |l| {
            if l > 0.0 {
                l * ctx.marginal_density(l).unwrap()
            } else {
                0.0
            }
        },
        &spec,
    )
    .unwrap();
    let ens = sample_eigenvalues(&cfg, 1, COUNT).unwrap();
    let (mean, se) = mean_and_standard_error(ens.all_eigenvalues()).unwrap();
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} ± {se} vs {exact}");
}

#[test]
fn mean_mi_within_three_standard_errors() {
    let cfg = ChannelConfig::new(2, 4, 5, 1.0, 1.0 / 3.0).unwrap();
    let exact = mi_mean(&EnsembleContext::new(cfg).unwrap()).unwrap();
    let ens = sample_eigenvalues(&cfg, 2, COUNT).unwrap();
    let (mean, se) = mean_and_standard_error(&empirical_mi(&ens)).unwrap();
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} ± {se} vs {exact}");
    assert!((mean - 2.56).abs() <= 3.0 * se + 0.005);
}

#[test]
fn mi_cdf_inside_ks_band() {
    for n in 2..=3 {
        let cfg = ChannelConfig::new(n, 4, 5, 1.0, 1.0 / 3.0).unwrap();
        let ctx = EnsembleContext::new(cfg).unwrap();
        let mi = empirical_mi(&sample_eigenvalues(&cfg, 3, COUNT).unwrap());
        let grid: Vec<f64> = (1..=30).map(|k| 0.25 * k as f64).collect();
        let exact: Vec<f64> = grid
            .iter()
            .map(|r| outage_direct(&ctx, *r).unwrap())
            .collect();
        let d = sup_distance(&empirical_cdf(&mi, &grid).unwrap(), &exact);
        assert!(d <= ks_band_95(COUNT) + 0.005, "n={n}: {d}");
    }
}

#[test]
fn all_eigenvalues_nonnegative() {
    let cfg = ChannelConfig::new(4, 4, 4, 3.0, 2.0).unwrap();
    let ens = sample_eigenvalues(&cfg, 9, COUNT).unwrap();
    assert!(ens.all_eigenvalues().iter().all(|l| *l >= 0.0));
    assert!(empirical_mi(&ens).iter().all(|i| *i >= 0.0));
    assert_eq!(ens.count(), COUNT);
}

#[test]
fn rejects_empty_runs() {
    let cfg = ChannelConfig::new(2, 4, 5, 1.0, 1.0 / 3.0).unwrap();
    assert!(sample_eigenvalues(&cfg, 0, 0).is_err());
    assert!(empirical_quantile(&[], 0.5).is_err());
    assert!(empirical_quantile(&[1.0], 0.0).is_err());
}

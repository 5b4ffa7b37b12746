use serde::Serialize;

use quotient_mi::curve::{fmt_real, DensityCurve, MiMethod, Quantity};
use quotient_mi::extremes::{gap_lower, gap_upper, pdf_max, pdf_min, upper_support_edge};
use quotient_mi::montecarlo::{self, ks_band_95, ks_statistic, sup_distance};
use quotient_mi::mutualinfo::{
    self, default_exact_method, moments, outage_rate, outage_rate_sweep, MomentSummary, SweepRow,
};
use quotient_mi::{ChannelConfig, EnsembleContext, Error, Result};

use crate::args::{
    CommonArgs, CompareQuantity, CurveArgs, ExtremeKind, Format, GridArgs, McArgs, SweepArgs,
};
use crate::output::{csv_header, csv_table};

/// Rendered artifact plus the facts needed for the summary line.
pub struct Artifact {
    pub text: String,
    pub method: String,
    pub points: usize,
    pub cfg: Option<ChannelConfig>,
    pub note: Option<String>,
}

const DEFAULT_POINTS: usize = 200;

pub fn context(common: &CommonArgs) -> Result<EnsembleContext> {
    let cfg = common.channel.config()?;
    let ctx = EnsembleContext::new(cfg)?;
    let spec = common.quadrature.apply(ctx.quadrature(), cfg.a)?;
    ctx.with_quadrature(spec)
}

#[derive(Clone, Copy)]
enum Spacing {
    Linear,
    Log,
}

fn spaced(lo: f64, hi: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let t = |k: usize| k as f64 / (points - 1) as f64;
    match spacing {
        Spacing::Linear => (0..points).map(|k| lo + (hi - lo) * t(k)).collect(),
        Spacing::Log => (0..points)
            .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * t(k)).exp())
            .collect(),
    }
}

/// Explicit grid, or `lo/hi/points` filled in from the per-command default.
fn resolve_grid(
    args: &GridArgs,
    default: impl FnOnce() -> Result<(f64, f64)>,
    spacing: Spacing,
) -> Result<Vec<f64>> {
    let grid = match &args.grid {
        Some(g) => g.clone(),
        None => {
            let (lo, hi) = match (args.lo, args.hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                (lo, hi) => {
                    let (dlo, dhi) = default()?;
                    (lo.unwrap_or(dlo), hi.unwrap_or(dhi))
                }
            };
            let points = args.points.unwrap_or(DEFAULT_POINTS);
            if points == 0 {
                return Err(Error::Domain("grid needs at least one point".into()));
            }
            if matches!(spacing, Spacing::Log) && !(lo > 0.0) {
                return Err(Error::Domain(format!(
                    "log-spaced grid needs lo > 0, got {lo}"
                )));
            }
            spaced(lo, hi, points, spacing)
        }
    };
    if grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    if grid.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Domain("grid points must be finite and >= 0".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("grid must be strictly ascending".into()));
    }
    Ok(grid)
}

fn eigen_range(ctx: &EnsembleContext) -> Result<(f64, f64)> {
    Ok((1e-3 * ctx.cfg().a, upper_support_edge(ctx)?))
}

fn mi_range(ctx: &EnsembleContext) -> Result<(f64, f64)> {
    let m = moments(ctx)?;
    Ok((0.0, m.mean + 5.0 * m.std_dev()))
}

fn curve_artifact(curve: DensityCurve, format: Format, note: Option<String>) -> Artifact {
    let text = match format {
        Format::Csv => curve.to_csv(),
        Format::Json => curve.to_json(),
    };
    Artifact {
        text,
        method: curve.method.as_str().to_string(),
        points: curve.len(),
        cfg: Some(curve.cfg),
        note,
    }
}

fn exact_method(method: Option<MiMethod>, ctx: &EnsembleContext) -> MiMethod {
    method.unwrap_or_else(|| default_exact_method(ctx.n()))
}

fn build_curve(
    ctx: &EnsembleContext,
    quantity: Quantity,
    method: MiMethod,
    grid: Vec<f64>,
    values: Vec<f64>,
) -> Result<DensityCurve> {
    DensityCurve::new(
        quantity,
        method,
        grid,
        values,
        *ctx.cfg(),
        *ctx.quadrature(),
    )
}

pub fn marginal(args: &CurveArgs) -> Result<Artifact> {
    let ctx = context(&args.common)?;
    let grid = resolve_grid(&args.grid, || eigen_range(&ctx), Spacing::Linear)?;
    let values = grid
        .iter()
        .map(|x| ctx.marginal_density(*x))
        .collect::<Result<Vec<_>>>()?;
    let curve = build_curve(
        &ctx,
        Quantity::EigMarginal,
        MiMethod::DirectJpdf,
        grid,
        values,
    )?;
    Ok(curve_artifact(curve, args.common.output.format, None))
}

pub fn extremes(args: &CurveArgs, kind: ExtremeKind) -> Result<Artifact> {
    let ctx = context(&args.common)?;
    let grid = resolve_grid(&args.grid, || eigen_range(&ctx), Spacing::Log)?;
    let (quantity, f): (Quantity, fn(&EnsembleContext, f64) -> Result<f64>) = match kind {
        ExtremeKind::MinSf => (Quantity::EigMinSf, gap_lower),
        ExtremeKind::MaxCdf => (Quantity::EigMaxCdf, gap_upper),
        ExtremeKind::MinPdf => (Quantity::EigMinPdf, pdf_min),
        ExtremeKind::MaxPdf => (Quantity::EigMaxPdf, pdf_max),
    };
    let values = grid
        .iter()
        .map(|x| f(&ctx, *x))
        .collect::<Result<Vec<_>>>()?;
    let curve = build_curve(&ctx, quantity, MiMethod::DirectJpdf, grid, values)?;
    Ok(curve_artifact(curve, args.common.output.format, None))
}

pub fn mi_pdf(args: &CurveArgs, method: Option<MiMethod>) -> Result<Artifact> {
    let ctx = context(&args.common)?;
    let method = exact_method(method, &ctx);
    let grid = resolve_grid(&args.grid, || mi_range(&ctx), Spacing::Linear)?;
    let values = match method {
        MiMethod::GaussianApprox => {
            let m = moments(&ctx)?;
            grid.iter().map(|i| m.gaussian_pdf(*i)).collect()
        }
        MiMethod::MonteCarlo => {
            return Err(Error::Domain(
                "Monte Carlo densities are histograms; use mc-compare --quantity eig-marginal or an outage curve".into(),
            ))
        }
        exact => grid
            .iter()
            .map(|i| mutualinfo::mi_pdf(&ctx, *i, exact))
            .collect::<Result<Vec<_>>>()?,
    };
    let curve = build_curve(&ctx, Quantity::MiPdf, method, grid, values)?;
    Ok(curve_artifact(curve, args.common.output.format, None))
}

fn outage_values(
    ctx: &EnsembleContext,
    grid: &[f64],
    method: MiMethod,
    mc: &McArgs,
) -> Result<Vec<f64>> {
    match method {
        MiMethod::GaussianApprox => {
            let m = moments(ctx)?;
            Ok(grid.iter().map(|r| m.gaussian_outage(*r)).collect())
        }
        MiMethod::MonteCarlo => {
            let ens = montecarlo::sample_eigenvalues(ctx.cfg(), mc.seed, mc.count)?;
            montecarlo::empirical_cdf(&montecarlo::empirical_mi(&ens), grid)
        }
        exact => grid
            .iter()
            .map(|r| mutualinfo::outage(ctx, *r, exact))
            .collect(),
    }
}

pub fn outage(args: &CurveArgs, method: Option<MiMethod>, rate: Option<f64>) -> Result<Artifact> {
    let ctx = context(&args.common)?;
    let method = exact_method(method, &ctx);
    let grid = match rate {
        Some(r) => vec![r],
        None => resolve_grid(&args.grid, || mi_range(&ctx), Spacing::Linear)?,
    };
    let values = outage_values(&ctx, &grid, method, &args.common.mc)?;
    let note = rate.map(|r| format!("p_out({r})={:.6}", values[0]));
    let curve = build_curve(&ctx, Quantity::MiCdf, method, grid, values)?;
    Ok(curve_artifact(curve, args.common.output.format, note))
}

#[derive(Serialize)]
struct RateReport {
    cfg: ChannelConfig,
    method: MiMethod,
    eps: f64,
    rate: f64,
}

pub fn outage_rate_cmd(
    common: &CommonArgs,
    method: Option<MiMethod>,
    eps: f64,
) -> Result<Artifact> {
    let ctx = context(common)?;
    let method = exact_method(method, &ctx);
    let rate = match method {
        MiMethod::MonteCarlo => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::Domain(format!(
                    "outage level must lie in (0, 1), got {eps}"
                )));
            }
            let ens = montecarlo::sample_eigenvalues(ctx.cfg(), common.mc.seed, common.mc.count)?;
            montecarlo::empirical_quantile(&montecarlo::empirical_mi(&ens), eps)?
        }
        other => outage_rate(&ctx, eps, other)?,
    };
    let report = RateReport {
        cfg: *ctx.cfg(),
        method,
        eps,
        rate,
    };
    let text = match common.output.format {
        Format::Csv => {
            csv_header("outage_rate", method.as_str(), ctx.cfg())
                + &csv_table(&["eps", "rate"], [vec![fmt_real(eps), fmt_real(rate)]])
        }
        Format::Json => json(&report),
    };
    Ok(Artifact {
        text,
        method: method.as_str().to_string(),
        points: 1,
        cfg: Some(*ctx.cfg()),
        note: Some(format!("R_out({eps})={rate:.6}")),
    })
}

#[derive(Serialize)]
struct MomentsReport {
    cfg: ChannelConfig,
    mean: f64,
    variance: f64,
    std_dev: f64,
}

pub fn moments_cmd(common: &CommonArgs) -> Result<Artifact> {
    let ctx = context(common)?;
    let m: MomentSummary = moments(&ctx)?;
    let report = MomentsReport {
        cfg: *ctx.cfg(),
        mean: m.mean,
        variance: m.variance,
        std_dev: m.std_dev(),
    };
    let text = match common.output.format {
        Format::Csv => {
            csv_header("mi_moments", "exact", ctx.cfg())
                + &csv_table(
                    &["mean", "variance", "std_dev"],
                    [vec![
                        fmt_real(m.mean),
                        fmt_real(m.variance),
                        fmt_real(m.std_dev()),
                    ]],
                )
        }
        Format::Json => json(&report),
    };
    Ok(Artifact {
        text,
        method: "exact".into(),
        points: 1,
        cfg: Some(*ctx.cfg()),
        note: Some(format!("mean={:.6} variance={:.6}", m.mean, m.variance)),
    })
}

#[derive(Serialize)]
struct CompareReport {
    quantity: Quantity,
    method: MiMethod,
    cfg: ChannelConfig,
    seed: u64,
    count: usize,
    grid: Vec<f64>,
    analytic: Vec<f64>,
    empirical: Vec<f64>,
    sup_distance: f64,
    ks_statistic: Option<f64>,
    band: f64,
    verdict: &'static str,
}

pub fn mc_compare(
    args: &CurveArgs,
    quantity: CompareQuantity,
    method: Option<MiMethod>,
    band: Option<f64>,
) -> Result<Artifact> {
    let ctx = context(&args.common)?;
    let mc = &args.common.mc;
    let ens = montecarlo::sample_eigenvalues(ctx.cfg(), mc.seed, mc.count)?;
    let cdf_band = ks_band_95(mc.count) + 0.005;
    let (quantity, method, grid, analytic, empirical, ks, default_band) = match quantity {
        CompareQuantity::MiCdf => {
            let method = exact_method(method, &ctx);
            if method == MiMethod::MonteCarlo {
                return Err(Error::Domain("mc-compare needs an analytic method".into()));
            }
            let grid = resolve_grid(&args.grid, || mi_range(&ctx), Spacing::Linear)?;
            let analytic = outage_values(&ctx, &grid, method, mc)?;
            let empirical = montecarlo::empirical_cdf(&montecarlo::empirical_mi(&ens), &grid)?;
            (
                Quantity::MiCdf,
                method,
                grid,
                analytic,
                empirical,
                None,
                cdf_band,
            )
        }
        CompareQuantity::EigMinSf | CompareQuantity::EigMaxCdf => {
            let grid = resolve_grid(&args.grid, || eigen_range(&ctx), Spacing::Log)?;
            let (mins, maxs) = montecarlo::extreme_stats(&ens);
            let (q, f, samples): (Quantity, fn(&EnsembleContext, f64) -> Result<f64>, Vec<f64>) =
                if quantity == CompareQuantity::EigMinSf {
                    (Quantity::EigMinSf, gap_lower, mins)
                } else {
                    (Quantity::EigMaxCdf, gap_upper, maxs)
                };
            let analytic = grid
                .iter()
                .map(|x| f(&ctx, *x))
                .collect::<Result<Vec<_>>>()?;
            let ecdf = montecarlo::empirical_cdf(&samples, &grid)?;
            let is_sf = q == Quantity::EigMinSf;
            let empirical = ecdf
                .into_iter()
                .map(|p| if is_sf { 1.0 - p } else { p })
                .collect();
            let ks = ks_statistic(&samples, |x| {
                let v = f(&ctx, x.max(0.0)).unwrap_or(f64::NAN);
                if is_sf {
                    1.0 - v
                } else {
                    v
                }
            })?;
            (
                q,
                MiMethod::DirectJpdf,
                grid,
                analytic,
                empirical,
                Some(ks),
                cdf_band,
            )
        }
        CompareQuantity::EigMarginal => {
            let (lo, hi) = eigen_range(&ctx)?;
            let edges = match &args.grid.grid {
                Some(g) => g.clone(),
                None => spaced(
                    args.grid.lo.unwrap_or(0.0),
                    args.grid.hi.unwrap_or(hi.max(lo)),
                    args.grid.points.unwrap_or(100) + 1,
                    Spacing::Linear,
                ),
            };
            let empirical = montecarlo::histogram_density(ens.all_eigenvalues(), &edges)?;
            let spec = *ctx.quadrature();
            let analytic = edges
                .windows(2)
                .map(|e| {
                    let mass = quotient_mi::numerics::integrate(
                        |l| {
                            if l > 0.0 {
                                ctx.marginal_density(l).unwrap_or(f64::NAN)
                            } else {
                                0.0
                            }
                        },
                        e[0],
                        e[1],
                        &spec,
                    )?;
                    Ok(mass / (e[1] - e[0]))
                })
                .collect::<Result<Vec<_>>>()?;
            let centers = edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
            (
                Quantity::EigMarginal,
                MiMethod::DirectJpdf,
                centers,
                analytic,
                empirical,
                None,
                0.02,
            )
        }
    };
    let sup = sup_distance(&analytic, &empirical);
    let band = band.unwrap_or(default_band);
    let verdict = if sup <= band { "PASS" } else { "FAIL" };
    let points = grid.len();
    let report = CompareReport {
        quantity,
        method,
        cfg: *ctx.cfg(),
        seed: mc.seed,
        count: mc.count,
        grid,
        analytic,
        empirical,
        sup_distance: sup,
        ks_statistic: ks,
        band,
        verdict,
    };
    let text = match args.common.output.format {
        Format::Csv => {
            let mut head = csv_header(quantity.as_str(), method.as_str(), ctx.cfg());
            head.push_str("# seed,count,sup_distance,ks_statistic,band,verdict\n");
            head.push_str(&format!(
                "# {},{},{},{},{},{}\n",
                report.seed,
                report.count,
                fmt_real(sup),
                ks.map(fmt_real).unwrap_or_default(),
                fmt_real(band),
                verdict
            ));
            let rows = (0..points).map(|k| {
                vec![
                    fmt_real(report.grid[k]),
                    fmt_real(report.analytic[k]),
                    fmt_real(report.empirical[k]),
                ]
            });
            head + &csv_table(&["x", "analytic", "empirical"], rows)
        }
        Format::Json => json(&report),
    };
    Ok(Artifact {
        text,
        method: method.as_str().to_string(),
        points,
        cfg: Some(*ctx.cfg()),
        note: Some(format!("sup={sup:.5} band={band:.5} {verdict}")),
    })
}

#[derive(Serialize)]
struct SweepReport {
    n_a: u32,
    n_b: u32,
    b: f64,
    eps: f64,
    method: MiMethod,
    rows: Vec<SweepRow>,
}

pub fn sweep(args: &SweepArgs) -> Result<Artifact> {
    if !(args.a_db_step > 0.0) || !(args.a_db_hi >= args.a_db_lo) {
        return Err(Error::Domain(
            "sweep needs a-db-lo <= a-db-hi and a positive step".into(),
        ));
    }
    let steps = ((args.a_db_hi - args.a_db_lo) / args.a_db_step + 1e-9).floor() as usize;
    let a_db: Vec<f64> = (0..=steps)
        .map(|k| args.a_db_lo + args.a_db_step * k as f64)
        .collect();
    let b = args
        .b
        .or(args.b_db.map(mutualinfo::db_to_linear))
        .unwrap_or(1.0 / 3.0);
    let n0 = *args.ns.first().ok_or(Error::EmptyInput)?;
    let base = ChannelConfig::new(n0, args.n_a, args.n_b, 1.0, b)?;
    let rows = outage_rate_sweep(&base, &a_db, &args.ns, args.eps, args.method)?;
    let text = match args.output.format {
        Format::Csv => {
            let mut head = String::from("# quantity,method,nA,nB,b,eps\n");
            head.push_str(&format!(
                "# outage_rate_sweep,{},{},{},{},{}\n",
                args.method.as_str(),
                args.n_a,
                args.n_b,
                fmt_real(b),
                fmt_real(args.eps)
            ));
            let table = rows
                .iter()
                .map(|r| vec![fmt_real(r.a_db), r.n.to_string(), fmt_real(r.rate)]);
            head + &csv_table(&["a_db", "n", "rate"], table)
        }
        Format::Json => json(&SweepReport {
            n_a: args.n_a,
            n_b: args.n_b,
            b,
            eps: args.eps,
            method: args.method,
            rows: rows.clone(),
        }),
    };
    Ok(Artifact {
        text,
        method: args.method.as_str().to_string(),
        points: rows.len(),
        cfg: None,
        note: None,
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

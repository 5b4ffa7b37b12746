//! Adaptive Gauss–Kronrod quadrature on finite, semi-infinite and nested
//! domains.
//!
//! Every routine uses the 10/21-point Gauss–Kronrod pair with the QUADPACK
//! error heuristic and global (worst-interval-first) bisection. Evaluation
//! and summation order is fixed, so results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and limits shared by all integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Split point for semi-infinite integrals: `[0, tail_cut]` is
    /// integrated directly and `[tail_cut, ∞)` through a rational map.
    pub tail_cut: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 400,
            tail_cut: 20.0,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize, tail_cut: f64) -> Result<Self> {
        let spec = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
            tail_cut,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be finite and positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig(
                "max_subdivisions must be positive".into(),
            ));
        }
        if !ok(self.tail_cut) {
            return Err(Error::InvalidConfig(format!(
                "tail_cut must be finite and positive, got {}",
                self.tail_cut
            )));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    /// Places the tail split where an `exp(-x/scale)` envelope has dropped
    /// below `abs_tol / 10`.
    pub fn with_exponential_tail(mut self, scale: f64) -> Self {
        self.tail_cut = scale * (10.0 / self.abs_tol).ln().max(1.0);
        self
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // contribution to the roundoff floor: integral of |f|
    abs_value: f64,
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resabs = fc.abs() * WGK[10];
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = resk * half;
    resabs *= scale;
    resasc *= scale;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Panel {
        a,
        b,
        value,
        error,
        abs_value: resabs,
    }
}

/// Integral estimate together with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Global adaptive bisection starting from the panels delimited by
/// `breaks` (ascending, at least two points).
fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let mut panels: Vec<Panel> = breaks.windows(2).map(|w| gk21(f, w[0], w[1])).collect();
    let mut subdivisions = 0usize;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let abs_value: f64 = panels.iter().map(|p| p.abs_value).sum();
        let tol = spec
            .abs_tol
            .max(spec.rel_tol * value.abs())
            .max(100.0 * f64::EPSILON * abs_value);
        if !value.is_finite() {
            return Err(Error::Accuracy {
                estimate: value,
                error_bound: f64::INFINITY,
            });
        }
        if error <= tol {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: value,
                error_bound: error,
            });
        }
        let worst = panels.iter().enumerate().fold(0, |best, (i, p)| {
            if p.error > panels[best].error {
                i
            } else {
                best
            }
        });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            // interval exhausted at machine resolution
            return Err(Error::Accuracy {
                estimate: value,
                error_bound: error,
            });
        }
        panels[worst] = gk21(f, a, mid);
        panels.insert(worst + 1, gk21(f, mid, b));
        subdivisions += 1;
    }
}

/// Integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_estimate(&mut f, a, b, spec).map(|e| e.value)
}

pub fn integrate_estimate<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "finite limits required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if b < a {
        return integrate_estimate(f, b, a, spec).map(|e| Estimate {
            value: -e.value,
            error: e.error,
        });
    }
    adaptive(f, &[a, b], spec)
}

/// Integral of `f` over `[0, ∞)`.
///
/// The range is split at `spec.tail_cut = c`. On `[0, c]` the integrand is
/// used as is; the tail goes through `x = c + c u / (1 - u)`, `u ∈ [0, 1)`.
/// Both pieces share one global error budget. Integrable power
/// singularities at the origin are resolved by bisection since the Kronrod
/// nodes never touch the endpoints.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<f64> {
    semi_infinite_estimate(&mut f, spec).map(|e| e.value)
}

fn semi_infinite_estimate<F: FnMut(f64) -> f64>(
    f: &mut F,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let c = spec.tail_cut;
    let mut mapped = |t: f64| -> f64 {
        if t <= 1.0 {
            c * f(c * t)
        } else {
            let u = t - 1.0;
            let w = 1.0 - u;
            let x = c + c * u / w;
            if !x.is_finite() {
                return 0.0;
            }
            let y = f(x);
            if y == 0.0 {
                0.0
            } else {
                y * c / (w * w)
            }
        }
    };
    adaptive(&mut mapped, &[0.0, 0.5, 1.0, 2.0], spec)
}

/// Upper limit of one level of a nested integral, as a function of the
/// outer variables (`outer[0]` is the outermost).
pub trait UpperLimit {
    fn upper(&self, outer: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> UpperLimit for F {
    fn upper(&self, outer: &[f64]) -> f64 {
        self(outer)
    }
}

/// Iterated integral `∫_0^{u_0} dx_0 ∫_0^{u_1(x_0)} dx_1 … f(x_0, …, x_{k-1})`.
///
/// `limits[i]` receives `x_0 .. x_{i-1}`; it may return `+∞` for a
/// semi-infinite level. A non-positive upper limit makes that slice empty
/// and it contributes exactly zero.
pub fn integrate_nested<F, L>(f: F, limits: &[L], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
    L: UpperLimit,
{
    if limits.is_empty() {
        return Err(Error::Domain(
            "nested integral needs at least one level".into(),
        ));
    }
    let mut xs = Vec::with_capacity(limits.len());
    nested_level(0, &mut xs, &f, limits, spec)
}

fn nested_level<F, L>(
    level: usize,
    xs: &mut Vec<f64>,
    f: &F,
    limits: &[L],
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
    L: UpperLimit,
{
    let upper = limits[level].upper(&xs[..level]);
    if upper.is_nan() {
        return Err(Error::Domain(format!(
            "upper limit at level {level} is NaN"
        )));
    }
    if upper <= 0.0 {
        return Ok(0.0);
    }
    let last = level + 1 == limits.len();
    let mut inner_err: Option<Error> = None;
    let mut g = |x: f64| -> f64 {
        if inner_err.is_some() {
            return 0.0;
        }
        xs.truncate(level);
        xs.push(x);
        if last {
            f(xs)
        } else {
            match nested_level(level + 1, xs, f, limits, spec) {
                Ok(v) => v,
                Err(e) => {
                    inner_err = Some(e);
                    0.0
                }
            }
        }
    };
    let est = if upper.is_infinite() {
        semi_infinite_estimate(&mut g, spec)
    } else {
        adaptive(&mut g, &[0.0, upper], spec)
    };
    if let Some(e) = inner_err {
        return Err(e);
    }
    est.map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_gamma;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn finite_polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, &spec()).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
        let r = integrate(|x| 3.0 * x * x, 2.0, 0.0, &spec()).unwrap();
        assert!((r + 8.0).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite_examples() {
        let s = spec();
        let one = integrate_semi_infinite(|x| (-x).exp(), &s).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let gamma2 = integrate_semi_infinite(|x| x * (-x).exp(), &s).unwrap();
        assert!((gamma2 - 1.0).abs() < 1e-12);
        let gauss = integrate_semi_infinite(|x| (-x * x).exp(), &s).unwrap();
        assert!((gauss - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_gamma_moments() {
        let s = spec();
        for gamma in [-0.5, 0.0, 1.0, 2.5] {
            let v = integrate_semi_infinite(|x: f64| x.powf(gamma) * (-x).exp(), &s).unwrap();
            let exact = log_gamma(gamma + 1.0).unwrap().exp();
            assert!(
                ((v - exact) / exact).abs() <= s.rel_tol,
                "gamma = {gamma}: {v} vs {exact}"
            );
        }
    }

    #[test]
    fn semi_infinite_respects_scale() {
        // slowly decaying exponential, far beyond the default tail split
        let s = spec();
        let v = integrate_semi_infinite(|x| (-x / 1000.0).exp(), &s).unwrap();
        assert!((v / 1000.0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_reports_estimate() {
        let s = QuadratureSpec {
            max_subdivisions: 3,
            ..spec()
        };
        match integrate(|x: f64| (1.0 / x).sin() / x.sqrt(), 0.0, 1.0, &s) {
            Err(Error::Accuracy {
                estimate,
                error_bound,
            }) => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("expected accuracy failure, got {other:?}"),
        }
    }

    #[test]
    fn nested_triangle_and_empty_slice() {
        let s = spec();
        let tri = integrate_nested(|_| 1.0, &[|_: &[f64]| 1.0, |x: &[f64]| x[0]], &s).unwrap();
        assert!((tri - 0.5).abs() < 1e-13);
        let empty = integrate_nested(|_| 1.0, &[|_: &[f64]| 1.0, |_: &[f64]| -1.0], &s).unwrap();
        assert_eq!(empty, 0.0);
    }

    #[test]
    fn nested_simplex_volumes() {
        // ordered simplex 1 > x_0 > x_1 > ... : volume 1/k!
        let s = spec();
        let limit = |outer: &[f64]| outer.last().copied().unwrap_or(1.0);
        let mut factorial = 1.0;
        for k in 1..=4usize {
            factorial *= k as f64;
            let limits: Vec<_> = (0..k).map(|_| limit).collect();
            let v = integrate_nested(|_| 1.0, &limits, &s).unwrap();
            assert!((v - 1.0 / factorial).abs() < 1e-12, "k = {k}: {v}");
        }
        // standard simplex sum x_i <= 1
        let rest = |outer: &[f64]| 1.0 - outer.iter().sum::<f64>();
        let v = integrate_nested(|_| 1.0, &[rest, rest, rest], &s).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn nested_with_infinite_levels() {
        let s = spec();
        let inf = |_: &[f64]| f64::INFINITY;
        let v = integrate_nested(|x| (-x[0] - 2.0 * x[1]).exp(), &[inf, inf], &s).unwrap();
        assert!((v - 0.5).abs() < 1e-11);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-12, 10, 1.0).is_err());
        assert!(QuadratureSpec::new(1e-8, f64::NAN, 10, 1.0).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-12, 0, 1.0).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-12, 10, 1.0).is_ok());
    }
}

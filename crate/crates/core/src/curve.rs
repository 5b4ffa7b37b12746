//! Tabulated curves and their file encodings.
//!
//! CSV layout:
//!
//! ```text
//! # quantity,method,n,nA,nB,a,b
//! # mi_cdf,direct_jpdf,2,4,5,1.0000000000000000e0,3.3333333333333331e-1
//! # rel_tol,abs_tol,max_subdivisions,tail_cut
//! # 1.0000000000000000e-8,1.0000000000000000e-11,400,2.0000000000000000e1
//! x,value
//! 0.0000000000000000e0,0.0000000000000000e0
//! ...
//! ```
//!
//! Reals are written with 17 significant digits, so parsing a written curve
//! reproduces it bit for bit. JSON mirrors the struct fields.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::ChannelConfig;
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;

/// How a mutual-information (or eigenvalue) curve was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiMethod {
    /// Nested integration of the joint eigenvalue density.
    DirectJpdf,
    /// Analytic inverse Laplace transform written as a convolution integral.
    LaplaceConvolution,
    /// Normal law with the exact mean and variance.
    GaussianApprox,
    /// Sampling the matrix model.
    MonteCarlo,
}

impl MiMethod {
    pub const ALL: [MiMethod; 4] = [
        MiMethod::DirectJpdf,
        MiMethod::LaplaceConvolution,
        MiMethod::GaussianApprox,
        MiMethod::MonteCarlo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MiMethod::DirectJpdf => "direct_jpdf",
            MiMethod::LaplaceConvolution => "laplace_convolution",
            MiMethod::GaussianApprox => "gaussian_approx",
            MiMethod::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for MiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct_jpdf" | "direct" => Ok(MiMethod::DirectJpdf),
            "laplace_convolution" | "laplace" => Ok(MiMethod::LaplaceConvolution),
            "gaussian_approx" | "gaussian" => Ok(MiMethod::GaussianApprox),
            "monte_carlo" | "mc" => Ok(MiMethod::MonteCarlo),
            other => Err(Error::Domain(format!("unknown method '{other}'"))),
        }
    }
}

/// What a curve tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    MiPdf,
    MiCdf,
    EigMarginal,
    EigMinSf,
    EigMaxCdf,
    EigMinPdf,
    EigMaxPdf,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::MiPdf => "mi_pdf",
            Quantity::MiCdf => "mi_cdf",
            Quantity::EigMarginal => "eig_marginal",
            Quantity::EigMinSf => "eig_min_sf",
            Quantity::EigMaxCdf => "eig_max_cdf",
            Quantity::EigMinPdf => "eig_min_pdf",
            Quantity::EigMaxPdf => "eig_max_pdf",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Quantity::MiPdf,
            Quantity::MiCdf,
            Quantity::EigMarginal,
            Quantity::EigMinSf,
            Quantity::EigMaxCdf,
            Quantity::EigMinPdf,
            Quantity::EigMaxPdf,
        ]
        .into_iter()
        .find(|q| q.as_str() == s)
        .ok_or_else(|| Error::Domain(format!("unknown quantity '{s}'")))
    }
}

/// A tabulated curve with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub quantity: Quantity,
    pub method: MiMethod,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub cfg: ChannelConfig,
    pub spec: QuadratureSpec,
}

const CDF_SLACK: f64 = 1e-9;

impl DensityCurve {
    pub fn new(
        quantity: Quantity,
        method: MiMethod,
        grid: Vec<f64>,
        values: Vec<f64>,
        cfg: ChannelConfig,
        spec: QuadratureSpec,
    ) -> Result<Self> {
        let curve = DensityCurve {
            quantity,
            method,
            grid,
            values,
            cfg,
            spec,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.values.len() {
            return Err(Error::Domain(format!(
                "grid has {} points but {} values",
                self.grid.len(),
                self.values.len()
            )));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("grid must be strictly ascending".into()));
        }
        if self.values.iter().chain(&self.grid).any(|v| !v.is_finite()) {
            return Err(Error::Domain("curve contains non-finite values".into()));
        }
        let direction = match self.quantity {
            Quantity::MiCdf | Quantity::EigMaxCdf => 1.0,
            Quantity::EigMinSf => -1.0,
            _ => 0.0,
        };
        if direction != 0.0
            && self
                .values
                .windows(2)
                .any(|w| direction * (w[1] - w[0]) < -CDF_SLACK)
        {
            return Err(Error::Consistency(format!(
                "{} curve is not monotone",
                self.quantity
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let c = &self.cfg;
        let s = &self.spec;
        let mut out = String::new();
        let _ = writeln!(out, "# quantity,method,n,nA,nB,a,b");
        let _ = writeln!(
            out,
            "# {},{},{},{},{},{},{}",
            self.quantity,
            self.method,
            c.n,
            c.n_a,
            c.n_b,
            fmt_real(c.a),
            fmt_real(c.b)
        );
        let _ = writeln!(out, "# rel_tol,abs_tol,max_subdivisions,tail_cut");
        let _ = writeln!(
            out,
            "# {},{},{},{}",
            fmt_real(s.rel_tol),
            fmt_real(s.abs_tol),
            s.max_subdivisions,
            fmt_real(s.tail_cut)
        );
        let _ = writeln!(out, "x,value");
        for (x, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt_real(*x), fmt_real(*v));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Domain(format!("malformed curve CSV: {msg}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("# quantity,method,n,nA,nB,a,b") {
            return Err(bad("missing metadata header"));
        }
        let meta: Vec<&str> = lines
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .ok_or_else(|| bad("missing metadata row"))?
            .trim()
            .split(',')
            .collect();
        if meta.len() != 7 {
            return Err(bad("metadata row needs 7 fields"));
        }
        let int = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| bad(&format!("bad integer '{s}'")))
        };
        let real = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad(&format!("bad number '{s}'")))
        };
        let quantity: Quantity = meta[0].parse()?;
        let method: MiMethod = meta[1].parse()?;
        let cfg = ChannelConfig::new(
            int(meta[2])?,
            int(meta[3])?,
            int(meta[4])?,
            real(meta[5])?,
            real(meta[6])?,
        )?;

        let mut next = lines.next().ok_or_else(|| bad("missing data header"))?;
        let mut spec = QuadratureSpec::default();
        if next == "# rel_tol,abs_tol,max_subdivisions,tail_cut" {
            let q: Vec<&str> = lines
                .next()
                .and_then(|l| l.strip_prefix('#'))
                .ok_or_else(|| bad("missing quadrature row"))?
                .trim()
                .split(',')
                .collect();
            if q.len() != 4 {
                return Err(bad("quadrature row needs 4 fields"));
            }
            let subdiv = q[2]
                .parse::<usize>()
                .map_err(|_| bad("bad max_subdivisions"))?;
            spec = QuadratureSpec::new(real(q[0])?, real(q[1])?, subdiv, real(q[3])?)?;
            next = lines.next().ok_or_else(|| bad("missing data header"))?;
        }
        if next != "x,value" {
            return Err(bad("missing 'x,value' header"));
        }
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let (x, v) = line
                .split_once(',')
                .ok_or_else(|| bad("data row needs two fields"))?;
            grid.push(real(x)?);
            values.push(real(v)?);
        }
        DensityCurve::new(quantity, method, grid, values, cfg, spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let curve: DensityCurve = serde_json::from_str(text)
            .map_err(|e| Error::Domain(format!("malformed curve JSON: {e}")))?;
        curve.cfg.validate()?;
        curve.validate()?;
        Ok(curve)
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

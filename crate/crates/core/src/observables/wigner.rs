use std::f64::consts::FRAC_2_PI;
use std::io::Write;

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{displacement_elements, parity_sign, FockDensityMatrix};
use crate::C64;

/// Largest imaginary part tolerated before it is discarded.
pub const IMAG_TOL: f64 = 1e-10;
/// Population on the top Fock levels that triggers a truncation warning.
pub const EDGE_WARN_TOL: f64 = 1e-8;
const EDGE_LEVELS: usize = 2;

/// Rectangular grid of phase-space points β = x + i·p.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl WignerGridSpec {
    pub const DEFAULT_POINTS: usize = 201;
    pub const DEFAULT_MARGIN: f64 = 4.0;

    pub fn square(half_width: f64, points: usize) -> Self {
        Self { x_min: -half_width, x_max: half_width, p_min: -half_width, p_max: half_width, nx: points, np: points }
    }

    /// ±(α + 4) in both quadratures, 201 × 201.
    pub fn default_for_alpha(alpha: f64) -> Self {
        Self::square(alpha + Self::DEFAULT_MARGIN, Self::DEFAULT_POINTS)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, lo, hi, n) in [("x", self.x_min, self.x_max, self.nx), ("p", self.p_min, self.p_max, self.np)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                out.push(format!("{name} range [{lo}, {hi}] must be finite and increasing"));
            }
            if n < 2 {
                out.push(format!("{name} resolution {n} must be at least 2"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + self.dp() * j as f64
    }

    pub fn max_abs_beta(&self) -> f64 {
        let x = self.x_min.abs().max(self.x_max.abs());
        let p = self.p_min.abs().max(self.p_max.abs());
        x.hypot(p)
    }
}

/// Wigner function sampled on a [`WignerGridSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub spec: WignerGridSpec,
    /// Row-major over p: `values[j * nx + i]` is W(x_i + i p_j).
    pub values: Vec<f64>,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
    /// Top Fock levels of the state carried more than [`EDGE_WARN_TOL`].
    pub truncation_warning: bool,
}

impl WignerGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    pub fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.spec.np, self.spec.nx, &self.values)
    }

    /// Riemann sum Σ W dx dp.
    pub fn normalization(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.dx() * self.spec.dp()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value at the grid point nearest to β.
    pub fn nearest(&self, beta: C64) -> f64 {
        let s = &self.spec;
        let i = (((beta.re - s.x_min) / s.dx()).round().max(0.0) as usize).min(s.nx - 1);
        let j = (((beta.im - s.p_min) / s.dp()).round().max(0.0) as usize).min(s.np - 1);
        self.value(i, j)
    }

    /// CSV with `#` header lines, then `x,p,W` rows (x fastest).
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        let s = &self.spec;
        writeln!(out, "# grid: x in [{}, {}] ({} pts), p in [{}, {}] ({} pts)", s.x_min, s.x_max, s.nx, s.p_min, s.p_max, s.np)?;
        writeln!(out, "# max_imag_residue: {:e}", self.max_imag)?;
        writeln!(out, "# truncation_warning: {}", self.truncation_warning)?;
        writeln!(out, "x,p,W")?;
        for j in 0..s.np {
            for i in 0..s.nx {
                writeln!(out, "{},{},{}", s.x(i), s.p(j), self.value(i, j))?;
            }
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W, header: &[String]) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a> {
            metadata: &'a [String],
            spec: &'a WignerGridSpec,
            x: Vec<f64>,
            p: Vec<f64>,
            /// W[j][i] at (x_i, p_j)
            w: Vec<&'a [f64]>,
            max_imag: f64,
            truncation_warning: bool,
        }
        let s = &self.spec;
        let doc = Doc {
            metadata: header,
            spec: s,
            x: (0..s.nx).map(|i| s.x(i)).collect(),
            p: (0..s.np).map(|j| s.p(j)).collect(),
            w: self.values.chunks(s.nx).collect(),
            max_imag: self.max_imag,
            truncation_warning: self.truncation_warning,
        };
        serde_json::to_writer(out, &doc)?;
        Ok(())
    }
}

/// (2/π) Tr[ρ D(2β) Π] split into real and imaginary parts.
fn evaluate(rho: &DMatrix<C64>, beta: C64) -> C64 {
    let dim = rho.nrows();
    let d = displacement_elements(beta * 2.0, dim);
    let mut acc = C64::new(0.0, 0.0);
    // Tr[ρ D Π] = Σ_{m,n} ρ_{nm} D_{mn} (−1)^n
    for n in 0..dim {
        let mut col = C64::new(0.0, 0.0);
        for m in 0..dim {
            col += rho[(n, m)] * d[(m, n)];
        }
        acc += col * parity_sign(n);
    }
    acc * FRAC_2_PI
}

/// W at a single point.
pub fn wigner_point(rho: &FockDensityMatrix, beta: C64) -> Result<f64> {
    let w = evaluate(rho.matrix(), beta);
    if w.im.abs() > IMAG_TOL {
        return Err(Error::NumericFailure(format!("Wigner value has imaginary part {:e}", w.im)));
    }
    Ok(w.re)
}

pub fn wigner(rho: &FockDensityMatrix, spec: &WignerGridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let edge = rho.edge_population(EDGE_LEVELS);
    let truncation_warning = edge > EDGE_WARN_TOL;
    if truncation_warning {
        warn!(
            "top {EDGE_LEVELS} Fock levels hold population {edge:e}; Wigner values up to |β| = {:.2} may be truncated",
            spec.max_abs_beta()
        );
    }
    let m = rho.matrix();
    let rows: Vec<Vec<C64>> = (0..spec.np)
        .into_par_iter()
        .map(|j| (0..spec.nx).map(|i| evaluate(m, C64::new(spec.x(i), spec.p(j)))).collect())
        .collect();
    let max_imag = rows.iter().flatten().map(|w| w.im.abs()).fold(0.0, f64::max);
    if max_imag > IMAG_TOL {
        return Err(Error::NumericFailure(format!("Wigner grid has imaginary residue {max_imag:e}")));
    }
    let values = rows.into_iter().flatten().map(|w| w.re).collect();
    Ok(WignerGrid { spec: *spec, values, max_imag, truncation_warning })
}

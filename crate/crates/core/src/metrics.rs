//! Error norms and scheme comparison tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::GasModel;
use crate::grid::StateField;
use crate::solver::Solver;
use crate::riemann::RiemannSpec;

pub const VARIABLES: [&str; 4] = ["rho", "u", "v", "p"];

fn check_shape(field: &[f64], reference: &[f64]) -> Result<()> {
    if field.len() != reference.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} values vs {} reference values",
            field.len(),
            reference.len()
        )));
    }
    if field.is_empty() {
        return Err(Error::ShapeMismatch("empty field".into()));
    }
    Ok(())
}

/// Mean absolute deviation over all nodes.
pub fn l1_error(field: &[f64], reference: &[f64]) -> Result<f64> {
    check_shape(field, reference)?;
    let sum: f64 = field.iter().zip(reference).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / field.len() as f64)
}

/// Mean squared deviation over all nodes.
pub fn mse_loss(field: &[f64], reference: &[f64]) -> Result<f64> {
    check_shape(field, reference)?;
    let sum: f64 = field.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / field.len() as f64)
}

/// Primitive planes `(rho, u, v, p)` of a conserved field.
pub fn primitive_planes(field: &StateField, gas: &GasModel) -> Result<[Vec<f64>; 4]> {
    let mut planes: [Vec<f64>; 4] = Default::default();
    for plane in planes.iter_mut() {
        plane.reserve(field.data.len());
    }
    for q in &field.data {
        let w = q.to_primitive(gas)?;
        for (plane, value) in planes.iter_mut().zip([w.rho, w.u, w.v, w.p]) {
            plane.push(value);
        }
    }
    Ok(planes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableErrors {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl VariableErrors {
    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            rho: a[0],
            u: a[1],
            v: a[2],
            p: a[3],
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.rho, self.u, self.v, self.p]
    }

    pub fn sum(&self) -> f64 {
        self.rho + self.u + self.v + self.p
    }
}

fn per_variable(
    field: &[Vec<f64>; 4],
    reference: &[Vec<f64>; 4],
    norm: fn(&[f64], &[f64]) -> Result<f64>,
) -> Result<VariableErrors> {
    let mut out = [0.0; 4];
    for c in 0..4 {
        out[c] = norm(&field[c], &reference[c])?;
    }
    Ok(VariableErrors::from_array(out))
}

pub fn l1_by_variable(field: &[Vec<f64>; 4], reference: &[Vec<f64>; 4]) -> Result<VariableErrors> {
    per_variable(field, reference, l1_error)
}

pub fn mse_by_variable(field: &[Vec<f64>; 4], reference: &[Vec<f64>; 4]) -> Result<VariableErrors> {
    per_variable(field, reference, mse_loss)
}

/// `L1(rho) + L1(u) + L1(v) + L1(p)` on primitive variables.
pub fn euler_l1(field: &StateField, reference: &StateField, gas: &GasModel) -> Result<f64> {
    Ok(l1_by_variable(&primitive_planes(field, gas)?, &primitive_planes(reference, gas)?)?.sum())
}

/// Divide a validation series by its maximum.
pub fn rescale_validation(series: &[f64]) -> Vec<f64> {
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return series.to_vec();
    }
    series.iter().map(|v| v / max).collect()
}

/// Round to two decimals for display.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeErrors {
    pub scheme: String,
    pub l1: VariableErrors,
    pub mse: VariableErrors,
    pub steps: usize,
    pub wall_seconds: f64,
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub nx: usize,
    pub ny: usize,
    pub baseline: SchemeErrors,
    pub candidate: SchemeErrors,
    /// Baseline L1 over candidate L1, full precision.
    pub ratio: VariableErrors,
}

impl ErrorReport {
    pub fn ratio_rounded(&self) -> VariableErrors {
        VariableErrors::from_array(self.ratio.to_array().map(round2))
    }
}

pub fn scheme_errors(
    solver: &Solver,
    spec: &RiemannSpec,
    nx: usize,
    ny: usize,
    reference: &StateField,
) -> Result<(SchemeErrors, StateField)> {
    let run = solver.solve(spec, nx, ny)?;
    let coarse_ref = reference.restrict(nx, ny)?;
    let field = primitive_planes(&run.final_field, solver.gas())?;
    let refp = primitive_planes(&coarse_ref, solver.gas())?;
    Ok((
        SchemeErrors {
            scheme: solver.config().scheme.to_string(),
            l1: l1_by_variable(&field, &refp)?,
            mse: mse_by_variable(&field, &refp)?,
            steps: run.steps,
            wall_seconds: run.wall_seconds,
        },
        run.final_field,
    ))
}

/// Run both schemes on every grid and compare against the restricted
/// fine-grid reference at the final time.
pub fn compare_table(
    spec: &RiemannSpec,
    grids: &[(usize, usize)],
    baseline: &Solver,
    candidate: &Solver,
    reference: &StateField,
) -> Result<Vec<ErrorReport>> {
    let mut rows = Vec::with_capacity(grids.len());
    for &(nx, ny) in grids {
        let (b, _) = scheme_errors(baseline, spec, nx, ny, reference)?;
        let (c, _) = scheme_errors(candidate, spec, nx, ny, reference)?;
        let ratio = std::array::from_fn(|k| b.l1.to_array()[k] / c.l1.to_array()[k]);
        rows.push(ErrorReport {
            nx,
            ny,
            baseline: b,
            candidate: c,
            ratio: VariableErrors::from_array(ratio),
        });
    }
    Ok(rows)
}

/// Aligned plain-text rendering of a comparison table.
pub fn format_table(rows: &[ErrorReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>9} {:>4} {:>14} {:>14} {:>14} {:>14}",
        "grid", "var", "baseline", "candidate", "ratio", ""
    );
    for row in rows {
        let (b, c, r) = (row.baseline.l1.to_array(), row.candidate.l1.to_array(), row.ratio_rounded().to_array());
        for k in 0..4 {
            let _ = writeln!(
                s,
                "{:>9} {:>4} {:>14.6e} {:>14.6e} {:>14.2}",
                format!("{}x{}", row.nx, row.ny),
                VARIABLES[k],
                b[k],
                c[k],
                r[k]
            );
        }
    }
    s
}

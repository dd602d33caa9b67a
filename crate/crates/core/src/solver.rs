//! Dimension-by-dimension characteristic-space WENO discretization with
//! TVD Runge-Kutta time stepping.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnn::{CnnModel, ForwardScratch, CHANNELS};
use crate::error::{Error, Result};
use crate::euler::{self, Axis, ConservedState, GasModel, Mat4, PrimitiveState};
use crate::grid::{required_ghost, Boundary, FieldGrid, StateField};
use crate::riemann::RiemannSpec;
use crate::weno::{reconstruct_half, Scheme, SplitSign, DEFAULT_C, DEFAULT_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub eps: f64,
    /// Offset added to the CNN multipliers.
    pub c: f64,
    pub cfl: f64,
    pub boundary: Boundary,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Z,
            eps: DEFAULT_EPS,
            c: DEFAULT_C,
            cfl: euler::CFL,
            boundary: Boundary::ZeroGradient,
        }
    }
}

impl SchemeConfig {
    pub fn with_scheme(scheme: Scheme) -> Self {
        Self {
            scheme,
            ..Self::default()
        }
    }
}

/// Coefficients `(a, b, c)` of each stage `U' = a U^n + b U_prev + c dt L(U_prev)`.
pub const RK3_STAGES: [(f64, f64, f64); 3] = [
    (0.0, 1.0, 1.0),
    (3.0 / 4.0, 1.0 / 4.0, 1.0 / 4.0),
    (1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0),
];

/// Three-stage TVD Runge-Kutta step for a scalar ODE `u' = f(u)`.
pub fn tvd_rk3_scalar(u: f64, dt: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut prev = u;
    for (a, b, c) in RK3_STAGES {
        prev = a * u + b * prev + c * dt * f(prev);
    }
    prev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnapshotPolicy {
    FinalOnly,
    EveryStep,
    EveryNSteps(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub resolution: Resolution,
    pub field: StateField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub wall_seconds: f64,
    pub final_field: StateField,
}

pub struct Solver {
    config: SchemeConfig,
    gas: GasModel,
    model: Option<Arc<CnnModel>>,
}

/// Per-thread buffers for one line.
#[derive(Default)]
struct LineWorkspace {
    line: Vec<ConservedState>,
    flux: Vec<[f64; 4]>,
    split_plus: Vec<[f64; 4]>,
    split_minus: Vec<[f64; 4]>,
    d_plus: Vec<[f64; 4]>,
    d_minus: Vec<[f64; 4]>,
    interface: Vec<[f64; 4]>,
    scratch: ForwardScratch,
}

impl Solver {
    pub fn new(config: SchemeConfig, gas: GasModel, model: Option<CnnModel>) -> Result<Self> {
        if config.scheme.is_ds() && model.is_none() {
            return Err(Error::ModelMissing(config.scheme.to_string()));
        }
        if !(config.cfl > 0.0) || !(config.eps >= 0.0) || !(config.c >= 0.0) {
            return Err(Error::Config(format!("invalid scheme parameters {config:?}")));
        }
        if let Some(m) = &model {
            m.validate()?;
        }
        Ok(Self {
            config,
            gas,
            model: if config.scheme.is_ds() { model.map(Arc::new) } else { None },
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn model(&self) -> Option<&CnnModel> {
        self.model.as_deref()
    }

    pub fn ghost(&self) -> usize {
        required_ghost(self.model.as_ref().map_or(0, |m| m.k))
    }

    pub fn initial_grid(&self, spec: &RiemannSpec, nx: usize, ny: usize) -> Result<FieldGrid> {
        FieldGrid::from_fn(nx, ny, self.ghost(), &self.gas, |x, y| spec.state_at(x, y))
    }

    pub fn grid_from_fn(
        &self,
        nx: usize,
        ny: usize,
        f: impl FnMut(f64, f64) -> PrimitiveState,
    ) -> Result<FieldGrid> {
        FieldGrid::from_fn(nx, ny, self.ghost(), &self.gas, f)
    }

    /// Global Lax-Friedrichs coefficients `(max |u| + c, max |v| + c)`.
    pub fn splitting_speeds(&self, grid: &FieldGrid) -> Result<(f64, f64)> {
        let mut ax: f64 = 0.0;
        let mut ay: f64 = 0.0;
        for (k, q) in grid.interior().enumerate() {
            let w = euler::conserved_to_primitive(q, &self.gas).map_err(|_| Error::NonPhysicalState {
                rho: q.rho(),
                p: q.pressure_unchecked(self.gas.gamma),
                cell: Some((k % grid.nx(), k / grid.nx())),
                time: None,
            })?;
            let c = self.gas.sound_speed(w.rho, w.p);
            ax = ax.max(w.u.abs() + c);
            ay = ay.max(w.v.abs() + c);
        }
        Ok((ax, ay))
    }

    /// Adaptive step `cfl * min(dx, dy) / max |V +- c|`.
    pub fn stable_dt(&self, grid: &FieldGrid) -> Result<f64> {
        let a = euler::max_wave_speed(grid.interior(), &self.gas)?;
        euler::adaptive_dt_with_cfl(a, grid.dx(), grid.dy(), self.config.cfl)
    }

    /// Semi-discrete tendency `L(U)` on the interior, row-major.
    ///
    /// Fills the ghost layers of `grid` first.
    pub fn rhs(&self, grid: &mut FieldGrid) -> Result<Vec<[f64; 4]>> {
        grid.fill_ghosts(self.config.boundary);
        let grid = &*grid;
        let (nx, ny) = (grid.nx(), grid.ny());
        let (alpha_x, alpha_y) = self.splitting_speeds(grid)?;
        let (inv_dx, inv_dy) = (nx as f64, ny as f64);

        let mut tendency = vec![[0.0; 4]; nx * ny];
        tendency
            .par_chunks_mut(nx)
            .enumerate()
            .try_for_each_init(LineWorkspace::default, |ws, (j, out)| {
                grid.gather_line(Axis::X, j, &mut ws.line);
                self.line_fluxes(ws, alpha_x)
                    .map_err(|p| self.locate(grid, Axis::X, j, p))?;
                for (i, o) in out.iter_mut().enumerate() {
                    let (l, r) = (&ws.interface[i], &ws.interface[i + 1]);
                    for c in 0..4 {
                        o[c] = -((r[c] - l[c]) * inv_dx);
                    }
                }
                Ok::<(), Error>(())
            })?;

        // Columns are swept as transposed rows; results come back
        // column-major and with the momentum components swapped.
        let mut columns = vec![[0.0; 4]; nx * ny];
        columns
            .par_chunks_mut(ny)
            .enumerate()
            .try_for_each_init(LineWorkspace::default, |ws, (i, out)| {
                grid.gather_line(Axis::Y, i, &mut ws.line);
                self.line_fluxes(ws, alpha_y)
                    .map_err(|p| self.locate(grid, Axis::Y, i, p))?;
                for (j, o) in out.iter_mut().enumerate() {
                    let (l, r) = (&ws.interface[j], &ws.interface[j + 1]);
                    let d = [r[0] - l[0], r[2] - l[2], r[1] - l[1], r[3] - l[3]];
                    for c in 0..4 {
                        o[c] = d[c] * inv_dy;
                    }
                }
                Ok::<(), Error>(())
            })?;

        for j in 0..ny {
            for i in 0..nx {
                let t = &mut tendency[j * nx + i];
                let g = &columns[i * ny + j];
                for c in 0..4 {
                    t[c] -= g[c];
                }
            }
        }
        Ok(tendency)
    }

    fn locate(&self, grid: &FieldGrid, axis: Axis, line: usize, pos: usize) -> Error {
        let q = match axis {
            Axis::X => grid.row(line)[pos],
            Axis::Y => {
                let mut col = Vec::new();
                grid.gather_line(Axis::Y, line, &mut col);
                col[pos]
            }
        };
        let along = pos.saturating_sub(grid.ghost());
        let cell = match axis {
            Axis::X => (along, line),
            Axis::Y => (line, along),
        };
        Error::NonPhysicalState {
            rho: q.rho(),
            p: q.pressure_unchecked(self.gas.gamma),
            cell: Some(cell),
            time: None,
        }
    }

    /// Interface fluxes of `ws.line` (an x-direction line with ghosts) into
    /// `ws.interface`; entry `m` is the flux between padded positions
    /// `g - 1 + m` and `g + m`. On failure returns the offending position.
    fn line_fluxes(&self, ws: &mut LineWorkspace, alpha: f64) -> std::result::Result<(), usize> {
        let gamma = self.gas.gamma;
        let g = self.ghost();
        let len = ws.line.len();
        let n = len - 2 * g;

        ws.flux.clear();
        for (p, q) in ws.line.iter().enumerate() {
            let w = euler::conserved_to_primitive(q, &self.gas).map_err(|_| p)?;
            ws.flux.push(euler::flux_from_parts(q, &w, Axis::X));
        }

        let kind = self.config.scheme.weight_kind();
        let eps = self.config.eps;
        let c = self.config.c;
        let ds_base = match &self.model {
            Some(model) => {
                let (plus, minus) = split_line_into(&ws.line, &ws.flux, gamma, alpha, &mut ws.split_plus, &mut ws.split_minus)
                    .map(|_| (&ws.split_plus, &ws.split_minus))?;
                let lo = g - 2;
                let (from, to) = (lo - model.k, len - lo + model.k);
                model
                    .forward_into(&plus[from..to], &mut ws.d_plus, &mut ws.scratch)
                    .expect("ghost width covers the receptive field");
                model
                    .forward_into(&minus[from..to], &mut ws.d_minus, &mut ws.scratch)
                    .expect("ghost width covers the receptive field");
                Some(lo)
            }
            None => None,
        };

        ws.interface.clear();
        for p in g - 1..g + n {
            let mut avg = [0.0; 4];
            for (k, a) in avg.iter_mut().enumerate() {
                *a = 0.5 * (ws.line[p].0[k] + ws.line[p + 1].0[k]);
            }
            let (left, right, _) = euler::x_eigen_at(&ConservedState(avg), gamma).map_err(|_| p)?;

            let mut wu = [[0.0; 4]; 6];
            let mut wf = [[0.0; 4]; 6];
            for s in 0..6 {
                wu[s] = euler::mat_vec(&left, &ws.line[p - 2 + s].0);
                wf[s] = euler::mat_vec(&left, &ws.flux[p - 2 + s]);
            }
            let mut h = [0.0; 4];
            for (k, hk) in h.iter_mut().enumerate() {
                let plus: [f64; 5] = std::array::from_fn(|s| 0.5 * (wf[s][k] + alpha * wu[s][k]));
                let minus: [f64; 5] =
                    std::array::from_fn(|s| 0.5 * (wf[s + 1][k] - alpha * wu[s + 1][k]));
                *hk = match ds_base {
                    None => {
                        reconstruct_half(&plus, SplitSign::Plus, kind, eps, None)
                            + reconstruct_half(&minus, SplitSign::Minus, kind, eps, None)
                    }
                    Some(lo) => {
                        let dp = &ws.d_plus;
                        let dm = &ws.d_minus;
                        let at = p - lo;
                        let wp = [dp[at - 1][k], dp[at][k], dp[at + 1][k]];
                        let wm = [dm[at + 2][k], dm[at + 1][k], dm[at][k]];
                        reconstruct_half(&plus, SplitSign::Plus, kind, eps, Some((&wp, c)))
                            + reconstruct_half(&minus, SplitSign::Minus, kind, eps, Some((&wm, c)))
                    }
                };
            }
            ws.interface.push(euler::mat_vec(&right, &h));
        }
        Ok(())
    }

    /// One TVD-RK3 step of size `dt`.
    pub fn rk3_step(&self, grid: &mut FieldGrid, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        let start: Vec<ConservedState> = grid.interior().copied().collect();
        let (nx, ny) = (grid.nx(), grid.ny());
        for (a, b, c) in RK3_STAGES {
            let l = self.rhs(grid)?;
            for j in 0..ny {
                for i in 0..nx {
                    let k = j * nx + i;
                    let prev = grid.get(i, j).0;
                    let u0 = start[k].0;
                    let lk = l[k];
                    let next = std::array::from_fn(|m| a * u0[m] + b * prev[m] + c * dt * lk[m]);
                    grid.set(i, j, ConservedState(next));
                }
            }
        }
        for j in 0..ny {
            for i in 0..nx {
                let q = grid.get(i, j);
                if euler::conserved_to_primitive(&q, &self.gas).is_err() {
                    return Err(Error::NonPhysicalState {
                        rho: q.rho(),
                        p: q.pressure_unchecked(self.gas.gamma),
                        cell: Some((i, j)),
                        time: None,
                    });
                }
            }
        }
        Ok(())
    }

    /// Integrate from `t = 0` to `t_final`, clipping the last step so the run
    /// ends exactly at `t_final`.
    pub fn advance(
        &self,
        grid: &mut FieldGrid,
        t_final: f64,
        policy: SnapshotPolicy,
        resolution: Resolution,
        sink: &mut dyn FnMut(Snapshot) -> Result<()>,
    ) -> Result<RunSummary> {
        let clock = Instant::now();
        let mut t = 0.0;
        let mut steps = 0;
        let wants_initial = !matches!(policy, SnapshotPolicy::FinalOnly) || t_final <= 0.0;
        if wants_initial {
            sink(Snapshot {
                step: 0,
                time: 0.0,
                resolution,
                field: grid.to_state_field(),
            })?;
        }
        while t < t_final {
            let mut dt = self.stable_dt(grid).map_err(|e| e.at_time(t))?;
            let last = t + dt >= t_final;
            if last {
                dt = t_final - t;
            }
            self.rk3_step(grid, dt).map_err(|e| e.at_time(t))?;
            steps += 1;
            t = if last { t_final } else { t + dt };
            let emit = match policy {
                SnapshotPolicy::FinalOnly => last,
                SnapshotPolicy::EveryStep => true,
                SnapshotPolicy::EveryNSteps(m) => last || steps % m.max(1) == 0,
            };
            if emit {
                sink(Snapshot {
                    step: steps,
                    time: t,
                    resolution,
                    field: grid.to_state_field(),
                })?;
            }
        }
        Ok(RunSummary {
            steps,
            final_time: t,
            wall_seconds: clock.elapsed().as_secs_f64(),
            final_field: grid.to_state_field(),
        })
    }

    /// Solve a Riemann problem on an `nx * ny` grid up to `spec.t_final`.
    pub fn run(
        &self,
        spec: &RiemannSpec,
        nx: usize,
        ny: usize,
        policy: SnapshotPolicy,
        sink: &mut dyn FnMut(Snapshot) -> Result<()>,
    ) -> Result<RunSummary> {
        let mut grid = self.initial_grid(spec, nx, ny)?;
        self.advance(&mut grid, spec.t_final, policy, Resolution::Coarse, sink)
    }

    /// Final field only.
    pub fn solve(&self, spec: &RiemannSpec, nx: usize, ny: usize) -> Result<RunSummary> {
        self.run(spec, nx, ny, SnapshotPolicy::FinalOnly, &mut |_| Ok(()))
    }
}

/// Fine-grid WENO-Z reference run.
pub fn make_reference(
    spec: &RiemannSpec,
    fine_n: usize,
    policy: SnapshotPolicy,
    sink: &mut dyn FnMut(Snapshot) -> Result<()>,
) -> Result<RunSummary> {
    let solver = Solver::new(SchemeConfig::default(), GasModel::new(spec.gamma)?, None)?;
    let mut grid = solver.initial_grid(spec, fine_n, fine_n)?;
    solver.advance(&mut grid, spec.t_final, policy, Resolution::Fine, sink)
}

/// Pointwise subsampling of a fine field onto an aligned coarse grid.
pub fn restrict(fine: &StateField, nx: usize, ny: usize) -> Result<StateField> {
    fine.restrict(nx, ny)
}

fn split_line_into(
    line: &[ConservedState],
    flux: &[[f64; 4]],
    gamma: f64,
    alpha: f64,
    plus: &mut Vec<[f64; 4]>,
    minus: &mut Vec<[f64; 4]>,
) -> std::result::Result<(), usize> {
    plus.clear();
    minus.clear();
    for (p, (q, f)) in line.iter().zip(flux).enumerate() {
        let (left, _, _): (Mat4, Mat4, _) = euler::x_eigen_at(q, gamma).map_err(|_| p)?;
        let wu = euler::mat_vec(&left, &q.0);
        let wf = euler::mat_vec(&left, f);
        plus.push(std::array::from_fn(|k| 0.5 * (wf[k] + alpha * wu[k])));
        minus.push(std::array::from_fn(|k| 0.5 * (wf[k] - alpha * wu[k])));
    }
    Ok(())
}

/// Lax-Friedrichs split characteristic fluxes of an x-direction line, each
/// cell projected with the eigenvectors of its own state.
///
/// This is the CNN input; returns `(plus, minus)` with 4 channels per cell.
pub fn characteristic_split_line(
    line: &[ConservedState],
    gamma: f64,
    alpha: f64,
) -> Result<(Vec<[f64; CHANNELS]>, Vec<[f64; CHANNELS]>)> {
    let gas = GasModel { gamma };
    let mut flux = Vec::with_capacity(line.len());
    for q in line {
        flux.push(euler::physical_flux(q, &gas, Axis::X)?);
    }
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    split_line_into(line, &flux, gamma, alpha, &mut plus, &mut minus).map_err(|p| {
        Error::NonPhysicalState {
            rho: line[p].rho(),
            p: line[p].pressure_unchecked(gamma),
            cell: None,
            time: None,
        }
    })?;
    Ok((plus, minus))
}

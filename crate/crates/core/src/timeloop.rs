//! Explicit six-stage fifth-order Runge–Kutta integration, CFL control and
//! per-step structural monitors.

use std::fmt::Write as _;

use crate::error::{HtcError, Result};
use crate::mesh::MovingMesh;
use crate::numerics::{compensated_sum, CompensatedSum, Vec2};
use crate::ops::curl_diagnostics;
use crate::scheme::{RhsEval, Scheme};
use crate::thermo::CellState;

/// Butcher's six-stage fifth-order method.
pub mod tableau {
    pub const C: [f64; 6] = [0.0, 0.25, 0.25, 0.5, 0.75, 1.0];
    pub const A: [[f64; 5]; 6] = [
        [0.0; 5],
        [0.25, 0.0, 0.0, 0.0, 0.0],
        [0.125, 0.125, 0.0, 0.0, 0.0],
        [0.0, -0.5, 1.0, 0.0, 0.0],
        [3.0 / 16.0, 0.0, 0.0, 9.0 / 16.0, 0.0],
        [-3.0 / 7.0, 2.0 / 7.0, 12.0 / 7.0, -12.0 / 7.0, 8.0 / 7.0],
    ];
    pub const B: [f64; 6] = [7.0 / 90.0, 0.0, 32.0 / 90.0, 12.0 / 90.0, 32.0 / 90.0, 7.0 / 90.0];
}

/// A state the Runge–Kutta driver can advance: `y + dt Σ_j w_j k_j`.
pub trait RkState: Sized {
    type Rate;
    fn advance(&self, dt: f64, weights: &[f64], rates: &[Self::Rate]) -> Result<Self>;
}

impl RkState for f64 {
    type Rate = f64;
    fn advance(&self, dt: f64, weights: &[f64], rates: &[f64]) -> Result<Self> {
        Ok(self + dt * weights.iter().zip(rates).map(|(w, k)| w * k).sum::<f64>())
    }
}

/// One RK5 step whose first stage rate `k1 = f(y, t)` is already known.
///
/// Returns the new state and all six stage rates.
pub fn rk5_step_from<S, F>(y: &S, t: f64, dt: f64, k1: S::Rate, mut f: F) -> Result<(S, Vec<S::Rate>)>
where
    S: RkState,
    F: FnMut(&S, f64) -> Result<S::Rate>,
{
    if !(dt > 0.0) {
        return Err(HtcError::Numerical(format!("time step {dt:e} is not positive")));
    }
    let mut ks = Vec::with_capacity(6);
    ks.push(k1);
    for i in 1..6 {
        let yi = y
            .advance(dt, &tableau::A[i][..i], &ks)
            .and_then(|yi| f(&yi, t + tableau::C[i] * dt))
            .map_err(|e| e.context(format!("stage {}", i + 1)))?;
        ks.push(yi);
    }
    let y1 = y.advance(dt, &tableau::B, &ks).map_err(|e| e.context("stage update"))?;
    Ok((y1, ks))
}

/// One RK5 step of `y' = f(y, t)`.
pub fn rk5_step<S, F>(y: &S, t: f64, dt: f64, mut f: F) -> Result<S>
where
    S: RkState,
    F: FnMut(&S, f64) -> Result<S::Rate>,
{
    let k1 = f(y, t).map_err(|e| e.context("stage 1"))?;
    Ok(rk5_step_from(y, t, dt, k1, f)?.0)
}

/// Mesh, cell states and time.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub mesh: MovingMesh,
    pub cells: Vec<CellState>,
    pub t: f64,
}

impl SystemState {
    pub fn total_energy(&self, scheme: &Scheme) -> Result<f64> {
        let duals = scheme.duals(&self.cells)?;
        Ok(compensated_sum(self.cells.iter().zip(&duals).map(|(s, d)| s.mass * d.e_total)))
    }

    pub fn total_entropy(&self) -> f64 {
        compensated_sum(self.cells.iter().map(|s| s.mass * s.s))
    }
}

impl RkState for SystemState {
    type Rate = RhsEval;

    fn advance(&self, dt: f64, weights: &[f64], rates: &[RhsEval]) -> Result<Self> {
        let used: Vec<(f64, &RhsEval)> = weights
            .iter()
            .zip(rates)
            .filter(|(w, _)| **w != 0.0)
            .map(|(w, r)| (*w, r))
            .collect();
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(c, s)| {
                let mut out = *s;
                let mut tau = 0.0;
                let mut v = Vec2::zeros();
                let mut ent = 0.0;
                let mut a = nalgebra::Matrix3::zeros();
                let mut j = nalgebra::Vector3::zeros();
                for &(w, r) in &used {
                    let k = &r.deriv.cells[c];
                    tau += w * k.tau;
                    v += k.v * w;
                    ent += w * k.s;
                    a += k.a * w;
                    j += k.j * w;
                }
                out.tau += dt * tau;
                out.v += v * dt;
                out.s += dt * ent;
                out.a += a * dt;
                out.j += j * dt;
                out
            })
            .collect();
        let nodes = self
            .mesh
            .nodes()
            .iter()
            .enumerate()
            .map(|(p, x)| {
                let mut v = Vec2::zeros();
                for &(w, r) in &used {
                    v += r.deriv.nodes[p] * w;
                }
                x + v * dt
            })
            .collect();
        Ok(SystemState {
            mesh: self.mesh.with_nodes(nodes)?,
            cells,
            t: self.t,
        })
    }
}

/// Time step `CFL · min_c d_c / λ_c`, with `d_c` the incircle diameter and
/// `λ_c = |v_c| + sqrt(c_c² + 4/3 c_s² + c_h²)`, clamped to end at `t_f`.
pub fn compute_dt(mesh: &MovingMesh, eval: &RhsEval, cfl: f64, t: f64, t_final: f64) -> Result<f64> {
    let limit = (0..mesh.n_cells())
        .map(|c| {
            let d = 4.0 * eval.geom.cell_area[c] / mesh.perimeter(c);
            let f = &eval.fluxes[c];
            d / (f.v.norm() + f.wave)
        })
        .fold(f64::INFINITY, f64::min);
    let remaining = t_final - t;
    let dt = (cfl * limit).min(remaining);
    // Avoid a sliver step at the very end.
    let dt = if remaining - dt <= 1e-9 * dt { remaining } else { dt };
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(HtcError::Numerical(format!("time step {dt:e} at t = {t}")));
    }
    Ok(dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub cfl: f64,
    pub t_final: f64,
    /// Record a monitor row every this many steps (the summary maxima cover all steps).
    pub monitor_every: usize,
    pub max_steps: usize,
    /// Fixed step size overriding the CFL rule (tests and convergence studies).
    pub fixed_dt: Option<f64>,
}

impl TimeConfig {
    pub fn new(cfl: f64, t_final: f64) -> Self {
        TimeConfig {
            cfl,
            t_final,
            monitor_every: 1,
            max_steps: usize::MAX,
            fixed_dt: None,
        }
    }
}

/// Monitor values at the start of a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRow {
    pub t: f64,
    pub dt: f64,
    pub eps_e: f64,
    pub eps_det: f64,
    pub eps_curl_a: f64,
    pub eps_curl_j: f64,
    pub e_total: f64,
    pub s_total: f64,
    pub min_area: f64,
}

/// Monitor time series plus maxima over every step and stage.
#[derive(Debug, Clone, Default)]
pub struct RunMonitors {
    pub rows: Vec<MonitorRow>,
    pub max_eps_e: f64,
    /// Largest `ε^E / |E_total|` over every RHS evaluation (all stages).
    pub max_eps_e_rel: f64,
    pub max_eps_det: f64,
    pub max_curl_a: f64,
    pub max_curl_j: f64,
    /// Smallest cell entropy balance `m dS/dt + flux` over every evaluation.
    pub min_entropy_balance: f64,
    /// Largest `|m dS/dt + flux − (Π_c + m π_c)|` over every evaluation.
    pub max_entropy_mismatch: f64,
}

pub const MONITOR_HEADER: &str = "t,dt,eps_E,eps_detA,eps_curlA,eps_curlJ,E_total,S_total,min_area";

impl RunMonitors {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(MONITOR_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.17e},{:.17e},{:.6e},{:.6e},{:.6e},{:.6e},{:.17e},{:.17e},{:.17e}",
                r.t, r.dt, r.eps_e, r.eps_det, r.eps_curl_a, r.eps_curl_j, r.e_total, r.s_total, r.min_area
            );
        }
        s
    }

    fn absorb_stage(&mut self, eval: &RhsEval, state: &SystemState, e_total: f64) {
        let eps_e = eval.energy_residual(&state.cells);
        self.max_eps_e = self.max_eps_e.max(eps_e);
        self.max_eps_e_rel = self.max_eps_e_rel.max(eps_e / e_total.abs().max(f64::MIN_POSITIVE));
        let balance = eval.entropy_balance(&state.mesh, &state.cells);
        for (c, b) in balance.iter().enumerate() {
            let production = eval.big_pi[c] + state.cells[c].mass * eval.small_pi[c];
            self.min_entropy_balance = self.min_entropy_balance.min(*b);
            self.max_entropy_mismatch = self.max_entropy_mismatch.max((b - production).abs());
        }
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: SystemState,
    pub monitors: RunMonitors,
    pub steps: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub initial_entropy: f64,
    pub final_entropy: f64,
}

fn total_energy_of(eval: &RhsEval, cells: &[CellState]) -> f64 {
    compensated_sum(cells.iter().zip(&eval.duals).map(|(s, d)| s.mass * d.e_total))
}

/// Integrates from `state.t` to `time.t_final`.
///
/// `observer` sees the initial state (step 0) and the state after every step.
pub fn run(
    scheme: &Scheme,
    mut state: SystemState,
    time: &TimeConfig,
    mut observer: impl FnMut(usize, &SystemState) -> Result<()>,
) -> Result<RunOutput> {
    if !(time.cfl > 0.0) || !(time.t_final >= state.t) {
        return Err(HtcError::Parameter(format!("cfl = {} and t_f = {} invalid", time.cfl, time.t_final)));
    }
    let every = time.monitor_every.max(1);
    let mut monitors = RunMonitors {
        min_entropy_balance: f64::INFINITY,
        ..Default::default()
    };
    let initial_energy = state.total_energy(scheme)?;
    let initial_entropy = state.total_entropy();
    observer(0, &state)?;
    let mut step = 0;
    while state.t < time.t_final {
        if step >= time.max_steps {
            return Err(HtcError::Numerical(format!("step limit {} reached at t = {}", time.max_steps, state.t)));
        }
        let t = state.t;
        let ctx = |e: HtcError| e.context(format!("step {} (t = {t:e})", step + 1));
        let k1 = scheme.rhs(&state.mesh, &state.cells, t).map_err(|e| ctx(e.context("stage 1")))?;
        let dt = match time.fixed_dt {
            Some(dt) => dt.min(time.t_final - t),
            None => compute_dt(&state.mesh, &k1, time.cfl, t, time.t_final).map_err(ctx)?,
        };

        let e_total = total_energy_of(&k1, &state.cells);
        let curls = curl_diagnostics(&state.mesh, &k1.geom, &state.cells, scheme.cfg.exec);
        let row = MonitorRow {
            t,
            dt,
            eps_e: k1.energy_residual(&state.cells),
            eps_det: k1.det_residual(&state.mesh, &state.cells),
            eps_curl_a: curls.curl_a,
            eps_curl_j: curls.curl_j,
            e_total,
            s_total: state.total_entropy(),
            min_area: k1.geom.cell_area.iter().copied().fold(f64::INFINITY, f64::min),
        };
        monitors.max_eps_det = monitors.max_eps_det.max(row.eps_det);
        monitors.max_curl_a = monitors.max_curl_a.max(row.eps_curl_a);
        monitors.max_curl_j = monitors.max_curl_j.max(row.eps_curl_j);
        monitors.absorb_stage(&k1, &state, e_total);
        if step % every == 0 {
            monitors.rows.push(row);
        }

        let (mut next, _) = rk5_step_from(&state, t, dt, k1, |y, ts| {
            let k = scheme.rhs(&y.mesh, &y.cells, ts)?;
            monitors.absorb_stage(&k, y, e_total);
            Ok(k)
        })
        .map_err(ctx)?;
        step += 1;
        next.t = if time.t_final - (t + dt) <= 1e-12 * time.t_final.abs() {
            time.t_final
        } else {
            t + dt
        };
        state = next;
        observer(step, &state)?;
    }
    let final_energy = state.total_energy(scheme).map_err(|e| e.context("final state"))?;
    let final_entropy = state.total_entropy();
    Ok(RunOutput {
        state,
        monitors,
        steps: step,
        initial_energy,
        final_energy,
        initial_entropy,
        final_entropy,
    })
}

/// Sum of cell masses times a per-cell quantity, compensated.
pub fn mass_weighted_sum(cells: &[CellState], f: impl Fn(&CellState) -> f64) -> f64 {
    let mut s = CompensatedSum::new();
    for c in cells {
        s.add(c.mass * f(c));
    }
    s.value()
}

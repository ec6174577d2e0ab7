//! Semi-discrete right-hand side of the Lagrangian scheme.
//!
//! One evaluation runs three passes: cell duals (parallel over cells), the
//! nodal solver (parallel over nodes) and the cell update (parallel over
//! cells). All fan sums run in a fixed order so results are reproducible and
//! identical between the sequential and parallel backends.

use std::sync::Arc;

use crate::error::{HtcError, Result};
use crate::exec::Exec;
use crate::mesh::{CornerGeometry, MovingMesh};
use crate::nodal::{solve_node, BoundaryConfig, CellFlux, Mat2, NodeKind, NodeValues, Viscosity};
use crate::numerics::{compensated_sum, ddot, CompensatedSum, Mat3, Vec2, Vec3};
use crate::thermo::{dual_variables, relaxation_sources, CellState, DualVars, EosParams, RelaxationClosure, StandardClosure};

/// Everything the right-hand side depends on besides the state.
#[derive(Clone)]
pub struct SchemeConfig {
    pub eos: EosParams,
    pub viscosity: Viscosity,
    pub boundary: BoundaryConfig,
    pub closure: Arc<dyn RelaxationClosure + Send>,
    pub exec: Exec,
}

impl std::fmt::Debug for SchemeConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SchemeConfig")
            .field("eos", &self.eos)
            .field("viscosity", &self.viscosity)
            .field("boundary", &self.boundary)
            .field("exec", &self.exec)
            .finish()
    }
}

impl SchemeConfig {
    pub fn new(eos: EosParams, viscosity: Viscosity, boundary: BoundaryConfig) -> Self {
        SchemeConfig {
            eos,
            viscosity,
            boundary,
            closure: Arc::new(StandardClosure),
            exec: Exec::default(),
        }
    }
}

/// Time derivative of one cell's evolved variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRate {
    pub tau: f64,
    pub v: Vec2,
    pub s: f64,
    pub a: Mat3,
    pub j: Vec3,
}

impl Default for CellRate {
    fn default() -> Self {
        CellRate {
            tau: 0.0,
            v: Vec2::zeros(),
            s: 0.0,
            a: Mat3::zeros(),
            j: Vec3::zeros(),
        }
    }
}

/// Right-hand side of the cell ODEs and the node trajectories.
#[derive(Debug, Clone)]
pub struct StateDerivative {
    pub cells: Vec<CellRate>,
    /// `dx_p/dt = v_p`.
    pub nodes: Vec<Vec2>,
}

/// One RHS evaluation with all intermediate quantities kept for monitoring.
#[derive(Debug, Clone)]
pub struct RhsEval {
    pub geom: CornerGeometry,
    pub duals: Vec<DualVars>,
    pub fluxes: Vec<CellFlux>,
    pub nodal: Vec<NodeValues>,
    pub deriv: StateDerivative,
    /// Numerical entropy production `Π_c`.
    pub big_pi: Vec<f64>,
    /// Relaxation entropy production per unit mass `π_c`.
    pub small_pi: Vec<f64>,
}

/// Scheme bound to a mesh topology (node constraints resolved once).
#[derive(Debug, Clone)]
pub struct Scheme {
    pub cfg: SchemeConfig,
    kinds: Vec<NodeKind>,
    t_ref: f64,
}

fn locate(e: HtcError, cell: usize) -> HtcError {
    match e {
        HtcError::Inadmissible { reason, .. } => HtcError::Inadmissible { cell, reason },
        e => e,
    }
}

impl Scheme {
    pub fn new(cfg: SchemeConfig, mesh: &MovingMesh) -> Result<Self> {
        cfg.eos.validate()?;
        if let Viscosity::Rusanov { k } = cfg.viscosity {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(HtcError::Parameter(format!("k_visc must be >= 0, got {k}")));
            }
        }
        let kinds = cfg.boundary.classify(mesh.topology())?;
        let t_ref = cfg.eos.t_ref()?;
        Ok(Scheme { cfg, kinds, t_ref })
    }

    pub fn node_kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn duals(&self, states: &[CellState]) -> Result<Vec<DualVars>> {
        let eos = &self.cfg.eos;
        self.cfg
            .exec
            .try_map(states.len(), |c| dual_variables(&states[c], eos).map_err(|e| locate(e, c)))
    }

    /// Evaluates the right-hand side at time `t`.
    pub fn rhs(&self, mesh: &MovingMesh, states: &[CellState], t: f64) -> Result<RhsEval> {
        let exec = self.cfg.exec;
        let eos = &self.cfg.eos;
        if states.len() != mesh.n_cells() {
            return Err(HtcError::InvalidInput("one state per cell required".into()));
        }
        let geom = CornerGeometry::build(mesh, exec)?;
        let duals = self.duals(states)?;
        let fluxes: Vec<CellFlux> = exec.map(states.len(), |c| {
            let d = &duals[c];
            CellFlux {
                v: states[c].v,
                p: d.p,
                rho: d.rho,
                t: d.t,
                sigma: Mat2::new(d.sigma[(0, 0)], d.sigma[(0, 1)], d.sigma[(1, 0)], d.sigma[(1, 1)]),
                beta: Vec2::new(d.beta.x, d.beta.y),
                wave: eos.wave_speed(d.c2),
                sound: d.c2.max(0.0).sqrt(),
            }
        });

        let bc = &self.cfg.boundary;
        let nodal = exec.try_map(mesh.n_nodes(), |p| {
            solve_node(mesh, &geom, &fluxes, p, self.kinds[p], t, bc, self.cfg.viscosity)
        })?;

        let tris = mesh.topology().tris();
        let per_cell = exec.try_map(mesh.n_cells(), |c| {
            let st = &states[c];
            let d = &duals[c];
            let f = &fluxes[c];
            let m = st.mass;
            let rb_c = f.rho_beta();
            let mut d_tau = 0.0;
            let mut mom = Vec2::zeros();
            let mut ent = 0.0;
            let mut big_pi = 0.0;
            let mut grad_v = nalgebra::Matrix2::<f64>::zeros();
            let mut jflux = Vec2::zeros();
            let j2 = Vec2::new(st.j.x, st.j.y);
            for k in 0..3 {
                let p = tris[c][k];
                let n = &nodal[p];
                let ln = geom.lnpc[c][k];
                let l = geom.lpc[c][k];
                let dv = n.v - f.v;
                let visc = n.alpha + n.eps;
                d_tau += ln.dot(&dv);
                mom -= ln * (n.p - f.p) + (n.sigma - f.sigma) * ln;
                mom -= (f.v - n.v) * (l * visc);
                ent -= ln.dot(&(n.rho_beta() - rb_c));
                big_pi += geom.cell_area[c] * CornerGeometry::SUBCELL_FRAC / geom.dual_area[p] * n.entropy_production();
                grad_v += dv * ln.transpose();
                jflux += ln * (j2.dot(&dv) + (n.t - f.t) + visc * n.div_j);
            }
            big_pi /= f.t;
            let mut m3 = Mat3::zeros();
            m3.fixed_view_mut::<2, 2>(0, 0).copy_from(&grad_v);
            let src = relaxation_sources(st, d, eos, self.t_ref, self.cfg.closure.as_ref()).map_err(|e| locate(e, c))?;
            let scale = f.rho / m;
            let rate = CellRate {
                tau: d_tau / m,
                v: mom / m,
                s: (ent + big_pi) / m + src.pi,
                a: -(st.a * m3) * scale + src.d_a,
                j: -Vec3::new(jflux.x, jflux.y, 0.0) * scale + src.d_j,
            };
            let finite = rate.tau.is_finite()
                && rate.v.iter().all(|x| x.is_finite())
                && rate.s.is_finite()
                && rate.a.iter().all(|x| x.is_finite())
                && rate.j.iter().all(|x| x.is_finite());
            if !finite {
                return Err(HtcError::Numerical(format!("non-finite time derivative in cell {c}")));
            }
            Ok((rate, big_pi, src.pi))
        })?;

        let mut cells = Vec::with_capacity(per_cell.len());
        let mut big_pi = Vec::with_capacity(per_cell.len());
        let mut small_pi = Vec::with_capacity(per_cell.len());
        for (r, bp, sp) in per_cell {
            cells.push(r);
            big_pi.push(bp);
            small_pi.push(sp);
        }
        let nodes = nodal.iter().map(|n| n.v).collect();
        Ok(RhsEval {
            geom,
            duals,
            fluxes,
            nodal,
            deriv: StateDerivative { cells, nodes },
            big_pi,
            small_pi,
        })
    }
}

impl RhsEval {
    /// `Σ_c m_c w_c · dq_c/dt` with `w = (−p, v, T, Γ, β)`.
    pub fn energy_rate(&self, states: &[CellState]) -> f64 {
        let mut sum = CompensatedSum::new();
        for ((s, d), r) in states.iter().zip(&self.duals).zip(&self.deriv.cells) {
            let parts = [
                -d.p * r.tau,
                s.v.dot(&r.v),
                d.t * r.s,
                ddot(&d.gamma, &r.a),
                d.beta.dot(&r.j),
            ];
            for x in parts {
                sum.add(s.mass * x);
            }
        }
        sum.value()
    }

    /// Total energy flux out of the domain, `Σ_p n_p · (p_p v_p + σ_p v_p + ρ_p T_p β_p)`.
    pub fn boundary_power(&self) -> f64 {
        compensated_sum(self.nodal.iter().map(|n| n.boundary_flux))
    }

    /// Energy monitor: total energy change not accounted for by boundary fluxes.
    pub fn energy_residual(&self, states: &[CellState]) -> f64 {
        let mut sum = CompensatedSum::new();
        sum.add(self.energy_rate(states));
        sum.add(self.boundary_power());
        sum.value().abs()
    }

    /// Determinant monitor `max_c |−(|A_c|/|ω_c|) Σ l_pc n_pc·(v_p − v_c) + (ρ_c²/ρ_c(0)) dτ_c/dt|`.
    pub fn det_residual(&self, mesh: &MovingMesh, states: &[CellState]) -> f64 {
        let tris = mesh.topology().tris();
        (0..states.len())
            .map(|c| {
                let s = &states[c];
                let div: f64 = (0..3)
                    .map(|k| self.geom.lnpc[c][k].dot(&(self.nodal[tris[c][k]].v - s.v)))
                    .sum();
                let rho = 1.0 / s.tau;
                (-s.a.determinant() / self.geom.cell_area[c] * div + rho * rho / s.rho0 * self.deriv.cells[c].tau).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Entropy balance of each cell: `m_c dS_c/dt + Σ l_pc n_pc·(ρ_p β_p − ρ_c β_c)`,
    /// which must equal `Π_c + m_c π_c ≥ 0`.
    pub fn entropy_balance(&self, mesh: &MovingMesh, states: &[CellState]) -> Vec<f64> {
        let tris = mesh.topology().tris();
        (0..states.len())
            .map(|c| {
                let flux: f64 = (0..3)
                    .map(|k| {
                        self.geom.lnpc[c][k].dot(&(self.nodal[tris[c][k]].rho_beta() - self.fluxes[c].rho_beta()))
                    })
                    .sum();
                states[c].mass * self.deriv.cells[c].s + flux
            })
            .collect()
    }

    /// Total entropy production rate `Σ_c (Π_c + m_c π_c)`.
    pub fn entropy_production(&self, states: &[CellState]) -> f64 {
        compensated_sum(
            states
                .iter()
                .zip(self.big_pi.iter().zip(&self.small_pi))
                .map(|(s, (bp, sp))| bp + s.mass * sp),
        )
    }
}

//! Benchmark problems: initial and boundary data, materials and exact solutions.

mod becker;
mod beryllium;
mod rotor;
mod vortex;

pub use becker::{case_viscous_shock, BeckerShock};
pub use beryllium::{beryllium_velocity, case_beryllium_plate};
pub use rotor::case_solid_rotor;
pub use vortex::{case_isentropic_vortex, vortex_state};

use std::fmt;
use std::sync::Arc;

use crate::error::{HtcError, Result};
use crate::mesh::{build_rect_mesh, jitter_interior_nodes, MovingMesh};
use crate::nodal::{BoundaryConfig, Viscosity};
use crate::numerics::{Mat3, Vec2, Vec3};
use crate::scheme::{Scheme, SchemeConfig};
use crate::thermo::{relaxation_times_from_transport, CellState, EosParams};
use crate::timeloop::{SystemState, TimeConfig};

/// Density, velocity and pressure at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: Vec2,
    pub p: f64,
}

pub type InitialFn = Arc<dyn Fn(Vec2) -> Primitive + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(Vec2, f64) -> Primitive + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    IsentropicVortex,
    ViscousShock,
    SolidRotor,
    BerylliumPlate,
}

impl CaseName {
    pub const ALL: [CaseName; 4] = [
        CaseName::IsentropicVortex,
        CaseName::ViscousShock,
        CaseName::SolidRotor,
        CaseName::BerylliumPlate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseName::IsentropicVortex => "isentropic_vortex",
            CaseName::ViscousShock => "viscous_shock",
            CaseName::SolidRotor => "solid_rotor",
            CaseName::BerylliumPlate => "beryllium_plate",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        CaseName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| HtcError::InvalidInput(format!("unknown case `{s}`")))
    }

    pub fn spec(self) -> Result<CaseSpec> {
        match self {
            CaseName::IsentropicVortex => Ok(case_isentropic_vortex()),
            CaseName::ViscousShock => case_viscous_shock(),
            CaseName::SolidRotor => Ok(case_solid_rotor()),
            CaseName::BerylliumPlate => Ok(case_beryllium_plate()),
        }
    }
}

/// Complete description of a benchmark run before the mesh is built.
#[derive(Clone)]
pub struct CaseSpec {
    pub name: CaseName,
    pub x0: Vec2,
    pub x1: Vec2,
    pub nx: usize,
    pub ny: usize,
    pub jitter: f64,
    pub seed: u64,
    pub eos: EosParams,
    /// Dynamic viscosity and heat conductivity; when positive they set `τ₁`, `τ₂`.
    pub mu: f64,
    pub kappa: f64,
    pub boundary: BoundaryConfig,
    pub viscosity: Viscosity,
    pub cfl: f64,
    pub t_final: f64,
    pub initial: InitialFn,
    pub exact: Option<ExactFn>,
    /// Material point whose trajectory is recorded.
    pub track: Option<Vec2>,
}

impl fmt::Debug for CaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CaseSpec")
            .field("name", &self.name)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("eos", &self.eos)
            .field("mu", &self.mu)
            .field("kappa", &self.kappa)
            .field("boundary", &self.boundary)
            .field("viscosity", &self.viscosity)
            .field("cfl", &self.cfl)
            .field("t_final", &self.t_final)
            .finish()
    }
}

/// A built case: scheme, initial system state and time settings.
#[derive(Debug, Clone)]
pub struct Case {
    pub spec: CaseSpec,
    pub scheme: Scheme,
    pub state: SystemState,
    pub time: TimeConfig,
}

/// Cell state at rest in its reference configuration (`A = I`, `J = 0`).
pub fn cell_from_primitive(prim: &Primitive, area: f64, eos: &EosParams) -> Result<CellState> {
    if !(prim.rho > 0.0) {
        return Err(HtcError::InvalidInput(format!("initial density {} not positive", prim.rho)));
    }
    let s = eos.entropy(prim.rho, prim.p);
    if !s.is_finite() {
        return Err(HtcError::InvalidInput(format!(
            "initial state rho = {}, p = {} has no finite entropy",
            prim.rho, prim.p
        )));
    }
    Ok(CellState {
        tau: 1.0 / prim.rho,
        v: prim.v,
        s,
        a: Mat3::identity(),
        j: Vec3::zeros(),
        mass: area * prim.rho,
        rho0: prim.rho,
    })
}

impl CaseSpec {
    /// Material parameters with the relaxation times implied by `mu` and `kappa`.
    pub fn resolved_eos(&self) -> Result<EosParams> {
        let mut eos = self.eos;
        if self.mu > 0.0 || self.kappa > 0.0 {
            let t0 = eos.t_ref()?;
            let (t1, t2) = relaxation_times_from_transport(self.mu, self.kappa, eos.rho_ref, t0, eos.cs, eos.ch)?;
            if self.mu > 0.0 {
                eos.tau1 = t1;
            }
            if self.kappa > 0.0 {
                eos.tau2 = t2;
            }
        }
        eos.validate()?;
        Ok(eos)
    }

    pub fn build_mesh(&self) -> Result<MovingMesh> {
        let mesh = build_rect_mesh(self.x0, self.x1, self.nx, self.ny)?;
        if self.jitter > 0.0 {
            jitter_interior_nodes(&mesh, self.jitter, self.seed)
        } else {
            Ok(mesh)
        }
    }

    /// Builds mesh, initial cell states and scheme.
    pub fn build(&self) -> Result<Case> {
        self.build_on(self.build_mesh()?)
    }

    /// Same as [`CaseSpec::build`] on a given mesh.
    pub fn build_on(&self, mesh: MovingMesh) -> Result<Case> {
        let eos = self.resolved_eos()?;
        let cells = (0..mesh.n_cells())
            .map(|c| cell_from_primitive(&(self.initial)(mesh.centroid(c)), mesh.signed_area(c), &eos))
            .collect::<Result<Vec<_>>>()?;
        let scheme = Scheme::new(SchemeConfig::new(eos, self.viscosity, self.boundary.clone()), &mesh)?;
        // Every cell must be admissible before the first step.
        scheme.duals(&cells)?;
        Ok(Case {
            spec: self.clone(),
            scheme,
            state: SystemState { mesh, cells, t: 0.0 },
            time: TimeConfig::new(self.cfl, self.t_final),
        })
    }
}

/// Volume-weighted L2 errors of density, x-velocity and pressure against
/// `exact` evaluated at the current cell centroids.
pub fn l2_errors(state: &SystemState, scheme: &Scheme, exact: &dyn Fn(Vec2, f64) -> Primitive) -> Result<[f64; 3]> {
    let duals = scheme.duals(&state.cells)?;
    let mut sums = [0.0; 3];
    for (c, (s, d)) in state.cells.iter().zip(&duals).enumerate() {
        let area = state.mesh.signed_area(c);
        let ex = exact(state.mesh.centroid(c), state.t);
        sums[0] += area * (d.rho - ex.rho).powi(2);
        sums[1] += area * (s.v.x - ex.v.x).powi(2);
        sums[2] += area * (d.p - ex.p).powi(2);
    }
    Ok(sums.map(f64::sqrt))
}

/// One line of a convergence table; `eoc` is `None` on the first row or when `h` repeats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocRow {
    pub h: f64,
    pub errors: [f64; 3],
    pub eoc: [Option<f64>; 3],
}

/// Experimental orders `ln(e₁/e₂)/ln(h₁/h₂)` between consecutive runs.
pub fn l2_error_and_eoc(runs: &[(f64, [f64; 3])]) -> Result<Vec<EocRow>> {
    if runs.len() < 2 {
        return Err(HtcError::InvalidInput("convergence table needs at least two runs".into()));
    }
    Ok(runs
        .iter()
        .enumerate()
        .map(|(i, &(h, errors))| {
            let eoc = if i == 0 {
                [None; 3]
            } else {
                let (h0, e0) = runs[i - 1];
                std::array::from_fn(|k| {
                    let r = (e0[k] / errors[k]).ln() / (h0 / h).ln();
                    (r.is_finite() && h0 != h).then_some(r)
                })
            };
            EocRow { h, errors, eoc }
        })
        .collect())
}

use std::f64::consts::PI;
use std::sync::Arc;

use super::{CaseName, CaseSpec, Primitive};
use crate::nodal::{BoundaryConfig, BoundaryKind, Viscosity};
use crate::numerics::Vec2;
use crate::thermo::EosParams;

const GAMMA: f64 = 1.4;
const STRENGTH: f64 = 5.0;
const CENTER: f64 = 5.0;

/// Stationary isentropic vortex on a unit background state.
pub fn vortex_state(x: Vec2) -> Primitive {
    let d = x - Vec2::new(CENTER, CENTER);
    let r2 = d.norm_squared();
    let dv = STRENGTH / (2.0 * PI) * ((1.0 - r2) / 2.0).exp();
    let dt = -(GAMMA - 1.0) * STRENGTH * STRENGTH / (8.0 * GAMMA * PI * PI) * (1.0 - r2).exp();
    let rho = (1.0 + dt).powf(1.0 / (GAMMA - 1.0));
    Primitive {
        rho,
        v: Vec2::new(-d.y, d.x) * dv,
        p: rho.powf(GAMMA),
    }
}

pub fn case_isentropic_vortex() -> CaseSpec {
    CaseSpec {
        name: CaseName::IsentropicVortex,
        x0: Vec2::new(0.0, 0.0),
        x1: Vec2::new(10.0, 10.0),
        nx: 16,
        ny: 16,
        jitter: 0.0,
        seed: 0,
        eos: EosParams::ideal_gas(GAMMA, 2.5),
        mu: 0.0,
        kappa: 0.0,
        boundary: BoundaryConfig::uniform(BoundaryKind::SlipWall),
        viscosity: Viscosity::Ecl,
        cfl: 0.05,
        t_final: 1.0,
        initial: Arc::new(vortex_state),
        exact: Some(Arc::new(|x, _| vortex_state(x))),
        track: None,
    }
}

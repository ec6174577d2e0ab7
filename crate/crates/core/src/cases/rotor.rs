use std::sync::Arc;

use super::{CaseName, CaseSpec, Primitive};
use crate::nodal::{BoundaryConfig, BoundaryKind, Viscosity};
use crate::numerics::Vec2;
use crate::thermo::EosParams;

const RADIUS: f64 = 0.2;

fn rotor_state(x: Vec2) -> Primitive {
    let v = if x.norm() < RADIUS {
        Vec2::new(-x.y / RADIUS, x.x / RADIUS)
    } else {
        Vec2::zeros()
    };
    Primitive { rho: 1.0, v, p: 1.0 }
}

/// Elastic disc spinning inside a solid at rest. Default mesh edge 1/50.
pub fn case_solid_rotor() -> CaseSpec {
    CaseSpec {
        name: CaseName::SolidRotor,
        x0: Vec2::new(-1.0, -1.0),
        x1: Vec2::new(1.0, 1.0),
        nx: 100,
        ny: 100,
        jitter: 0.0,
        seed: 0,
        eos: EosParams {
            cs: 1.0,
            ch: 1.0,
            ..EosParams::ideal_gas(1.4, 2.5)
        },
        mu: 0.0,
        kappa: 0.0,
        boundary: BoundaryConfig::uniform(BoundaryKind::SlipWall),
        viscosity: Viscosity::Rusanov { k: 0.5 },
        cfl: 0.05,
        t_final: 0.3,
        initial: Arc::new(rotor_state),
        exact: None,
        track: None,
    }
}

use std::sync::Arc;

use super::{CaseName, CaseSpec, Primitive};
use crate::nodal::{BoundaryConfig, BoundaryKind, Viscosity};
use crate::numerics::Vec2;
use crate::thermo::{EosKind, EosParams, NO_RELAXATION};

const LENGTH: f64 = 0.06;
const ALPHA: f64 = 78.834;
const AMPLITUDE: f64 = 4.3369e-5;
const OMEGA: f64 = 2.3597e5;
const A1: f64 = 56.6368;
const A2: f64 = 57.6455;

/// Vertical velocity of the first bending mode of a free plate.
pub fn beryllium_velocity(x: f64) -> f64 {
    let xp = ALPHA * (x + LENGTH / 2.0);
    AMPLITUDE * OMEGA * (A1 * (xp.sinh() + xp.sin()) - A2 * (xp.cosh() + xp.cos()))
}

/// Free elastic plate set into bending oscillation. Default mesh has 2016 cells
/// and a node at the origin.
pub fn case_beryllium_plate() -> CaseSpec {
    CaseSpec {
        name: CaseName::BerylliumPlate,
        x0: Vec2::new(-0.03, -0.005),
        x1: Vec2::new(0.03, 0.005),
        nx: 72,
        ny: 14,
        jitter: 0.0,
        seed: 0,
        eos: EosParams {
            kind: EosKind::StiffenedGas,
            gamma: 1.11,
            cv: 1.0,
            c0: 12870.0,
            rho_ref: 1.0,
            p_ref: 0.0,
            gruneisen: 1.124,
            cs: 9046.59,
            ch: 0.0,
            tau1: NO_RELAXATION,
            tau2: NO_RELAXATION,
        },
        mu: 0.0,
        kappa: 0.0,
        boundary: BoundaryConfig::uniform(BoundaryKind::FreeTraction),
        viscosity: Viscosity::Ecl,
        cfl: 0.05,
        t_final: 3e-5,
        initial: Arc::new(|x: Vec2| Primitive {
            rho: 1.0,
            v: Vec2::new(0.0, beryllium_velocity(x.x)),
            p: 0.0,
        }),
        exact: None,
        track: Some(Vec2::zeros()),
    }
}

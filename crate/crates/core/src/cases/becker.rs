//! Steady viscous shock of the compressible Navier–Stokes equations at
//! Prandtl number 3/4, where the energy equation integrates to constant total
//! enthalpy and the velocity profile is given implicitly in closed form.

use std::sync::Arc;

use super::{CaseName, CaseSpec, Primitive};
use crate::error::{HtcError, Result};
use crate::nodal::{BoundaryConfig, BoundaryKind, Exterior, Viscosity};
use crate::numerics::Vec2;
use crate::mesh::Side;
use crate::thermo::EosParams;

/// Shock travelling in +x into gas at rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeckerShock {
    pub gamma: f64,
    pub rho1: f64,
    pub p1: f64,
    pub mach: f64,
    pub mu: f64,
    /// Shock centre at t = 0.
    pub x_center: f64,
    /// Shock speed.
    pub s: f64,
    /// Pre- and post-shock speeds relative to the shock.
    pub u1: f64,
    pub u2: f64,
    mass_flux: f64,
    enthalpy: f64,
    width: f64,
}

impl BeckerShock {
    pub fn new(gamma: f64, rho1: f64, p1: f64, mach: f64, mu: f64, x_center: f64) -> Result<Self> {
        if !(gamma > 1.0 && rho1 > 0.0 && p1 > 0.0 && mach > 1.0 && mu > 0.0) {
            return Err(HtcError::Parameter("shock needs gamma > 1, rho, p, mu > 0 and Mach > 1".into()));
        }
        let c1 = (gamma * p1 / rho1).sqrt();
        let s = mach * c1;
        let u1 = s;
        let u2 = u1 * (gamma - 1.0 + 2.0 / (mach * mach)) / (gamma + 1.0);
        let mass_flux = rho1 * u1;
        Ok(BeckerShock {
            gamma,
            rho1,
            p1,
            mach,
            mu,
            x_center,
            s,
            u1,
            u2,
            mass_flux,
            enthalpy: gamma * p1 / ((gamma - 1.0) * rho1) + 0.5 * u1 * u1,
            width: 8.0 * gamma * mu / (3.0 * (gamma + 1.0) * mass_flux),
        })
    }

    /// Distance downstream of the shock centre at which the relative speed equals `u`.
    pub fn position_of_speed(&self, u: f64) -> f64 {
        let (u1, u2) = (self.u1, self.u2);
        let um = (u1 * u2).sqrt();
        let d = u1 - u2;
        self.width * (u1 / d * ((u1 - u) / (u1 - um)).ln() - u2 / d * ((u - u2) / (um - u2)).ln())
    }

    /// Relative speed at distance `xi` downstream of the centre (bisection on the implicit profile).
    pub fn speed_at(&self, xi: f64) -> Result<f64> {
        if !xi.is_finite() {
            return Err(HtcError::Numerical(format!("shock profile queried at {xi}")));
        }
        let (mut lo, mut hi) = (self.u2, self.u1);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.position_of_speed(mid) > xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Lab-frame density, x-velocity and pressure at `x`, `t`.
    pub fn state(&self, x: f64, t: f64) -> Result<Primitive> {
        let xi = self.x_center + self.s * t - x;
        let u = self.speed_at(xi)?;
        let rho = self.mass_flux / u;
        let p = (self.gamma - 1.0) / self.gamma * rho * (self.enthalpy - 0.5 * u * u);
        Ok(Primitive {
            rho,
            v: Vec2::new(self.s - u, 0.0),
            p,
        })
    }

    /// Momentum flux `ρu² + p − (4/3) μ du/dξ` in the shock frame, by central differences.
    pub fn momentum_flux(&self, xi: f64) -> Result<f64> {
        let h = 1e-6;
        let u = self.speed_at(xi)?;
        let du = (self.speed_at(xi + h)? - self.speed_at(xi - h)?) / (2.0 * h);
        let rho = self.mass_flux / u;
        let p = (self.gamma - 1.0) / self.gamma * rho * (self.enthalpy - 0.5 * u * u);
        Ok(rho * u * u + p - 4.0 / 3.0 * self.mu * du)
    }

    pub fn mass_flux(&self) -> f64 {
        self.mass_flux
    }
}

/// Mach 2 viscous shock at Re = 100 between Dirichlet ends.
pub fn case_viscous_shock() -> Result<CaseSpec> {
    let eos = EosParams {
        cs: 20.0,
        ch: 20.0,
        rho_ref: 1.0,
        p_ref: 1.0 / 1.4,
        ..EosParams::ideal_gas(1.4, 2.5)
    };
    let mu = 2e-2;
    let shock = BeckerShock::new(eos.gamma, 1.0, 1.0 / 1.4, 2.0, mu, 0.25)?;
    let exact = move |x: Vec2, t: f64| shock.state(x.x, t).expect("finite query");
    let mut boundary = BoundaryConfig::uniform(BoundaryKind::Dirichlet);
    boundary.set(Side::Bottom, BoundaryKind::SlipWall);
    boundary.set(Side::Top, BoundaryKind::SlipWall);
    let cv = eos.cv;
    let g = eos.gamma;
    boundary.exterior = Some(Arc::new(move |x: Vec2, t: f64| {
        let s = exact(x, t);
        Exterior {
            rho: s.rho,
            v: s.v,
            p: s.p,
            t: s.p / ((g - 1.0) * s.rho * cv),
        }
    }));
    Ok(CaseSpec {
        name: CaseName::ViscousShock,
        x0: Vec2::new(0.0, 0.0),
        x1: Vec2::new(1.0, 0.2),
        nx: 100,
        ny: 20,
        jitter: 0.0,
        seed: 0,
        eos,
        mu,
        kappa: 9.3333e-2,
        boundary,
        viscosity: Viscosity::Ecl,
        cfl: 0.05,
        t_final: 0.2,
        initial: Arc::new(move |x| exact(x, 0.0)),
        exact: Some(Arc::new(exact)),
        track: None,
    })
}

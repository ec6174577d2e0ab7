//! GPR thermodynamics: equations of state, energy decomposition, dual
//! (Godunov) variables, stress and relaxation sources.

use crate::error::{HtcError, Result};
use crate::numerics::{ddot, Mat3, Vec2, Vec3};

/// Relaxation time standing in for "no source" (inviscid, non-conducting).
pub const NO_RELAXATION: f64 = 1e20;

/// Evolved variables of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    pub tau: f64,
    pub v: Vec2,
    pub s: f64,
    pub a: Mat3,
    pub j: Vec3,
    pub mass: f64,
    pub rho0: f64,
}

impl CellState {
    pub fn rho(&self) -> f64 {
        1.0 / self.tau
    }
}

/// Energy gradients of a cell state, plus the stress and total energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualVars {
    pub rho: f64,
    pub p: f64,
    pub t: f64,
    pub gamma: Mat3,
    pub beta: Vec3,
    pub sigma: Mat3,
    pub e_internal: f64,
    pub e_total: f64,
    /// Squared adiabatic sound speed of the equation of state.
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EosKind {
    IdealGas,
    /// `p + P∞ = (ρ_ref c0²/γ) (ρ/ρ_ref)^γ exp(S/cv)` with `P∞` chosen so that `p(ρ_ref, S = 0) = p_ref`.
    StiffenedGas,
}

/// Material parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    pub kind: EosKind,
    pub gamma: f64,
    pub cv: f64,
    pub c0: f64,
    pub rho_ref: f64,
    pub p_ref: f64,
    /// Grüneisen coefficient; carried for reference, the stiffened form does not use it.
    pub gruneisen: f64,
    pub cs: f64,
    pub ch: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl EosParams {
    pub fn ideal_gas(gamma: f64, cv: f64) -> Self {
        EosParams {
            kind: EosKind::IdealGas,
            gamma,
            cv,
            c0: 1.0,
            rho_ref: 1.0,
            p_ref: 1.0,
            gruneisen: 0.0,
            cs: 0.0,
            ch: 0.0,
            tau1: NO_RELAXATION,
            tau2: NO_RELAXATION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(HtcError::Parameter(what.to_string()))
            }
        };
        check(self.gamma > 1.0 && self.gamma.is_finite(), "gamma must be > 1")?;
        check(self.cv > 0.0 && self.cv.is_finite(), "cv must be > 0")?;
        check(self.cs >= 0.0 && self.cs.is_finite(), "cs must be >= 0")?;
        check(self.ch >= 0.0 && self.ch.is_finite(), "ch must be >= 0")?;
        check(self.tau1 > 0.0, "tau1 must be > 0")?;
        check(self.tau2 > 0.0, "tau2 must be > 0")?;
        check(self.rho_ref > 0.0 && self.rho_ref.is_finite(), "rho_ref must be > 0")?;
        if self.kind == EosKind::StiffenedGas {
            check(self.c0 > 0.0 && self.c0.is_finite(), "c0 must be > 0")?;
            check(self.p_inf() >= 0.0, "p_ref too large for c0 (negative stiffening pressure)")?;
        }
        Ok(())
    }

    /// Stiffening pressure `P∞` (zero for the ideal gas).
    pub fn p_inf(&self) -> f64 {
        match self.kind {
            EosKind::IdealGas => 0.0,
            EosKind::StiffenedGas => self.rho_ref * self.c0 * self.c0 / self.gamma - self.p_ref,
        }
    }

    /// Internal energy, pressure and temperature `(E1, p, T)` as functions of `(τ, S)`.
    pub fn internal_energy(&self, tau: f64, s: f64) -> Result<(f64, f64, f64)> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(HtcError::Inadmissible {
                cell: usize::MAX,
                reason: format!("specific volume {tau:e}"),
            });
        }
        let g = self.gamma;
        let (e1, p, t) = match self.kind {
            EosKind::IdealGas => {
                let e1 = (s / self.cv).exp() * tau.powf(1.0 - g) / (g - 1.0);
                (e1, (g - 1.0) * e1 / tau, e1 / self.cv)
            }
            EosKind::StiffenedGas => {
                let tau_ref = 1.0 / self.rho_ref;
                let k = self.c0 * self.c0 / (g * (g - 1.0));
                let thermal = k * (tau_ref / tau).powf(g - 1.0) * (s / self.cv).exp();
                let p_inf = self.p_inf();
                (thermal + tau * p_inf, (g - 1.0) * thermal / tau - p_inf, thermal / self.cv)
            }
        };
        if !(t > 0.0) || !e1.is_finite() || !p.is_finite() {
            return Err(HtcError::Inadmissible {
                cell: usize::MAX,
                reason: format!("temperature {t:e} at tau = {tau:e}, S = {s:e}"),
            });
        }
        Ok((e1, p, t))
    }

    /// Specific entropy of the state with density `rho` and pressure `p`.
    pub fn entropy(&self, rho: f64, p: f64) -> f64 {
        let g = self.gamma;
        match self.kind {
            EosKind::IdealGas => self.cv * (p.ln() - g * rho.ln()),
            EosKind::StiffenedGas => {
                let scale = self.rho_ref * self.c0 * self.c0 / g;
                self.cv * (((p + self.p_inf()) / scale).ln() - g * (rho / self.rho_ref).ln())
            }
        }
    }

    /// Temperature at density `rho` and pressure `p`.
    pub fn temperature(&self, rho: f64, p: f64) -> Result<f64> {
        Ok(self.internal_energy(1.0 / rho, self.entropy(rho, p))?.2)
    }

    /// Squared adiabatic sound speed `∂p/∂ρ` at constant entropy.
    pub fn sound_speed_sq(&self, rho: f64, p: f64) -> f64 {
        self.gamma * (p + self.p_inf()) / rho
    }

    /// Temperature of the reference state `(ρ_ref, p_ref)`.
    pub fn t_ref(&self) -> Result<f64> {
        self.temperature(self.rho_ref, self.p_ref)
    }

    /// Largest wave speed estimate `sqrt(c² + 4/3 c_s² + c_h²)` for a local sound speed `c`.
    pub fn wave_speed(&self, c2: f64) -> f64 {
        (c2 + 4.0 / 3.0 * self.cs * self.cs + self.ch * self.ch).sqrt()
    }
}

/// Trace-free part of `G = AᵀA`, with the trace removed exactly.
pub fn trace_free_metric(a: &Mat3) -> Mat3 {
    let mut g = a.transpose() * a;
    let third = (g[(0, 0)] + g[(1, 1)] + g[(2, 2)]) / 3.0;
    g[(0, 0)] -= third;
    g[(1, 1)] -= third;
    g[(2, 2)] = -(g[(0, 0)] + g[(1, 1)]);
    g
}

/// Evaluates the dual variables of `state`.
pub fn dual_variables(state: &CellState, eos: &EosParams) -> Result<DualVars> {
    let (e1, p, t) = eos.internal_energy(state.tau, state.s)?;
    let rho = 1.0 / state.tau;
    let g0 = trace_free_metric(&state.a);
    let cs2 = eos.cs * eos.cs;
    let ch2 = eos.ch * eos.ch;
    let gamma = cs2 * state.a * g0;
    let beta = ch2 * state.j;
    let sigma = rho * state.a.transpose() * gamma + rho * state.j * beta.transpose();
    let e_total = e1 + 0.5 * state.v.norm_squared() + 0.25 * cs2 * ddot(&g0, &g0) + 0.5 * ch2 * state.j.norm_squared();
    Ok(DualVars {
        rho,
        p,
        t,
        gamma,
        beta,
        sigma,
        e_internal: e1,
        e_total,
        c2: eos.sound_speed_sq(rho, p),
    })
}

/// Source rates of a cell: `dA/dt`, `dJ/dt` contributions and entropy production `π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    pub d_a: Mat3,
    pub d_j: Vec3,
    pub pi: f64,
}

/// Strain and heat-flux relaxation closures `Γ/θ₁` and `β/θ₂`.
///
/// `θ₁ = (τ₁/3) c_s² |A|^{-5/3}` and `θ₂ = τ₂ c_h² ρ_ref T_ref / (ρ T)`. With
/// these, `μ = ρ₀ c_s² τ₁ / 6` and `κ = ρ₀ T₀ c_h² τ₂` hold exactly, for any state.
/// The `c_s²`, `c_h²` factors cancel against those in `Γ` and `β`, so the
/// rates are evaluated without dividing by the wave speeds.
pub trait RelaxationClosure: Sync {
    fn strain_rate(&self, state: &CellState, duals: &DualVars, eos: &EosParams) -> Mat3;
    fn heat_rate(&self, state: &CellState, duals: &DualVars, eos: &EosParams, t_ref: f64) -> Vec3;
}

/// The default closures described on [`RelaxationClosure`].
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardClosure;

impl RelaxationClosure for StandardClosure {
    fn strain_rate(&self, state: &CellState, _duals: &DualVars, eos: &EosParams) -> Mat3 {
        let det = state.a.determinant();
        (3.0 / eos.tau1) * det.abs().powf(5.0 / 3.0) * state.a * trace_free_metric(&state.a)
    }

    fn heat_rate(&self, state: &CellState, duals: &DualVars, eos: &EosParams, t_ref: f64) -> Vec3 {
        state.j * (duals.rho * duals.t / (eos.tau2 * eos.rho_ref * t_ref))
    }
}

/// Source terms of one cell; the `A` and `J` rates are per unit time (already divided by `m_c`).
pub fn relaxation_sources(
    state: &CellState,
    duals: &DualVars,
    eos: &EosParams,
    t_ref: f64,
    closure: &dyn RelaxationClosure,
) -> Result<Relaxation> {
    if !(duals.t > 0.0) {
        return Err(HtcError::Inadmissible {
            cell: usize::MAX,
            reason: format!("temperature {:e}", duals.t),
        });
    }
    let gamma_rate = closure.strain_rate(state, duals, eos);
    let beta_rate = closure.heat_rate(state, duals, eos, t_ref);
    let pi = (ddot(&duals.gamma, &gamma_rate) + duals.beta.dot(&beta_rate)) / duals.t;
    Ok(Relaxation {
        d_a: -gamma_rate,
        d_j: -beta_rate,
        pi,
    })
}

/// Relaxation times from viscosity and heat conductivity.
///
/// A zero coefficient maps to [`NO_RELAXATION`].
pub fn relaxation_times_from_transport(mu: f64, kappa: f64, rho0: f64, t0: f64, cs: f64, ch: f64) -> Result<(f64, f64)> {
    if mu < 0.0 || kappa < 0.0 {
        return Err(HtcError::Parameter("transport coefficients must be non-negative".into()));
    }
    let tau1 = if mu == 0.0 {
        NO_RELAXATION
    } else if cs > 0.0 {
        6.0 * mu / (rho0 * cs * cs)
    } else {
        return Err(HtcError::Parameter("viscosity requires a positive shear sound speed cs".into()));
    };
    let tau2 = if kappa == 0.0 {
        NO_RELAXATION
    } else if ch > 0.0 {
        kappa / (rho0 * t0 * ch * ch)
    } else {
        return Err(HtcError::Parameter("heat conduction requires a positive heat wave speed ch".into()));
    };
    Ok((tau1, tau2))
}

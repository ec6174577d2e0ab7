//! Nodal solver: conservative node averages, boundary constraints, the
//! energy-compatibility correction `α_p` and the numerical viscosity `ε_p`.
//!
//! Sign convention for the heat-flux divergence: the nodal quantity carried
//! here is `D_p = Σ_{c∈C(p)} l_pc n_pc · ρ_c β_c`, i.e. minus the
//! volume-integrated divergence `|ω_p| ∇·(ρβ)`. It is this `D_p` that enters
//! the thermal impulse equation next to `α_p + ε_p`. With this choice the
//! energy contraction of the `α` terms is exactly `α_p δ_p` with
//! `δ_p = Σ l_pc |v_c − v_p|² + D_p² ≥ 0`, the nodal energy balance closes, and the
//! `ε_p` term diffuses `J` instead of anti-diffusing it. Using the divergence
//! itself in that slot makes the `β` part of the bracket `−D_p²`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;

use crate::error::{HtcError, Result};
use crate::mesh::{CornerGeometry, MovingMesh, Side, SideSet, Topology};
use crate::numerics::Vec2;

pub type Mat2 = Matrix2<f64>;

/// Cell data read by the node phase (in-plane parts only: `v₃ = 0` and
/// corner normals have no third component, so nothing else enters the fluxes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellFlux {
    pub v: Vec2,
    pub p: f64,
    pub rho: f64,
    pub t: f64,
    /// In-plane block of the stress.
    pub sigma: Mat2,
    /// In-plane part of `β`.
    pub beta: Vec2,
    /// Largest wave speed `sqrt(c² + 4/3 c_s² + c_h²)`.
    pub wave: f64,
    pub sound: f64,
}

impl CellFlux {
    pub fn rho_beta(&self) -> Vec2 {
        self.beta * self.rho
    }
}

/// Single-valued node quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeValues {
    pub v: Vec2,
    pub p: f64,
    pub rho: f64,
    pub t: f64,
    pub sigma: Mat2,
    pub beta: Vec2,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    pub nu: f64,
    /// `D_p = Σ l_pc n_pc · ρ_c β_c` (see module docs).
    pub div_j: f64,
    /// Outward boundary normal `Σ_{c∈C(p)} l_pc n_pc` (zero at interior nodes).
    pub normal: Vec2,
    /// Energy leaving through the boundary part of the dual cell, `n·(p v + σ v + ρ T β)`.
    pub boundary_flux: f64,
}

impl NodeValues {
    pub fn rho_beta(&self) -> Vec2 {
        self.beta * self.rho
    }

    /// Nodal numerical entropy production `Π_p = ε_p δ_p`.
    pub fn entropy_production(&self) -> f64 {
        self.eps * self.delta
    }
}

/// Numerical viscosity model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Viscosity {
    /// Entropy conserving: `ε_p = 0`.
    Ecl,
    /// `ε_p = k · max_{c∈C(p)} ρ_c (|v_c − v_p| + a_c)`.
    Rusanov { k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    SlipWall,
    NoSlipWall,
    FreeTraction,
    Dirichlet,
}

impl BoundaryKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::SlipWall => "slip",
            BoundaryKind::NoSlipWall => "noslip",
            BoundaryKind::FreeTraction => "free",
            BoundaryKind::Dirichlet => "dirichlet",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            BoundaryKind::SlipWall,
            BoundaryKind::NoSlipWall,
            BoundaryKind::FreeTraction,
            BoundaryKind::Dirichlet,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Prescribed exterior state of a Dirichlet boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exterior {
    pub rho: f64,
    pub v: Vec2,
    pub p: f64,
    pub t: f64,
}

pub type ExteriorFn = Arc<dyn Fn(Vec2, f64) -> Exterior + Send + Sync>;

/// Boundary condition per side of the rectangle.
#[derive(Clone)]
pub struct BoundaryConfig {
    pub sides: [BoundaryKind; 4],
    pub exterior: Option<ExteriorFn>,
}

impl fmt::Debug for BoundaryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryConfig")
            .field("sides", &self.sides)
            .field("exterior", &self.exterior.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::Bottom => 2,
        Side::Top => 3,
    }
}

impl BoundaryConfig {
    pub fn uniform(kind: BoundaryKind) -> Self {
        BoundaryConfig {
            sides: [kind; 4],
            exterior: None,
        }
    }

    pub fn kind(&self, side: Side) -> BoundaryKind {
        self.sides[side_index(side)]
    }

    pub fn set(&mut self, side: Side, kind: BoundaryKind) {
        self.sides[side_index(side)] = kind;
    }

    /// Resolves the constraint acting on every node.
    ///
    /// Dirichlet sides win over walls at shared corners, no-slip wins over slip.
    pub fn classify(&self, topo: &Topology) -> Result<Vec<NodeKind>> {
        let uses_dirichlet = self.sides.contains(&BoundaryKind::Dirichlet);
        if uses_dirichlet && self.exterior.is_none() && !topo.is_periodic() {
            return Err(HtcError::Boundary("Dirichlet side without an exterior state".into()));
        }
        (0..topo.n_nodes())
            .map(|p| {
                if !topo.is_boundary(p) {
                    return Ok(NodeKind::Interior);
                }
                let tags = topo.tags(p);
                if tags.is_empty() {
                    return Err(HtcError::Boundary(format!("boundary node {p} carries no side tag")));
                }
                let kinds: Vec<(Side, BoundaryKind)> = tags.iter().map(|s| (s, self.kind(s))).collect();
                let has = |k| kinds.iter().any(|&(_, kk)| kk == k);
                if has(BoundaryKind::Dirichlet) {
                    return Ok(NodeKind::Dirichlet);
                }
                let mut slip = SideSet::EMPTY;
                for &(s, k) in &kinds {
                    if k == BoundaryKind::SlipWall {
                        slip = slip.with(s);
                    }
                }
                Ok(NodeKind::Wall {
                    slip,
                    no_slip: has(BoundaryKind::NoSlipWall),
                    free: has(BoundaryKind::FreeTraction),
                })
            })
            .collect()
    }
}

/// Constraint acting on one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Wall { slip: SideSet, no_slip: bool, free: bool },
    Dirichlet,
}

/// `l_pc`-weighted average of the fan values, written as a correction of the
/// first fan member so that uniform fields come out bitwise unchanged.
#[inline]
fn average<T>(fan: &[(usize, usize)], geom: &CornerGeometry, cells: &[CellFlux], f: impl Fn(&CellFlux) -> T) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let base = f(&cells[fan[0].0]);
    let mut lsum = 0.0;
    let mut acc: Option<T> = None;
    for &(c, k) in fan {
        let l = geom.lpc[c][k];
        lsum += l;
        let d = (f(&cells[c]) - base) * l;
        acc = Some(match acc {
            Some(a) => a + d,
            None => d,
        });
    }
    base + acc.unwrap() * (1.0 / lsum)
}

/// Node averages of velocity, pressure, density, temperature, stress and `β`.
pub fn nodal_averages(mesh: &MovingMesh, geom: &CornerGeometry, cells: &[CellFlux], p: usize) -> Result<NodeValues> {
    let fan = mesh.topology().node_cells(p);
    let lsum: f64 = fan.iter().map(|&(c, k)| geom.lpc[c][k]).sum();
    if !(lsum > 0.0) {
        return Err(HtcError::DegenerateFan { node: p });
    }
    Ok(NodeValues {
        v: average(fan, geom, cells, |c| c.v),
        p: average(fan, geom, cells, |c| c.p),
        rho: average(fan, geom, cells, |c| c.rho),
        t: average(fan, geom, cells, |c| c.t),
        sigma: average(fan, geom, cells, |c| c.sigma),
        beta: average(fan, geom, cells, |c| c.beta),
        ..NodeValues::default()
    })
}

/// Overrides node values according to the boundary constraint.
pub fn apply_boundary_constraint(node: &mut NodeValues, kind: NodeKind, x: Vec2, t: f64, bc: &BoundaryConfig) {
    match kind {
        NodeKind::Interior => {}
        NodeKind::Dirichlet => {
            let ext = (bc.exterior.as_ref().expect("classified Dirichlet node without exterior"))(x, t);
            node.v = ext.v;
            node.p = ext.p;
            node.rho = ext.rho;
            node.t = ext.t;
            node.beta = Vec2::zeros();
            node.sigma = Mat2::zeros();
        }
        NodeKind::Wall { slip, no_slip, free } => {
            if no_slip {
                node.v = Vec2::zeros();
            } else {
                for side in slip.iter() {
                    let n = side.normal();
                    node.v -= n * node.v.dot(&n);
                }
            }
            if free {
                node.p = 0.0;
                node.sigma = Mat2::zeros();
            }
        }
    }
}

/// Computes `D_p`, `δ_p`, `ν_p`, the boundary energy flux and `α_p` for a node
/// whose averages and constraints are already in place.
///
/// `α_p` closes the nodal energy balance including the boundary flux, so that
/// `Σ_c w_c · m_c dq_c/dt = −Σ_p n_p · (p_p v_p + σ_p v_p + ρ_p T_p β_p)`.
/// It is set to zero where `δ_p` is at round-off level.
pub fn compatibility_correction(
    mesh: &MovingMesh,
    geom: &CornerGeometry,
    cells: &[CellFlux],
    p: usize,
    kind: NodeKind,
    node: &mut NodeValues,
) -> Result<()> {
    let fan = mesh.topology().node_cells(p);
    let rb_p = node.rho_beta();
    let mut div_j = 0.0;
    let mut vel = 0.0;
    let mut nu = 0.0;
    let mut normal = Vec2::zeros();
    let mut vmax: f64 = 0.0;
    let mut cmax: f64 = 0.0;
    let mut rb_scale = 0.0;
    let mut lsum = 0.0;
    let mut drift = Vec2::zeros();
    for &(c, k) in fan {
        let cell = &cells[c];
        let ln = geom.lnpc[c][k];
        let l = geom.lpc[c][k];
        let rb = cell.rho_beta();
        div_j += ln.dot(&rb);
        vel += l * (cell.v - node.v).norm_squared();
        drift += (cell.v - node.v) * l;
        normal += ln;
        let sl = cell.sigma * ln;
        let spl = node.sigma * ln;
        nu += ln.dot(&(cell.v * cell.p - node.v * cell.p - cell.v * node.p));
        nu += cell.v.dot(&sl) - node.v.dot(&sl) - cell.v.dot(&spl);
        nu += ln.dot(&(rb * cell.t - rb_p * cell.t - rb * node.t));
        vmax = vmax.max(cell.v.norm());
        cmax = cmax.max(cell.sound);
        rb_scale += l * rb.norm();
        lsum += l;
    }
    node.div_j = div_j;
    node.nu = nu;
    node.delta = vel + div_j * div_j;
    if mesh.topology().is_boundary(p) {
        node.normal = normal;
        node.boundary_flux =
            normal.dot(&(node.v * node.p)) + node.v.dot(&(node.sigma * normal)) + node.t * normal.dot(&rb_p);
    }
    node.alpha = 0.0;
    // Velocity and flux differences below a few ulps carry no information.
    let u = vmax + cmax;
    let eps = f64::EPSILON;
    let delta_min = lsum * (4.0 * eps * u).powi(2) + (4.0 * eps * rb_scale).powi(2);
    // A prescribed node velocity is not the corner average, so the viscous
    // momentum exchange also does work against v_p.
    let denom = match kind {
        NodeKind::Dirichlet => node.delta + node.v.dot(&drift),
        _ => node.delta,
    };
    if denom.abs() > delta_min && node.delta > delta_min {
        node.alpha = (nu + node.boundary_flux) / denom;
        if !node.alpha.is_finite() {
            return Err(HtcError::NonFiniteAlpha {
                node: p,
                nu,
                delta: node.delta,
            });
        }
    }
    Ok(())
}

/// Numerical viscosity of a node (zero in ECL mode and at Dirichlet nodes).
pub fn numerical_viscosity(
    mesh: &MovingMesh,
    cells: &[CellFlux],
    p: usize,
    kind: NodeKind,
    node: &NodeValues,
    viscosity: Viscosity,
) -> f64 {
    match (viscosity, kind) {
        (Viscosity::Ecl, _) | (_, NodeKind::Dirichlet) => 0.0,
        (Viscosity::Rusanov { k }, _) => {
            k * mesh
                .topology()
                .node_cells(p)
                .iter()
                .map(|&(c, _)| {
                    let cell = &cells[c];
                    cell.rho * ((cell.v - node.v).norm() + cell.wave)
                })
                .fold(0.0, f64::max)
        }
    }
}

/// Full node phase for node `p`.
#[allow(clippy::too_many_arguments)]
pub fn solve_node(
    mesh: &MovingMesh,
    geom: &CornerGeometry,
    cells: &[CellFlux],
    p: usize,
    kind: NodeKind,
    t: f64,
    bc: &BoundaryConfig,
    viscosity: Viscosity,
) -> Result<NodeValues> {
    let mut node = nodal_averages(mesh, geom, cells, p)?;
    apply_boundary_constraint(&mut node, kind, mesh.nodes()[p], t, bc);
    compatibility_correction(mesh, geom, cells, p, kind, &mut node)?;
    node.eps = numerical_viscosity(mesh, cells, p, kind, &node, viscosity);
    Ok(node)
}

//! Quick invariant suite on a small jittered mesh.

use anyhow::Result;
use lagrange_htc::cases::{case_isentropic_vortex, CaseSpec};
use lagrange_htc::mesh::{build_rect_mesh, jitter_interior_nodes, CornerGeometry, MovingMesh};
use lagrange_htc::nodal::{BoundaryConfig, BoundaryKind, Viscosity};
use lagrange_htc::numerics::{Mat3, Vec2, Vec3};
use lagrange_htc::ops::{curl_node_from_cells, grad_cell_from_nodes};
use lagrange_htc::scheme::{Scheme, SchemeConfig};
use lagrange_htc::thermo::{CellState, EosParams};
use lagrange_htc::timeloop::{run, SystemState, TimeConfig};
use lagrange_htc::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct CheckLine {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.value <= self.tol
    }
}

fn small_mesh(seed: u64) -> Result<MovingMesh> {
    let mesh = build_rect_mesh(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), 8, 8)?;
    Ok(jitter_interior_nodes(&mesh, 0.2, seed)?)
}

fn random_states(mesh: &MovingMesh, rng: &mut ChaCha8Rng) -> Vec<CellState> {
    let mut r = |a: f64| rng.random_range(-a..a);
    (0..mesh.n_cells())
        .map(|c| {
            let tau = 1.0 + r(0.3);
            CellState {
                tau,
                v: Vec2::new(r(1.0), r(1.0)),
                s: r(0.5),
                a: Mat3::identity() + Mat3::from_fn(|_, _| r(0.1)),
                j: Vec3::new(r(0.3), r(0.3), r(0.3)),
                mass: mesh.signed_area(c) / tau,
                rho0: 1.0,
            }
        })
        .collect()
}

pub fn run_checks(seed: u64) -> Result<Vec<CheckLine>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mesh = small_mesh(seed)?;
    let geom = CornerGeometry::build(&mesh, Exec::default())?;
    let mut lines = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi: Vec<f64> = (0..mesh.n_nodes()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let grad = grad_cell_from_nodes(&mesh, &geom, &phi, Exec::default());
        let scale = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let curl = curl_node_from_cells(&mesh, &geom, &grad, Exec::default());
        for (p, c) in curl.iter().enumerate() {
            if !mesh.topology().is_boundary(p) {
                worst = worst.max(c.abs() / scale);
            }
        }
    }
    lines.push(CheckLine {
        name: "curl of gradient vanishes",
        value: worst,
        tol: 1e-12,
    });

    let (cell_res, node_res) = geom.max_gauss_residual(&mesh);
    lines.push(CheckLine {
        name: "corner normals close around cells and nodes",
        value: cell_res.max(node_res) / mesh.characteristic_h(),
        tol: 1e-13,
    });

    let mut eos = EosParams::ideal_gas(1.4, 2.5);
    eos.cs = 1.0;
    eos.ch = 1.0;
    let mut energy: f64 = 0.0;
    for kind in [BoundaryKind::SlipWall, BoundaryKind::NoSlipWall, BoundaryKind::FreeTraction] {
        let cfg = SchemeConfig::new(eos, Viscosity::Rusanov { k: 0.5 }, BoundaryConfig::uniform(kind));
        let scheme = Scheme::new(cfg, &mesh)?;
        let states = random_states(&mesh, &mut rng);
        let eval = scheme.rhs(&mesh, &states, 0.0)?;
        let scale: f64 = states.iter().zip(&eval.duals).map(|(s, d)| s.mass * d.e_total).sum();
        energy = energy.max(eval.energy_residual(&states) / scale);
    }
    lines.push(CheckLine {
        name: "nodal solver conserves total energy",
        value: energy,
        tol: 1e-12,
    });

    let spec = CaseSpec {
        nx: 8,
        ny: 8,
        jitter: 0.2,
        seed,
        t_final: 0.1,
        ..case_isentropic_vortex()
    };
    let case = spec.build()?;
    let out = run(&case.scheme, case.state, &case.time, |_, _| Ok(()))?;
    let m = &out.monitors;
    lines.push(CheckLine {
        name: "determinant constraint",
        value: m.max_eps_det,
        tol: 1e-12,
    });
    lines.push(CheckLine {
        name: "curl of A and J stay zero",
        value: m.max_curl_a.max(m.max_curl_j),
        tol: 1e-10,
    });
    lines.push(CheckLine {
        name: "cell entropy never decreases",
        value: -m.min_entropy_balance,
        tol: 1e-14,
    });

    let cfg = SchemeConfig::new(eos, Viscosity::Rusanov { k: 0.5 }, BoundaryConfig::uniform(BoundaryKind::SlipWall));
    let scheme = Scheme::new(cfg, &mesh)?;
    let uniform = CellState {
        tau: 1.0,
        v: Vec2::zeros(),
        s: 0.0,
        a: Mat3::identity(),
        j: Vec3::zeros(),
        mass: 0.0,
        rho0: 1.0,
    };
    let cells: Vec<_> = (0..mesh.n_cells())
        .map(|c| CellState {
            mass: mesh.signed_area(c),
            ..uniform
        })
        .collect();
    let start = SystemState {
        mesh: mesh.clone(),
        cells: cells.clone(),
        t: 0.0,
    };
    let time = TimeConfig {
        max_steps: 100,
        fixed_dt: Some(1e-3),
        ..TimeConfig::new(0.05, 0.1)
    };
    let out = run(&scheme, start, &time, |_, _| Ok(()))?;
    let changed = out.state.cells.iter().zip(&cells).filter(|(a, b)| a != b).count()
        + out.state.mesh.nodes().iter().zip(mesh.nodes()).filter(|(a, b)| a != b).count();
    lines.push(CheckLine {
        name: "uniform state is preserved bit for bit",
        value: changed as f64,
        tol: 0.0,
    });
    Ok(lines)
}

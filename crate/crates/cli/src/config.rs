//! Flat `key = value` run configuration.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lagrange_htc::cases::{CaseName, CaseSpec};
use lagrange_htc::nodal::Viscosity;
use serde::{Deserialize, Serialize};

/// Every key is optional; missing values come from the case defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: Option<String>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub jitter: Option<f64>,
    /// Target cell size; sets `nx` and `ny` from the domain extent.
    pub h_target: Option<f64>,
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub cv: Option<f64>,
    pub cs: Option<f64>,
    pub ch: Option<f64>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub cfl: Option<f64>,
    pub t_final: Option<f64>,
    pub ecl: Option<bool>,
    pub k_visc: Option<f64>,
    pub out: Option<String>,
    /// Steps between VTK snapshots (0 writes only the first and last state).
    pub snapshot_every: Option<usize>,
    pub monitor_every: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("config: {}", e.message().trim_end()).context(describe_span(text, e.span())))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Values set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            case, nx, ny, jitter, h_target, seed, gamma, cv, cs, ch, mu, kappa, cfl, t_final, ecl, k_visc, out,
            snapshot_every, monitor_every
        )
    }

    /// Fills every key from the case defaults and applies the overrides to the case.
    pub fn resolve(&self) -> Result<(RunConfig, CaseSpec)> {
        let name = self.case.as_deref().ok_or_else(|| anyhow!("no case given (key `case` or --case)"))?;
        let name = CaseName::parse(name).map_err(|e| anyhow!("key `case`: {e}"))?;
        let mut spec = name.spec()?;

        let extent = spec.x1 - spec.x0;
        if let Some(h) = self.h_target {
            if self.nx.is_some() || self.ny.is_some() {
                bail!("key `h_target` cannot be combined with `nx`/`ny`");
            }
            if !(h > 0.0) {
                bail!("key `h_target` must be positive, got {h}");
            }
            spec.nx = (extent.x / h).ceil() as usize;
            spec.ny = (extent.y / h).ceil() as usize;
        }
        spec.nx = self.nx.unwrap_or(spec.nx);
        spec.ny = self.ny.unwrap_or(spec.ny);
        if spec.nx == 0 || spec.ny == 0 {
            bail!("keys `nx`/`ny` must be positive");
        }
        spec.jitter = self.jitter.unwrap_or(spec.jitter);
        if !(0.0..0.3).contains(&spec.jitter) {
            bail!("key `jitter` must lie in [0, 0.3), got {}", spec.jitter);
        }
        spec.seed = self.seed.unwrap_or(spec.seed);
        spec.eos.gamma = self.gamma.unwrap_or(spec.eos.gamma);
        spec.eos.cv = self.cv.unwrap_or(spec.eos.cv);
        spec.eos.cs = self.cs.unwrap_or(spec.eos.cs);
        spec.eos.ch = self.ch.unwrap_or(spec.eos.ch);
        spec.mu = self.mu.unwrap_or(spec.mu);
        spec.kappa = self.kappa.unwrap_or(spec.kappa);
        if spec.mu < 0.0 || spec.kappa < 0.0 {
            bail!("keys `mu` and `kappa` must be non-negative");
        }
        spec.cfl = self.cfl.unwrap_or(spec.cfl);
        if !(spec.cfl > 0.0 && spec.cfl <= 1.0) {
            bail!("key `cfl` must lie in (0, 1], got {}", spec.cfl);
        }
        spec.t_final = self.t_final.unwrap_or(spec.t_final);
        if !(spec.t_final >= 0.0) {
            bail!("key `t_final` must be non-negative, got {}", spec.t_final);
        }
        let default_k = match spec.viscosity {
            Viscosity::Rusanov { k } => k,
            Viscosity::Ecl => 0.5,
        };
        let ecl = self.ecl.unwrap_or(spec.viscosity == Viscosity::Ecl);
        let k = self.k_visc.unwrap_or(default_k);
        if !(k >= 0.0) {
            bail!("key `k_visc` must be non-negative, got {k}");
        }
        spec.viscosity = if ecl { Viscosity::Ecl } else { Viscosity::Rusanov { k } };
        spec.resolved_eos().context("material parameters")?;

        let full = RunConfig {
            case: Some(name.as_str().to_string()),
            nx: Some(spec.nx),
            ny: Some(spec.ny),
            jitter: Some(spec.jitter),
            h_target: None,
            seed: Some(spec.seed),
            gamma: Some(spec.eos.gamma),
            cv: Some(spec.eos.cv),
            cs: Some(spec.eos.cs),
            ch: Some(spec.eos.ch),
            mu: Some(spec.mu),
            kappa: Some(spec.kappa),
            cfl: Some(spec.cfl),
            t_final: Some(spec.t_final),
            ecl: Some(ecl),
            k_visc: Some(k),
            out: Some(self.out.clone().unwrap_or_else(|| "out".into())),
            snapshot_every: Some(self.snapshot_every.unwrap_or(0)),
            monitor_every: Some(self.monitor_every.unwrap_or(1).max(1)),
        };
        Ok((full, spec))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }
}

fn describe_span(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let start = r.start.min(text.len());
            let line = text[..start].matches('\n').count() + 1;
            let content = text.lines().nth(line - 1).unwrap_or("");
            match content.split_once('=') {
                Some((key, _)) => format!("line {line}, key `{}`", key.trim()),
                None => format!("line {line}"),
            }
        }
        None => "config".into(),
    }
}

//! Scenario files: TOML with the sections documented in `docs/scenario.md`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::TopologySignature;
use crate::error::{Error, Result};
use crate::geometry::{AmbientRegion, GridSpec, ImmersionChart, Topology};
use crate::variation_lab::FieldRecipe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Geometry,
    Hessians,
    Comparison,
    Spectra,
    Reparam,
    Bounds,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Hessians => "hessians",
            Suite::Comparison => "comparison",
            Suite::Spectra => "spectra",
            Suite::Reparam => "reparam",
            Suite::Bounds => "bounds",
        }
    }

    fn requires(&self) -> &'static [Suite] {
        match self {
            Suite::Reparam | Suite::Bounds => &[Suite::Spectra],
            _ => &[],
        }
    }
}

/// Requested suites plus their dependencies, in execution order.
pub fn resolve_suites(requested: &[Suite]) -> Vec<Suite> {
    let mut out: Vec<Suite> = requested.to_vec();
    for s in requested {
        out.extend_from_slice(s.requires());
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectraConfig {
    /// Coarsest finite-element grid `[n_r, n_φ]`; uniform radial rings.
    pub base: [usize; 2],
    /// Number of nested refinements, including the base.
    pub levels: usize,
    /// Eigenvalues reported on the finest level.
    pub eigenvalues: usize,
    pub heat_times: Vec<f64>,
}

impl Default for SpectraConfig {
    fn default() -> Self {
        SpectraConfig { base: [12, 24], levels: 3, eigenvalues: 8, heat_times: vec![0.1, 1.0, 10.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    /// Defaults to a disk `(0,1,0,0)` or annulus `(0,2,0,0)` by grid topology.
    pub signature: Option<TopologySignature>,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Constant used for the paper-shaped expression.
    pub paper_constant: f64,
    pub sobolev_functions: usize,
    /// `ε` as a fraction of `ρ`.
    pub extension_eps: f64,
    pub probe_lattice: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            signature: None,
            delta_min: 1e-3,
            delta_max: 1e3,
            paper_constant: 1.0,
            sobolev_functions: 100,
            extension_eps: 0.5,
            probe_lattice: 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesConfig {
    pub conformality: f64,
    pub contact_angle: f64,
    pub hessian_rel: f64,
    /// Residuals below this count as converged in order fits.
    pub convergence_floor: f64,
    pub min_order: f64,
    pub reparam_pde: f64,
    pub reparam_rel: f64,
    pub profile_rel: f64,
    pub extension_slack: f64,
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        TolerancesConfig {
            conformality: 1e-8,
            contact_angle: 1e-8,
            hessian_rel: 1e-5,
            convergence_floor: 1e-8,
            min_order: 2.0,
            reparam_pde: 1e-6,
            reparam_rel: 1e-3,
            profile_rel: 1e-6,
            extension_slack: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub obj: bool,
    /// Two-column `.dat` files for plotting.
    pub gnuplot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Contact angle.
    pub theta: f64,
    /// Mean curvature weight.
    pub h: f64,
    pub chart: ImmersionChart,
    pub ambient: AmbientRegion,
    pub grid: GridSpec,
    /// Radial counts for the geometry convergence ladder; `n_φ = 2 n_r`.
    #[serde(default)]
    pub ladder: Vec<usize>,
    #[serde(default)]
    pub variations: Vec<FieldRecipe>,
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub spectra: SpectraConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Key named on the offending line, or the enclosing table header.
fn key_at(text: &str, offset: usize) -> String {
    let upto = &text[..offset.min(text.len())];
    let line_start = upto.rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next().unwrap_or("").trim();
    let table = upto
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('['))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').to_string());
    let key = line.split('=').next().unwrap_or("").trim();
    match (table, key.is_empty() || key.starts_with('[')) {
        (Some(t), false) => format!("{t}.{key}"),
        (Some(t), true) => t,
        (None, false) => key.to_string(),
        (None, true) => "<root>".to_string(),
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let sc: Scenario = toml::from_str(text).map_err(|e| {
            let (key, line) = match e.span() {
                Some(span) => (key_at(text, span.start), Some(line_of(text, span.start))),
                None => ("<root>".to_string(), None),
            };
            let message = match line {
                Some(l) => format!("line {l}: {}", e.message()),
                None => e.message().to_string(),
            };
            Error::Config { key, message }
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        Scenario::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| Err(Error::Config { key: key.into(), message });
        if !(self.theta > 0.0 && self.theta <= std::f64::consts::FRAC_PI_2 + 1e-12) {
            return bad("theta", format!("{} outside (0, π/2]", self.theta));
        }
        if self.h < 0.0 {
            return bad("h", format!("{} < 0", self.h));
        }
        if self.grid.n_r < 2 || self.grid.n_phi < 4 {
            return bad("grid", format!("{}×{} is too coarse", self.grid.n_r, self.grid.n_phi));
        }
        if self.spectra.levels == 0 || self.spectra.base[0] < 2 || self.spectra.base[1] < 4 {
            return bad("spectra", "needs at least one level of at least 2×4".into());
        }
        if let Some(sig) = &self.bounds.signature {
            if sig.m == 0 {
                return bad("bounds.signature.m", "m ≥ 1 required".into());
            }
        }
        if !(self.bounds.extension_eps > 0.0 && self.bounds.extension_eps < 1.0) {
            return bad("bounds.extension_eps", "fraction of ρ in (0, 1)".into());
        }
        if self.bounds.delta_min <= 0.0 || self.bounds.delta_max < self.bounds.delta_min {
            return bad("bounds.delta_min", "empty δ range".into());
        }
        Ok(())
    }

    pub fn signature(&self) -> TopologySignature {
        self.bounds.signature.unwrap_or(match self.grid.topology {
            Topology::DiskPolar => TopologySignature { g: 0, m: 1, b: 0, d: 0 },
            Topology::AnnulusCylindrical => TopologySignature { g: 0, m: 2, b: 0, d: 0 },
        })
    }

    /// SHA-256 of the canonical JSON form, as hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&self.name))
    }
}

//! Run configuration: a TOML file, an optional preset underneath it and
//! command-line overrides on top.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coupling::{ExactOptions, InteractionForm, PotentialOptions};
use crate::error::{Error, Result};
use crate::fock::{EvolveOptions, Method};
use crate::geometry::{gen_ring, gen_uniform_cylinder, load_architecture, Architecture, Scatterer, DEFAULT_GAP};
use crate::modes::{auto_q_max, power_radius, BasisSpec, ModeIndex, Sector, DEFAULT_K0};
use crate::pv::PvScheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub basis: BasisConfig,
    pub geometry: Option<GeometryConfig>,
    pub quadrature: QuadratureConfig,
    /// Gap values as `Delta / q_max^2`.
    pub deltas: Vec<f64>,
    pub hopping: HoppingConfig,
    pub interaction: InteractionConfig,
    /// Explicit coefficients; replaces the geometry pipeline in `evolve`.
    pub hamiltonian: Option<ExplicitHamiltonian>,
    pub dynamics: DynamicsConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            basis: BasisConfig::default(),
            geometry: None,
            quadrature: QuadratureConfig::default(),
            deltas: vec![0.001, 0.01, 0.02, 0.05],
            hopping: HoppingConfig::default(),
            interaction: InteractionConfig::default(),
            hamiltonian: None,
            dynamics: DynamicsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisConfig {
    pub w0: f64,
    pub k0: f64,
    pub sector: Sector,
    pub l_max: u32,
    pub p_max: u32,
    /// Defaults to the automatic cutoff for the mode set.
    pub q_max: Option<f64>,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig {
            w0: 1.0,
            k0: DEFAULT_K0,
            sector: Sector::Radial,
            l_max: 0,
            p_max: 25,
            q_max: None,
        }
    }
}

impl BasisConfig {
    pub fn spec(&self) -> BasisSpec {
        BasisSpec {
            w0: self.w0,
            k0: self.k0,
            q_max: self.q_max.unwrap_or_else(|| auto_q_max(self.w0, self.l_max, self.p_max, self.sector)),
            l_max: self.l_max,
            p_max: self.p_max,
            sector: self.sector,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadiusUnit {
    #[default]
    Waist,
    /// Multiples of the radius holding `boundary_fraction` of the power of
    /// the `(0, p_max)` mode.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryConfig {
    File {
        path: PathBuf,
    },
    Inline {
        label: String,
        #[serde(default = "one")]
        omega0: f64,
        #[serde(default = "one")]
        g_coh: f64,
        #[serde(default = "one")]
        g_inc: f64,
        scatterers: Vec<Scatterer>,
    },
    /// Uniform annuli, one architecture per `[inner, outer]` shell.
    Cylinder {
        shells: Vec<[f64; 2]>,
        count: usize,
        #[serde(default)]
        unit: RadiusUnit,
        #[serde(default = "boundary_fraction")]
        boundary_fraction: f64,
        #[serde(default = "one")]
        omega0: f64,
        #[serde(default = "one")]
        g_coh: f64,
        #[serde(default = "one")]
        g_inc: f64,
        #[serde(default = "default_gap")]
        gap: f64,
    },
    Ring {
        radius: f64,
        count: usize,
        #[serde(default = "one")]
        omega0: f64,
        #[serde(default = "one")]
        g_coh: f64,
        #[serde(default = "one")]
        g_inc: f64,
        #[serde(default = "default_gap")]
        gap: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn boundary_fraction() -> f64 {
    0.95
}

fn default_gap() -> f64 {
    DEFAULT_GAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Gauss-Legendre nodes per radial panel; module default when absent.
    pub n_r: Option<usize>,
    pub n_theta: Option<usize>,
    /// PV exclusion half-width in units of `q_max^2`.
    pub epsilon_pv: f64,
    pub scheme: PvScheme,
    /// Recompute with doubled radial nodes and report the change.
    pub check_convergence: bool,
    /// Relative change above which a convergence warning is recorded.
    pub convergence_tol: f64,
    /// Gram residual above which `basis-check` reports a failure.
    pub gram_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            n_r: None,
            n_theta: None,
            epsilon_pv: 1e-3,
            scheme: PvScheme::Subtracted,
            check_convergence: true,
            convergence_tol: 0.01,
            gram_tol: 1e-8,
        }
    }
}

impl QuadratureConfig {
    pub fn potential_options(&self) -> PotentialOptions {
        let d = PotentialOptions::default();
        PotentialOptions {
            nodes_per_panel: self.n_r.unwrap_or(d.nodes_per_panel),
            n_theta: self.n_theta.unwrap_or(d.n_theta),
            scheme: self.scheme,
            epsilon_rel: self.epsilon_pv,
        }
    }

    pub fn exact_options(&self) -> ExactOptions {
        let d = ExactOptions::default();
        ExactOptions {
            nodes_per_panel: self.n_r.unwrap_or(d.nodes_per_panel),
            n_theta: self.n_theta.unwrap_or(d.n_theta),
            scheme: self.scheme,
            epsilon_rel: self.epsilon_pv,
            force_general: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HoppingModel {
    #[default]
    PointParticle,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct HoppingConfig {
    pub model: HoppingModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InteractionChoice {
    None,
    #[default]
    LgDiagonal,
    Full,
}

impl InteractionChoice {
    pub fn form(self) -> Option<InteractionForm> {
        match self {
            InteractionChoice::None => None,
            InteractionChoice::LgDiagonal => Some(InteractionForm::LgDiagonal),
            InteractionChoice::Full => Some(InteractionForm::Full),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InteractionConfig {
    pub form: InteractionChoice,
    /// `Delta / q_max^2` of the potential; defaults to the first entry of `deltas`.
    pub delta: Option<f64>,
}

impl Default for InteractionConfig {
    fn default() -> Self {
        InteractionConfig {
            form: InteractionChoice::LgDiagonal,
            delta: None,
        }
    }
}

/// Real and imaginary parts given separately; `ucal` is the LG-diagonal
/// interaction matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitHamiltonian {
    pub theta: Vec<Vec<f64>>,
    #[serde(default)]
    pub theta_imag: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub ucal: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorRequest {
    pub r: usize,
    pub offset: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub photons: usize,
    /// Single-photon amplitudes `[re, im]` per mode.
    pub initial: Option<Vec<[f64; 2]>>,
    /// Initial number state; alternative to `initial`.
    pub occupation: Option<Vec<u16>>,
    /// Explicit times; otherwise `count` points on `[t_start, t_stop]`.
    pub times: Option<Vec<f64>>,
    pub t_start: f64,
    pub t_stop: f64,
    pub count: usize,
    pub method: Method,
    pub tol: f64,
    pub krylov_dim: usize,
    pub dense_cap: usize,
    pub fock_cap: usize,
    pub correlators: Vec<CorrelatorRequest>,
    pub nonlocal: Vec<usize>,
    /// Interaction switched off after this time.
    pub interaction_time: Option<f64>,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        let e = EvolveOptions::default();
        DynamicsConfig {
            photons: 1,
            initial: None,
            occupation: None,
            times: None,
            t_start: 0.0,
            t_stop: 10.0,
            count: 101,
            method: e.method,
            tol: e.tol,
            krylov_dim: e.krylov_dim,
            dense_cap: e.dense_cap,
            fock_cap: crate::fock::DEFAULT_CAP,
            correlators: Vec::new(),
            nonlocal: Vec::new(),
            interaction_time: None,
        }
    }
}

impl DynamicsConfig {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            method: self.method,
            tol: self.tol,
            krylov_dim: self.krylov_dim,
            dense_cap: self.dense_cap,
        }
    }

    pub fn time_grid(&self) -> Vec<f64> {
        self.times
            .clone()
            .unwrap_or_else(|| crate::fock::linspace(self.t_start, self.t_stop, self.count))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

/// Named base configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `l = 0`, `p <= 25` basis and four uniform annuli measured in units of
    /// the 95 % power radius of the `p = 25` mode.
    CylinderFig4,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "cylinder-fig4" => Ok(Preset::CylinderFig4),
            other => Err(Error::Config(format!("unknown preset `{other}`; known: cylinder-fig4"))),
        }
    }

    pub fn config(self) -> RunConfig {
        match self {
            Preset::CylinderFig4 => RunConfig {
                seed: 1,
                geometry: Some(GeometryConfig::Cylinder {
                    shells: vec![[0.1, 0.9], [0.2, 0.8], [0.4, 1.0], [0.4, 0.6]],
                    count: 2000,
                    unit: RadiusUnit::Boundary,
                    boundary_fraction: 0.95,
                    omega0: 1.0,
                    g_coh: 1.0,
                    g_inc: 1.0,
                    gap: DEFAULT_GAP,
                }),
                ..RunConfig::default()
            },
        }
    }
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub deltas: Vec<f64>,
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    // A geometry table replaces the preset's wholesale, since
                    // its fields depend on `kind`.
                    Some(slot) if k != "geometry" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn toml_error(e: toml::de::Error, text: &str) -> Error {
    let (line, column) = match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = span.start - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        }
        None => (0, 0),
    };
    Error::Parse {
        line,
        column,
        message: e.message().to_string(),
    }
}

impl RunConfig {
    /// `defaults < preset < file text < overrides`, then validation.
    pub fn resolve(preset: Option<Preset>, file_text: Option<&str>, overrides: &Overrides) -> Result<Self> {
        let base = preset.map(Preset::config).unwrap_or_default();
        let mut value = toml::Value::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(text) = file_text {
            let parsed: toml::Value = text.parse::<toml::Table>().map(toml::Value::Table).map_err(|e| toml_error(e, text))?;
            // Type-check the file on its own first so errors point at its lines.
            let _: RunConfig = toml::from_str(text).map_err(|e| toml_error(e, text))?;
            merge(&mut value, parsed);
        }
        let mut cfg: RunConfig = value.try_into().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        if let Some(out) = &overrides.out {
            cfg.output.dir = out.clone();
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if !overrides.deltas.is_empty() {
            cfg.deltas = overrides.deltas.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, preset: Option<Preset>, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::resolve(preset, Some(&text), overrides)
    }

    /// Canonical text of the resolved config; its hash identifies a run.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::schema(field, msg));
        let spec = self.basis.spec();
        if let Err(e) = spec.validate() {
            return bad("basis", e.to_string());
        }
        for (i, d) in self.deltas.iter().enumerate() {
            if !d.is_finite() || *d < 0.0 {
                return bad(&format!("deltas[{i}]"), format!("must be finite and non-negative, got {d}"));
            }
        }
        if let Some(d) = self.interaction.delta {
            if !d.is_finite() || d < 0.0 {
                return bad("interaction.delta", format!("must be finite and non-negative, got {d}"));
            }
        }
        let q = &self.quadrature;
        if q.n_r.is_some_and(|n| n < 2) {
            return bad("quadrature.n_r", "needs at least 2 nodes".into());
        }
        if q.n_theta == Some(0) {
            return bad("quadrature.n_theta", "needs at least 1 angle".into());
        }
        if !(q.epsilon_pv > 0.0 && q.epsilon_pv.is_finite()) {
            return bad("quadrature.epsilon_pv", format!("must be positive, got {}", q.epsilon_pv));
        }
        match &self.geometry {
            Some(GeometryConfig::Cylinder { shells, count, boundary_fraction, .. }) => {
                if shells.is_empty() {
                    return bad("geometry.shells", "needs at least one shell".into());
                }
                for (i, [a, b]) in shells.iter().enumerate() {
                    if !(0.0 <= *a && a < b && b.is_finite()) {
                        return bad(&format!("geometry.shells[{i}]"), format!("need 0 <= inner < outer, got [{a}, {b}]"));
                    }
                }
                if *count == 0 {
                    return bad("geometry.count", "must be positive".into());
                }
                if !(*boundary_fraction > 0.0 && *boundary_fraction < 1.0) {
                    return bad("geometry.boundary_fraction", "must lie in (0, 1)".into());
                }
            }
            Some(GeometryConfig::Ring { radius, count, .. }) => {
                if !(*radius >= 0.0 && radius.is_finite()) || *count == 0 {
                    return bad("geometry", "ring needs a finite radius and a positive count".into());
                }
            }
            Some(GeometryConfig::Inline { label, omega0, g_coh, g_inc, scatterers }) => {
                let arch = Architecture {
                    label: label.clone(),
                    omega0: *omega0,
                    g_coh: *g_coh,
                    g_inc: *g_inc,
                    scatterers: scatterers.clone(),
                };
                if let Err(Error::Schema { field, message }) = arch.validate() {
                    return bad(&format!("geometry.{field}"), message);
                }
            }
            Some(GeometryConfig::File { .. }) | None => {}
        }
        if let Some(h) = &self.hamiltonian {
            let m = h.theta.len();
            let square = |rows: &Vec<Vec<f64>>| rows.len() == m && rows.iter().all(|r| r.len() == m);
            if m == 0 || !square(&h.theta) {
                return bad("hamiltonian.theta", "must be a non-empty square matrix".into());
            }
            if h.theta_imag.as_ref().is_some_and(|t| !square(t)) {
                return bad("hamiltonian.theta_imag", format!("must be {m} x {m}"));
            }
            if h.ucal.as_ref().is_some_and(|t| !square(t)) {
                return bad("hamiltonian.ucal", format!("must be {m} x {m}"));
            }
        }
        let d = &self.dynamics;
        if d.initial.is_some() && d.occupation.is_some() {
            return bad("dynamics", "give either `initial` or `occupation`, not both".into());
        }
        if d.initial.is_some() && d.photons != 1 {
            return bad("dynamics.initial", "single-photon amplitudes need photons = 1".into());
        }
        if let Some(occ) = &d.occupation {
            if occ.iter().map(|&x| x as usize).sum::<usize>() != d.photons {
                return bad("dynamics.occupation", format!("must hold {} photons", d.photons));
            }
        }
        let times = d.time_grid();
        if times.is_empty() {
            return bad("dynamics.count", "needs at least one time".into());
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("dynamics.times", "times must be finite and non-negative".into());
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("dynamics.times", "times must be strictly increasing".into());
        }
        if !(d.tol > 0.0) || d.krylov_dim < 2 {
            return bad("dynamics", "tol must be positive and krylov_dim at least 2".into());
        }
        if d.interaction_time.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
            return bad("dynamics.interaction_time", "must be finite and non-negative".into());
        }
        Ok(())
    }

    /// Architectures for the configured geometry, one per cylinder shell.
    pub fn architectures(&self) -> Result<Vec<Architecture>> {
        let geom = self
            .geometry
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs a [geometry] section".into()))?;
        match geom {
            GeometryConfig::File { path } => Ok(vec![load_architecture(path)?]),
            GeometryConfig::Inline { label, omega0, g_coh, g_inc, scatterers } => Ok(vec![Architecture {
                label: label.clone(),
                omega0: *omega0,
                g_coh: *g_coh,
                g_inc: *g_inc,
                scatterers: scatterers.clone(),
            }]),
            GeometryConfig::Cylinder { shells, count, unit, boundary_fraction, omega0, g_coh, g_inc, gap } => {
                let scale = self.radius_scale(*unit, *boundary_fraction)?;
                shells
                    .iter()
                    .enumerate()
                    .map(|(i, [a, b])| {
                        let mut arch = gen_uniform_cylinder(a * scale, b * scale, *count, self.seed.wrapping_add(i as u64))?
                            .with_gaps(&[*gap])
                            .with_couplings(*g_coh, *g_inc);
                        arch.omega0 = *omega0;
                        arch.label = format!("cylinder {a}-{b}");
                        Ok(arch)
                    })
                    .collect()
            }
            GeometryConfig::Ring { radius, count, omega0, g_coh, g_inc, gap } => {
                let mut arch = gen_ring(*radius, *count)?.with_gaps(&[*gap]).with_couplings(*g_coh, *g_inc);
                arch.omega0 = *omega0;
                Ok(vec![arch])
            }
        }
    }

    /// Length of one radius unit in waists.
    pub fn radius_scale(&self, unit: RadiusUnit, fraction: f64) -> Result<f64> {
        match unit {
            RadiusUnit::Waist => Ok(1.0),
            RadiusUnit::Boundary => power_radius(ModeIndex::new(0, self.basis.p_max), fraction, &self.basis.spec()),
        }
    }

    /// Gap used for the interaction potential, as `Delta / q_max^2`.
    pub fn interaction_delta(&self) -> f64 {
        self.interaction.delta.or_else(|| self.deltas.first().copied()).unwrap_or(0.0)
    }
}

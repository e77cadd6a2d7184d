//! The five pipeline commands. Each writes its artifacts under the output
//! directory and returns the paths it wrote.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::config::{GeometryConfig, HoppingModel, InteractionChoice, RunConfig};
use crate::coupling::analysis::{confinement_block, diagonal_crossection, half_max_bandwidth, offdiag_ratio, real_part, sign_agreement};
use crate::coupling::exact::{epsilon_halving_change, refinement_change};
use crate::coupling::potential::relative_change;
use crate::coupling::{
    assemble_from_matrix, hopping_coherent_exact, hopping_coherent_pp, hopping_incoherent_exact, hopping_incoherent_pp, interaction_tensor,
    partial_trace, reduce_lg_diagonal, scattering_potential, structural_tensor, total_hopping, EffectiveHamiltonian, HoppingMatrix, Interaction,
    TracePair,
};
use crate::error::{Error, Result};
use crate::fock::{
    hamiltonian_matrix, number_commutator_norm, number_state, observable_series, prepare_product_state, FockBasis, Observable, Propagator, Schedule,
};
use crate::geometry::Architecture;
use crate::io::{fmt_f64, sha256_hex, write_complex_matrix_csv, write_json, write_matrix_csv, write_meta, write_series_csv, write_table_csv};
use crate::modes::{attenuation_decades, completeness_residual, default_grid, gram_matrix, gram_residual, power_radius, power_radius_with, BasisSpec, ModeIndex};

/// Files written by a command, in write order.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct Writer<'a> {
    cfg: &'a RunConfig,
    command: &'static str,
    dir: PathBuf,
    out: CommandOutput,
}

impl<'a> Writer<'a> {
    fn new(cfg: &'a RunConfig, command: &'static str) -> Self {
        Writer {
            cfg,
            command,
            dir: cfg.output.dir.clone(),
            out: CommandOutput::default(),
        }
    }

    fn meta(&self, extra: Value) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("config_sha256".into(), json!(sha256_hex(self.cfg.canonical_toml().as_bytes())));
        m.insert("seed".into(), json!(self.cfg.seed));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if let Value::Object(e) = extra {
            m.extend(e);
        }
        m
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn matrix(&mut self, stem: &str, labels: &[String], m: &DMatrix<f64>, extra: Value) -> Result<()> {
        let p = self.path(&format!("{stem}.csv"));
        write_matrix_csv(&p, labels, m)?;
        write_meta(&p, &self.meta(extra))?;
        self.out.files.push(p);
        Ok(())
    }

    fn complex(&mut self, stem: &str, labels: &[String], m: &DMatrix<Complex64>, extra: Value) -> Result<()> {
        let meta = self.meta(extra);
        for p in write_complex_matrix_csv(&self.dir, stem, labels, m)? {
            write_meta(&p, &meta)?;
            self.out.files.push(p);
        }
        Ok(())
    }

    fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>], extra: Value) -> Result<()> {
        let p = self.path(name);
        write_table_csv(&p, header, rows)?;
        write_meta(&p, &self.meta(extra))?;
        self.out.files.push(p);
        Ok(())
    }

    fn json(&mut self, name: &str, body: Value) -> Result<()> {
        let p = self.path(name);
        let mut m = self.meta(json!({}));
        if let Value::Object(b) = body {
            m.extend(b);
        }
        write_json(&p, &Value::Object(m))?;
        self.out.files.push(p);
        Ok(())
    }

    fn warn(&mut self, msg: String) {
        self.out.warnings.push(msg);
    }
}

fn labels(spec: &BasisSpec) -> Vec<String> {
    spec.modes().iter().map(ModeIndex::label).collect()
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

/// Symmetry defect `max |A - A^T|` of a real matrix.
fn asymmetry(a: &DMatrix<f64>) -> f64 {
    (a - a.transpose()).amax()
}

pub fn basis_check(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut w = Writer::new(cfg, "basis-check");
    let spec = cfg.basis.spec();
    let grid = default_grid(&spec);
    let gram = gram_residual(&gram_matrix(&spec, &grid));

    let boundary_mode = ModeIndex::new(0, cfg.basis.p_max);
    let mut modes = spec.modes();
    if !modes.contains(&boundary_mode) {
        modes.push(boundary_mode);
    }
    let mut rows = Vec::new();
    for m in &modes {
        let r = power_radius(*m, 0.95, &spec)?;
        rows.push(vec![m.label(), m.l.to_string(), m.p.to_string(), f(0.95), f(r)]);
    }
    let boundary = power_radius(boundary_mode, 0.95, &spec)?;
    let boundary_fine = power_radius_with(boundary_mode, 0.95, &spec, 64)?;
    w.table("power_radius.csv", &["mode", "l", "p", "fraction", "radius"], &rows, json!({ "w0": spec.w0 }))?;

    let mut rows = Vec::new();
    for qf in [0.0, 0.25, 0.5, 0.75] {
        for rho in [0.0, 0.25, 0.5, 1.0] {
            let q = [qf * spec.q_max * 0.3f64.cos(), qf * spec.q_max * 0.3f64.sin()];
            let x = [rho * (-0.7f64).cos(), rho * (-0.7f64).sin()];
            let res = completeness_residual(&spec, q, x)?;
            rows.push(vec![f(q[0]), f(q[1]), f(x[0]), f(x[1]), f(res)]);
        }
    }
    w.table("completeness.csv", &["qx", "qy", "x", "y", "residual"], &rows, json!({ "q_max": spec.q_max, "modes": spec.mode_count() }))?;

    let mut rows = Vec::new();
    for (l, p) in [(0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (3, 2)] {
        rows.push(vec![l.to_string(), p.to_string(), f(attenuation_decades(l, p, spec.k0))]);
    }
    w.table("attenuation.csv", &["l", "p", "factor"], &rows, json!({ "k0": spec.k0 }))?;

    w.json(
        "basis_check.json",
        json!({
            "modes": spec.mode_count(),
            "q_max": spec.q_max,
            "paraxiality": spec.paraxiality(),
            "gram_residual": gram,
            "gram_tol": cfg.quadrature.gram_tol,
            "grid": { "N_r": grid.n_r(), "N_theta": grid.n_theta() },
            "boundary_mode": boundary_mode.label(),
            "boundary_fraction": 0.95,
            "boundary_radius": boundary,
            "boundary_refinement_change": (boundary_fine - boundary).abs(),
            "attenuation_l2_p2": attenuation_decades(2, 2, spec.k0),
        }),
    )?;
    if gram > cfg.quadrature.gram_tol {
        return Err(Error::Convergence(format!(
            "Gram residual {gram:e} exceeds {:e}; reports written to {}",
            cfg.quadrature.gram_tol,
            w.dir.display()
        )));
    }
    Ok(w.out)
}

pub fn potential(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut w = Writer::new(cfg, "potential");
    let spec = cfg.basis.spec();
    let opts = cfg.quadrature.potential_options();
    let names = labels(&spec);
    let q2 = spec.q_max * spec.q_max;
    let mut summary = Vec::new();
    for &d in &cfg.deltas {
        let pot = scattering_potential(&spec, d * q2, &opts)?;
        let change = if cfg.quadrature.check_convergence && d != 0.0 {
            let mut fine = opts.clone();
            fine.nodes_per_panel *= 2;
            let finer = scattering_potential(&spec, d * q2, &fine)?;
            Some(relative_change(pot.entries.as_slice(), finer.entries.as_slice()))
        } else {
            None
        };
        if let Some(c) = change.filter(|c| *c > cfg.quadrature.convergence_tol) {
            w.warn(format!("potential at delta {d}: doubling radial nodes changes entries by {c:.3e}"));
        }
        let tag = fmt_f64(d);
        let mut traces = Vec::new();
        for pair in [TracePair::Last, TracePair::First, TracePair::Outer] {
            let t = partial_trace(&pot.entries, pair);
            let meta = json!({
                "dims": [spec.mode_count(), spec.mode_count()],
                "trace": pair.label(),
                "delta_over_qmax2": d,
                "q_max": spec.q_max,
                "epsilon_pv": opts.epsilon_rel,
                "scheme": opts.scheme,
                "grid": { "N_r": pot.n_outer, "N_theta": opts.n_theta, "N_r_inner": pot.n_inner },
                "hermiticity_defect": asymmetry(&t),
                "max_imag_dropped": pot.max_imag,
                "convergence": { "nr_doubled_delta": change, "tol": cfg.quadrature.convergence_tol },
            });
            w.matrix(&format!("{}_d{tag}", pair.label()), &names, &t, meta)?;
            traces.push(t);
        }
        let cuts: Vec<Vec<(i64, f64)>> = traces.iter().map(diagonal_crossection).collect();
        let rows: Vec<Vec<String>> = (0..cuts[0].len())
            .map(|i| vec![cuts[0][i].0.to_string(), f(cuts[0][i].1), f(cuts[1][i].1), f(cuts[2][i].1)])
            .collect();
        w.table(&format!("crossection_d{tag}.csv"), &["offset", "V_nm", "V_kl", "V_mk"], &rows, json!({ "delta_over_qmax2": d }))?;
        summary.push(vec![
            tag,
            f(offdiag_ratio(&traces[0])),
            f(offdiag_ratio(&traces[1])),
            half_max_bandwidth(&traces[2]).to_string(),
            f(pot.entries.max_abs()),
            change.map_or_else(String::new, f),
        ]);
    }
    w.table(
        "potential_summary.csv",
        &["delta_over_qmax2", "offdiag_ratio_V_nm", "offdiag_ratio_V_kl", "bandwidth_V_mk", "max_abs_V", "nr_doubled_delta"],
        &summary,
        json!({ "q_max": spec.q_max, "modes": spec.mode_count() }),
    )?;
    Ok(w.out)
}

struct HoppingSet {
    coherent: HoppingMatrix,
    incoherent: HoppingMatrix,
    total: HoppingMatrix,
    convergence: Value,
}

fn hopping_set(cfg: &RunConfig, arch: &Architecture, spec: &BasisSpec) -> Result<HoppingSet> {
    let (coherent, incoherent, convergence) = match cfg.hopping.model {
        HoppingModel::PointParticle => (hopping_coherent_pp(arch, spec), hopping_incoherent_pp(arch, spec), Value::Null),
        HoppingModel::Exact => {
            let opts = cfg.quadrature.exact_options();
            let coh = hopping_coherent_exact(arch, spec, &opts)?;
            let inc = hopping_incoherent_exact(arch, spec, &opts)?.combined;
            let conv = if cfg.quadrature.check_convergence {
                let (ec, ei) = epsilon_halving_change(arch, spec, &opts)?;
                let (rc, ri) = refinement_change(arch, spec, &opts)?;
                json!({
                    "epsilon_halving": { "coherent": ec, "incoherent": ei },
                    "nr_doubled_delta": { "coherent": rc, "incoherent": ri },
                    "tol": cfg.quadrature.convergence_tol,
                })
            } else {
                Value::Null
            };
            (coh, inc, conv)
        }
    };
    let total = total_hopping(arch.omega0, &coherent, &incoherent);
    Ok(HoppingSet {
        coherent,
        incoherent,
        total,
        convergence,
    })
}

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hopping(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut w = Writer::new(cfg, "hopping");
    let spec = cfg.basis.spec();
    let names = labels(&spec);
    let archs = cfg.architectures()?;
    let doubled = doubled_architectures(cfg)?;
    let mut summary = Vec::new();
    for (i, arch) in archs.iter().enumerate() {
        let suffix = if archs.len() > 1 { format!("_shell{i}") } else { String::new() };
        let set = hopping_set(cfg, arch, &spec)?;
        for (stem, m) in [("theta_coh", &set.coherent), ("theta_inc", &set.incoherent), ("Theta", &set.total)] {
            let meta = json!({
                "dims": [m.dim(), m.dim()],
                "kind": format!("{:?}", m.kind).to_lowercase(),
                "model": cfg.hopping.model,
                "architecture": arch.label,
                "scatterers": arch.len(),
                "hermiticity_defect": m.hermiticity_defect(),
                "convergence": set.convergence,
            });
            w.complex(&format!("{stem}{suffix}"), &names, &m.entries, meta)?;
        }
        let arch_path = w.path(&format!("architecture{suffix}.json"));
        crate::geometry::save_architecture(arch, &arch_path)?;
        w.out.files.push(arch_path);
        let inc = real_part(&set.incoherent.entries);
        let block = confinement_block(&inc);
        let stability = match &doubled {
            Some(d) => {
                let base = &inc / arch.len() as f64;
                let twice = real_part(&hopping_incoherent_pp(&d[i], &spec).entries) / d[i].len() as f64;
                vec![
                    f(sign_agreement(&twice, &base, 0.05)),
                    f((&base - &twice).amax() / twice.amax()),
                    confinement_block(&twice).extent.to_string(),
                ]
            }
            None => vec![String::new(); 3],
        };
        let radii = arch.scatterers.iter().map(|s| s.radius());
        let (rmin, rmax) = radii.fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
        summary.push(vec![
            i.to_string(),
            arch.label.clone(),
            arch.len().to_string(),
            f(rmin),
            f(rmax),
            block.start.to_string(),
            block.end.to_string(),
            block.extent.to_string(),
            format!("{}/{}", block.negative_neighbours, block.neighbours),
            block.is_flanked().to_string(),
            f(frobenius(&set.coherent.entries) / frobenius(&set.incoherent.entries)),
        ]);
        summary.last_mut().unwrap().extend(stability);
    }
    w.table(
        "hopping_summary.csv",
        &["shell", "label", "scatterers", "r_min", "r_max", "block_start", "block_end", "block_extent", "negative_neighbours", "flanked", "coh_over_inc",
          "doubled_sign_agreement", "doubled_max_change", "doubled_block_extent"],
        &summary,
        json!({ "model": cfg.hopping.model }),
    )?;
    Ok(w.out)
}

/// Cylinder shells regenerated with twice the scatterer count, for the
/// point-particle stability columns of the hopping summary.
fn doubled_architectures(cfg: &RunConfig) -> Result<Option<Vec<Architecture>>> {
    if cfg.hopping.model != HoppingModel::PointParticle || !cfg.quadrature.check_convergence {
        return Ok(None);
    }
    let mut twice = cfg.clone();
    match &mut twice.geometry {
        Some(GeometryConfig::Cylinder { count, .. }) => *count *= 2,
        _ => return Ok(None),
    }
    twice.architectures().map(Some)
}

/// Hamiltonian coefficients from the config: explicit matrices when given,
/// otherwise the geometry pipeline on the first architecture.
pub fn build_hamiltonian(cfg: &RunConfig) -> Result<(EffectiveHamiltonian, Vec<String>, Value)> {
    if let Some(h) = &cfg.hamiltonian {
        let m = h.theta.len();
        let theta = DMatrix::from_fn(m, m, |i, j| {
            Complex64::new(h.theta[i][j], h.theta_imag.as_ref().map_or(0.0, |t| t[i][j]))
        });
        let interaction = match (&h.ucal, cfg.interaction.form) {
            (Some(u), form) if form != InteractionChoice::None => {
                Interaction::LgDiagonal(DMatrix::from_fn(m, m, |i, j| Complex64::new(u[i][j], 0.0)))
            }
            _ => Interaction::None,
        };
        let labels = (0..m).map(|i| format!("m{i}")).collect();
        return Ok((assemble_from_matrix(theta, interaction)?, labels, json!({ "source": "explicit" })));
    }
    let spec = cfg.basis.spec();
    let arch = cfg.architectures()?.swap_remove(0);
    let set = hopping_set(cfg, &arch, &spec)?;
    let d = cfg.interaction_delta();
    let (interaction, discarded) = match cfg.interaction.form {
        InteractionChoice::None => (Interaction::None, None),
        form => {
            let v = scattering_potential(&spec, d * spec.q_max * spec.q_max, &cfg.quadrature.potential_options())?;
            let u = interaction_tensor(&structural_tensor(&arch, &spec), &v.entries.to_complex())?;
            if form == InteractionChoice::Full {
                let red = reduce_lg_diagonal(&u);
                (Interaction::Full(u), Some(red.discarded_weight))
            } else {
                let red = reduce_lg_diagonal(&u);
                (Interaction::LgDiagonal(red.matrix), Some(red.discarded_weight))
            }
        }
    };
    let block = confinement_block(&real_part(&set.incoherent.entries));
    let info = json!({
        "source": "geometry",
        "architecture": arch.label,
        "scatterers": arch.len(),
        "model": cfg.hopping.model,
        "delta_over_qmax2": d,
        "discarded_weight": discarded,
        "confinement_block": block,
        "confinement_flanked": block.is_flanked(),
        "convergence": set.convergence,
    });
    Ok((assemble_from_matrix(set.total.entries, interaction)?, labels(&spec), info))
}

fn hamiltonian_meta(h: &EffectiveHamiltonian, info: &Value) -> Value {
    json!({
        "dims": [h.dim(), h.dim()],
        "form": h.form(),
        "hopping_defect": h.hopping_defect,
        "interaction_defect": h.interaction_defect,
        "symmetry_defect": h.symmetry_defect,
        "hermiticity_defect": h.hermiticity_defect(),
        "pipeline": info,
    })
}

pub fn assemble(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut w = Writer::new(cfg, "assemble");
    let (h, names, info) = build_hamiltonian(cfg)?;
    let meta = hamiltonian_meta(&h, &info);
    w.complex("Theta", &names, &h.theta, meta.clone())?;
    match &h.interaction {
        Interaction::None => {}
        Interaction::LgDiagonal(u) => w.complex("Ucal", &names, u, meta.clone())?,
        Interaction::Full(u) => {
            let pairs: Vec<String> = names.iter().flat_map(|a| names.iter().map(move |b| format!("{a}|{b}"))).collect();
            w.complex("U_full", &pairs, &u.matricize(), meta.clone())?;
        }
    }
    w.json("hamiltonian.json", meta)?;
    Ok(w.out)
}

pub fn evolve(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut w = Writer::new(cfg, "evolve");
    let (h, _, info) = build_hamiltonian(cfg)?;
    let dynamics = &cfg.dynamics;
    let m = h.dim();
    let basis = FockBasis::with_cap(m, dynamics.photons, dynamics.fock_cap)?;
    let psi0 = match (&dynamics.initial, &dynamics.occupation) {
        (Some(c), _) => {
            let c: Vec<Complex64> = c.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            prepare_product_state(&c, &basis).map_err(|e| Error::schema("dynamics.initial", e.to_string()))?
        }
        (None, Some(occ)) => number_state(&basis, occ).map_err(|e| Error::schema("dynamics.occupation", e.to_string()))?,
        (None, None) => {
            let mut occ = vec![0u16; m];
            occ[0] = dynamics.photons as u16;
            number_state(&basis, &occ)?
        }
    };
    let mat = hamiltonian_matrix(&h, &basis)?;
    let opts = dynamics.evolve_options();
    let full = Propagator::new(&mat, opts)?;
    let schedule = match dynamics.interaction_time {
        Some(t) => {
            let hop = hamiltonian_matrix(&h.hopping_only(), &basis)?;
            Schedule::with_quench(full, t, Propagator::new(&hop, opts)?)?
        }
        None => Schedule::new(full),
    };
    if schedule.non_unitary() {
        w.warn(format!("Hamiltonian is not Hermitian (defect {:e}); evolution is not unitary", mat.hermiticity_defect()));
    }
    let mut observables: Vec<Observable> = (0..m).map(Observable::Density).collect();
    observables.push(Observable::TotalNumber);
    observables.push(Observable::Norm);
    for c in &dynamics.correlators {
        observables.push(Observable::Correlator { r: c.r, offset: c.offset });
    }
    observables.extend(dynamics.nonlocal.iter().map(|r| Observable::NonlocalSum(*r)));
    let series = observable_series(&basis, &schedule, &psi0, &dynamics.time_grid(), &observables)?;
    let p = w.path("series.csv");
    write_series_csv(&p, &series)?;
    let meta = w.meta(json!({
        "fock_dimension": basis.dim(),
        "modes": m,
        "photons": dynamics.photons,
        "method": opts.method,
        "tol": opts.tol,
        "matrix_nonzeros": mat.nnz(),
        "number_commutator_norm": number_commutator_norm(&mat, &basis),
        "matrix_hermiticity_defect": mat.hermiticity_defect(),
        "non_unitary": schedule.non_unitary(),
        "interaction_time": dynamics.interaction_time,
        "hamiltonian": hamiltonian_meta(&h, &info),
    }));
    write_meta(&p, &meta)?;
    w.out.files.push(p);
    Ok(w.out)
}

/// Output directory of a resolved config.
pub fn output_dir(cfg: &RunConfig) -> &Path {
    &cfg.output.dir
}

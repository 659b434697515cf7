//! Subcommand implementations.

use std::fs;
use std::io;

use cohgrav_core::curvature::{metric_from_source, ricci_field, source_fields, Field3D, Grid};
use cohgrav_core::qstate::{concurrence, log_negativity, make_state, negativity, StateClass};
use cohgrav_core::quadrature::QuadratureSpec;
use cohgrav_core::scales::{validity_report, Regime};
use cohgrav_core::stress_energy::{assemble_source, point_terms, PointTerms};
use cohgrav_core::wavepacket::SitePair;
use cohgrav_core::{Error, Vec3};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{ConfigError, RunConfig};
use crate::output::{write_csv, write_field, write_json, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scales,
    Entanglement,
    SourceField,
    RicciField,
    MetricStatic,
    Decay,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scales => "scales",
            Command::Entanglement => "entanglement",
            Command::SourceField => "source-field",
            Command::RicciField => "ricci-field",
            Command::MetricStatic => "metric-static",
            Command::Decay => "decay",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    /// 2 for numerical non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(Error::NotConverged { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    pub warnings: Vec<String>,
    /// False when some integral ran out of its subdivision budget.
    pub converged: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.converged {
            0
        } else {
            2
        }
    }
}

/// Source matrix elements at every grid node, in grid order. Nodes are
/// independent, so the result does not depend on the thread count.
pub fn grid_terms(pair: &SitePair, grid: &Grid, t: f64, spec: &QuadratureSpec, threads: usize) -> Result<Vec<PointTerms>, RunError> {
    let points: Vec<Vec3> = grid.points().collect();
    point_terms_at(pair, &points, &[t], spec, threads)
}

fn point_terms_at(
    pair: &SitePair,
    points: &[Vec3],
    times: &[f64],
    spec: &QuadratureSpec,
    threads: usize,
) -> Result<Vec<PointTerms>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let jobs: Vec<(Vec3, f64)> = points.iter().flat_map(|&x| times.iter().map(move |&t| (x, t))).collect();
    let terms = pool.install(|| jobs.par_iter().map(|&(x, t)| point_terms(pair, x, t, spec)).collect::<Result<Vec<_>, _>>())?;
    Ok(terms)
}

fn warnings_for(config: &RunConfig, pair: &SitePair) -> Vec<String> {
    let mut w = Vec::new();
    if pair.is_degenerate() {
        w.push("L = 0: the two sites coincide and the state carries no spatial entanglement".into());
    } else if !pair.is_orthogonal() {
        w.push(format!(
            "site states are not orthogonal at L = {} for this profile; the coherence term mixes with the populations",
            config.l_tilde
        ));
    }
    w
}

fn base_summary(command: Command, config: &RunConfig) -> Summary {
    let mut m = Summary::new();
    m.insert("command".into(), command.name().into());
    m.insert("config_sha256".into(), config.hash().into());
    m
}

fn insert_pair(m: &mut Summary, config: &RunConfig) {
    m.insert("alpha".into(), config.alpha.into());
    m.insert("beta".into(), config.beta.into());
    m.insert("beta_im".into(), config.beta_im.into());
    m.insert("m_tilde".into(), config.m_tilde.into());
    m.insert("l_tilde".into(), config.l_tilde.into());
    m.insert("k0_tilde".into(), config.k0.into());
    m.insert("profile".into(), config.get("profile.kind").unwrap_or_default().into());
}

fn check_terms(m: &mut Summary, terms: &[PointTerms]) -> bool {
    let converged = terms.iter().all(|t| t.converged);
    let max_error = terms.iter().fold(0.0f64, |a, t| a.max(t.error));
    m.insert("converged".into(), converged.into());
    m.insert("max_error_estimate".into(), max_error.into());
    converged
}

/// Runs one subcommand. Files are written only when `output.dir` is set;
/// the summary is also stored there as `summary.json`.
pub fn run(command: Command, config: &RunConfig) -> Result<Outcome, RunError> {
    let hash = config.hash();
    let mut summary = base_summary(command, config);
    let mut warnings = Vec::new();
    let mut converged = true;
    let mut fields: Vec<Field3D> = Vec::new();
    if let Some(dir) = &config.output_dir {
        fs::create_dir_all(dir)?;
    }

    match command {
        Command::Scales => {
            let scales = config.physical_scales()?;
            let r = validity_report(&scales);
            let regime = match scales.regime() {
                Regime::MassiveStatic { .. } => "massive",
                Regime::MasslessHighMomentum { .. } => "massless",
            };
            summary.insert("regime".into(), regime.into());
            summary.insert("xi".into(), r.xi.into());
            summary.insert("e0_joules".into(), scales.energy().into());
            summary.insert("tau_s".into(), r.tau_s.into());
            summary.insert("particle_size_m".into(), r.particle_size_m.into());
            summary.insert("schwarzschild_radius_m".into(), r.schwarzschild_radius_m.map_or(Value::Null, Value::from));
            summary.insert("schwarzschild_over_size".into(), r.schwarzschild_over_size.map_or(Value::Null, Value::from));
            summary.insert("regime_ratio".into(), r.regime_ratio.into());
            summary.insert("regime_threshold".into(), r.regime_threshold.into());
            summary.insert("regime_ok".into(), r.regime_ok.into());
            summary.insert("perturbative_ok".into(), r.perturbative_ok.into());
            summary.insert("dynamical_gravity".into(), r.dynamical_gravity.into());
            if !r.regime_ok {
                warnings.push(format!(
                    "regime ratio {:.3e} is below the threshold {}; the {regime} expansion is not justified",
                    r.regime_ratio, r.regime_threshold
                ));
            }
        }
        Command::Entanglement => {
            // measures depend on |beta| only
            let b = config.beta.hypot(config.beta_im);
            let state = make_state(config.alpha, b)?;
            summary.insert("alpha".into(), config.alpha.into());
            summary.insert("beta".into(), config.beta.into());
            summary.insert("beta_im".into(), config.beta_im.into());
            summary.insert("negativity".into(), negativity(&state).into());
            summary.insert("log_negativity".into(), log_negativity(&state).into());
            summary.insert("concurrence".into(), concurrence(&state).into());
            let class = match state.classify() {
                StateClass::Separable => "separable",
                StateClass::Entangled => "entangled",
                StateClass::MaximallyEntangled => "maximally_entangled",
                StateClass::MaximallyMixed => "maximally_mixed",
            };
            summary.insert("class".into(), class.into());
        }
        Command::SourceField | Command::RicciField | Command::MetricStatic => {
            let pair = config.pair()?;
            let grid = config.grid()?;
            let state = config.state()?;
            warnings.extend(warnings_for(config, &pair));
            insert_pair(&mut summary, config);
            let t = if command == Command::MetricStatic { 0.0 } else { config.t };
            summary.insert("t".into(), t.into());
            summary.insert("grid_n".into(), config.grid_n.into());
            let terms = grid_terms(&pair, &grid, t, &config.quad, config.threads)?;
            converged = check_terms(&mut summary, &terms);
            match command {
                Command::SourceField => {
                    let (mut trace, mut coherence) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
                    for pt in &terms {
                        let s = assemble_source(pt, &state);
                        trace.push(s.trace);
                        coherence.push(s.coherence_trace);
                    }
                    fields.push(Field3D::new(grid, trace, "source")?);
                    fields.push(Field3D::new(grid, coherence, "coherence")?);
                }
                Command::RicciField => fields.push(ricci_field(&terms, &state, &grid)?.with_label("ricci")),
                _ => {
                    let metric = metric_from_source(&source_fields(&terms, &state, &grid)?)?;
                    summary.insert("non_decaying".into(), metric.non_decaying.into());
                    if metric.non_decaying {
                        warnings.push(
                            "source does not decay towards the grid boundary; the free-space solve may be distorted"
                                .into(),
                        );
                    }
                    fields.extend(metric.components);
                }
            }
            for f in &fields {
                summary.insert(format!("{}_max_abs", f.label()), f.max_abs().into());
                summary.insert(format!("{}_sum_abs", f.label()), f.sum_abs().into());
            }
        }
        Command::Decay => {
            let pair = config.pair()?;
            let state = config.state()?;
            warnings.extend(warnings_for(config, &pair));
            insert_pair(&mut summary, config);
            let x = config.probe();
            let terms = point_terms_at(&pair, &[x], &config.times, &config.quad, config.threads)?;
            converged = check_terms(&mut summary, &terms);
            let traces: Vec<f64> = terms.iter().map(|pt| assemble_source(pt, &state).trace).collect();
            let first = traces[0].abs();
            let rows: Vec<[f64; 5]> = terms
                .iter()
                .zip(&traces)
                .map(|(pt, &tr)| {
                    let normalized = if first > 0.0 { tr.abs() / first } else { f64::NAN };
                    [pt.t, tr, tr.abs(), normalized, pt.error]
                })
                .collect();
            summary.insert("probe_x".into(), x[0].into());
            summary.insert("probe_y".into(), x[1].into());
            summary.insert("probe_z".into(), x[2].into());
            summary.insert("t_first".into(), terms[0].t.into());
            summary.insert("t_last".into(), terms[terms.len() - 1].t.into());
            summary.insert("trace_first".into(), traces[0].into());
            summary.insert("trace_last".into(), traces[traces.len() - 1].into());
            let ratio = rows[rows.len() - 1][3];
            summary.insert("ratio_last".into(), if ratio.is_finite() { ratio.into() } else { Value::Null });
            if let Some(dir) = &config.output_dir {
                write_csv(
                    &dir.join("decay.csv"),
                    &hash,
                    &["t", "trace", "magnitude", "normalized", "error"],
                    rows.iter().map(|r| r.as_slice()),
                )?;
            }
        }
    }

    if let Some(dir) = &config.output_dir {
        for f in &fields {
            write_field(dir, f, config, &hash)?;
        }
        write_json(&dir.join("summary.json"), &summary)?;
    }
    Ok(Outcome { summary, warnings, converged })
}

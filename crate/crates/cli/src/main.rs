use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cohgrav::config::KEYS;
use cohgrav::output::json_line;
use cohgrav::{run, Command, ConfigBuilder, RunConfig};

#[derive(Parser)]
#[command(
    name = "cohgrav",
    version,
    about = "Stress-energy, curvature and metric fields of two-site entangled single-particle states",
    long_about = "Stress-energy, curvature and metric fields of two-site entangled single-particle states.\n\n\
        All field quantities are dimensionless: momenta in units of the packet width sigma, lengths in units of \
        1/sigma, and the source is <:T_mu nu:> in sigma units, so that multiplying by xi = G E0 sigma / c^4 gives \
        the metric perturbation. hbar_mu_nu is trace-reversed, in Lorenz gauge, with lap(hbar) = -16 pi S.\n\n\
        Exit status: 0 on success, 1 on invalid input, 2 when an integral did not converge.",
    after_help = "Run `cohgrav print-config` to list every configuration key with its resolved value.",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Cmd {
    /// xi, wash-out time and validity flags for physical (SI) parameters.
    Scales,
    /// Negativity, logarithmic negativity and concurrence of the state.
    Entanglement,
    /// Source trace and its coherence part on the grid (source.csv, coherence.csv).
    SourceField,
    /// Ricci scalar R = 8 pi <:T^mu_mu:> on the grid (ricci.csv).
    RicciField,
    /// Trace-reversed metric perturbation hbar_mu_nu of the t = 0 source (hbar_XY.csv).
    MetricStatic,
    /// Source trace at a probe point over the time list (decay.csv).
    Decay,
    /// Print the resolved configuration and exit.
    PrintConfig,
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    threads: Option<String>,
    /// Echo the resolved configuration to stderr before running.
    #[arg(long, global = true)]
    print_config: bool,
    /// Set any configuration key, e.g. `--set grid.n=32`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    #[arg(long, global = true, help = "quad.rel_tol")]
    rel_tol: Option<String>,
    #[arg(long, global = true, help = "quad.abs_tol")]
    abs_tol: Option<String>,
    #[arg(long, global = true, help = "quad.max_subdiv")]
    max_subdiv: Option<String>,
    #[arg(long, global = true, help = "quad.rule")]
    rule: Option<String>,
    #[arg(long, global = true, help = "state.alpha")]
    alpha: Option<String>,
    #[arg(long, global = true, help = "state.beta")]
    beta: Option<String>,
    #[arg(long, global = true, help = "state.beta_im")]
    beta_im: Option<String>,
    #[arg(long, global = true, help = "profile.kind")]
    profile: Option<String>,
    #[arg(long, global = true, help = "profile.k0")]
    k0: Option<String>,
    #[arg(long, global = true, help = "profile.gaussian_cutoff")]
    gaussian_cutoff: Option<String>,
    #[arg(long, global = true, help = "pair.m_tilde")]
    m_tilde: Option<String>,
    #[arg(long, global = true, help = "pair.l_tilde (accepts multiples of pi, e.g. 2pi)")]
    l_tilde: Option<String>,
    #[arg(long, global = true, help = "grid.min")]
    grid_min: Option<String>,
    #[arg(long, global = true, help = "grid.max")]
    grid_max: Option<String>,
    #[arg(long, global = true, help = "grid.n")]
    grid_n: Option<String>,
    #[arg(long = "t", global = true, help = "time.t")]
    time: Option<String>,
    #[arg(long, global = true, help = "time.list (comma separated)")]
    times: Option<String>,
    #[arg(long, global = true, help = "point.x (x,y,z or `site`)")]
    point: Option<String>,
    #[arg(long, global = true, help = "scales.regime")]
    regime: Option<String>,
    #[arg(long, global = true, help = "scales.mass_kg")]
    mass_kg: Option<String>,
    #[arg(long, global = true, help = "scales.sigma_per_m")]
    sigma_per_m: Option<String>,
    #[arg(long, global = true, help = "scales.omega0_hz")]
    omega0_hz: Option<String>,
    #[arg(long, global = true, help = "scales.sigma_c_hz")]
    sigma_c_hz: Option<String>,
    #[arg(long, global = true, help = "scales.threshold")]
    threshold: Option<String>,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("output.dir", &self.out),
            ("run.threads", &self.threads),
            ("quad.rel_tol", &self.rel_tol),
            ("quad.abs_tol", &self.abs_tol),
            ("quad.max_subdiv", &self.max_subdiv),
            ("quad.rule", &self.rule),
            ("state.alpha", &self.alpha),
            ("state.beta", &self.beta),
            ("state.beta_im", &self.beta_im),
            ("profile.kind", &self.profile),
            ("profile.k0", &self.k0),
            ("profile.gaussian_cutoff", &self.gaussian_cutoff),
            ("pair.m_tilde", &self.m_tilde),
            ("pair.l_tilde", &self.l_tilde),
            ("grid.min", &self.grid_min),
            ("grid.max", &self.grid_max),
            ("grid.n", &self.grid_n),
            ("time.t", &self.time),
            ("time.list", &self.times),
            ("point.x", &self.point),
            ("scales.regime", &self.regime),
            ("scales.mass_kg", &self.mass_kg),
            ("scales.sigma_per_m", &self.sigma_per_m),
            ("scales.omega0_hz", &self.omega0_hz),
            ("scales.sigma_c_hz", &self.sigma_c_hz),
            ("scales.threshold", &self.threshold),
        ]
    }

    fn resolve(&self) -> Result<RunConfig, String> {
        let mut b = ConfigBuilder::new();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            b.apply_text(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
            b.apply_flag(k.trim(), v).map_err(|e| e.to_string())?;
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                b.apply_flag(key, v).map_err(|e| e.to_string())?;
            }
        }
        b.build().map_err(|e| e.to_string())
    }
}

fn config_text(config: &RunConfig) -> String {
    KEYS.iter()
        .map(|(key, default, help)| format!("# {help} (default {default})\n{key} = {}\n", config.get(key).unwrap_or_default()))
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let config = match cli.common.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if matches!(cli.command, Cmd::PrintConfig) {
        print!("{}", config_text(&config));
        return ExitCode::SUCCESS;
    }
    if cli.common.print_config {
        // stdout stays a single JSON object
        eprint!("{}", config_text(&config));
    }
    let command = match cli.command {
        Cmd::Scales => Command::Scales,
        Cmd::Entanglement => Command::Entanglement,
        Cmd::SourceField => Command::SourceField,
        Cmd::RicciField => Command::RicciField,
        Cmd::MetricStatic => Command::MetricStatic,
        Cmd::Decay => Command::Decay,
        Cmd::PrintConfig => unreachable!(),
    };
    match run(command, &config) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", json_line(&outcome.summary));
            if !outcome.converged {
                eprintln!("error: some integrals did not converge; raise --max-subdiv or loosen --rel-tol");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use unified_monogamy::bounds::{EvaluateOptions, Mode, TighteningParams};
use unified_monogamy::entropy::EntropyParams;
use unified_monogamy::harness::{
    cmd_campaign, cmd_check, cmd_example1, cmd_example2, CampaignConfig, CheckRequest, HarnessError, EXIT_OK,
};
use unified_monogamy::measures::RoofOptions;

// stdout may be a closed pipe (`umono check s.json | head`); that is not an error
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

/// Unified-(q,s) entanglement monogamy and polygamy workbench.
#[derive(Parser)]
#[command(name = "umono", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// UE of the three-qubit worked example against its lower bounds, swept in alpha.
    Example1 {
        /// Upper end of the alpha sweep (starts at 1).
        #[arg(long = "alpha", default_value_t = 5.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 81)]
        steps: usize,
        #[arg(long, default_value = "example1-out")]
        out: PathBuf,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// UEoA of the three-qubit worked example against its upper bounds, swept in beta.
    Example2 {
        /// Lower end of the beta sweep (ends at 1).
        #[arg(long = "beta", default_value_t = 0.0)]
        beta_min: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        #[arg(long, default_value = "example2-out")]
        out: PathBuf,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Evaluate every bound on Haar-random pure states.
    Campaign(CampaignArgs),
    /// Evaluate every bound on a state read from a JSON file.
    Check(CheckArgs),
}

#[derive(Args, Clone)]
struct RoofArgs {
    /// Multistart count of the convex-roof search.
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Ensemble size as a multiple of rank².
    #[arg(long)]
    ensemble_factor: Option<usize>,
    /// Always optimize, even where C²/2 applies.
    #[arg(long)]
    no_fast_path: bool,
}

impl RoofArgs {
    fn apply(&self, mut r: RoofOptions) -> RoofOptions {
        if let Some(n) = self.restarts {
            r.restarts = n;
        }
        if let Some(n) = self.max_iterations {
            r.max_iterations = n;
        }
        if let Some(n) = self.ensemble_factor {
            r.ensemble_factor = n;
        }
        if self.no_fast_path {
            r.fast_path = false;
        }
        r
    }
}

#[derive(Args)]
struct CampaignArgs {
    /// JSON file with campaign settings; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    states: Option<usize>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// monogamy, polygamy or negative-power.
    #[arg(long)]
    mode: Option<Mode>,
    /// Exponent grid for monogamy or negative-power mode.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Option<Vec<f64>>,
    /// Exponent grid for polygamy mode.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    roof: RoofArgs,
}

#[derive(Args)]
struct CheckArgs {
    state_file: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value = "monogamy")]
    mode: Mode,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Use these pairwise values instead of computing them.
    #[arg(long, value_delimiter = ',')]
    pairwise: Option<Vec<f64>>,
    /// Allow a mixed 3-qubit global state of rank ≤ 2.
    #[arg(long)]
    mixed_lhs: bool,
    #[arg(long, default_value_t = RoofOptions::default().seed)]
    seed: u64,
    #[command(flatten)]
    roof: RoofArgs,
}

fn exponent(alpha: Option<f64>, beta: Option<f64>, mode: Mode) -> Result<f64, HarnessError> {
    match (alpha, beta) {
        (Some(_), Some(_)) => Err(HarnessError::Config("give either --alpha or --beta, not both".into())),
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => Ok(match mode {
            Mode::Monogamy | Mode::Polygamy => 1.0,
            Mode::NegativePower => -1.0,
        }),
    }
}

fn campaign_config(a: CampaignArgs) -> Result<CampaignConfig, HarnessError> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))?
        }
        None => CampaignConfig {
            n_states: 100,
            n_qubits: 3,
            q: 2.0,
            s: 1.0,
            mode: Mode::Monogamy,
            exponents: Vec::new(),
            k: 1.0,
            delta: 1.0,
            seed: 0,
            tolerance: None,
            roof: RoofOptions::default(),
            workers: None,
            out_dir: PathBuf::from("campaign-out"),
        },
    };
    macro_rules! set {
        ($($flag:ident => $field:ident),*) => { $(if let Some(v) = a.$flag { cfg.$field = v; })* };
    }
    set!(states => n_states, qubits => n_qubits, q => q, s => s, mode => mode, k => k, delta => delta, seed => seed,
         out => out_dir);
    if a.tolerance.is_some() {
        cfg.tolerance = a.tolerance;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    match (a.alpha, a.beta) {
        (Some(_), Some(_)) => return Err(HarnessError::Config("give either --alpha or --beta, not both".into())),
        (Some(g), None) | (None, Some(g)) => cfg.exponents = g,
        (None, None) => {}
    }
    if cfg.exponents.is_empty() {
        cfg.exponents = match cfg.mode {
            Mode::Monogamy => vec![1.0, 1.5, 2.0, 3.0],
            Mode::Polygamy => vec![0.3, 0.5, 0.8, 1.0],
            Mode::NegativePower => vec![-0.5, -1.0, -2.0],
        };
    }
    cfg.roof = a.roof.apply(cfg.roof);
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Example1 { alpha_max, steps, out, roof } => {
            let o = cmd_example1(alpha_max, steps, &out, &roof.apply(RoofOptions::default()))?;
            let a = &o.audit;
            say!(
                "T2(rho_AB): printed {:.6}, closed form {:.6}, convex roof {:.6} (converged: {})",
                a.printed_value, a.closed_form_value, a.roof_value, a.roof_converged
            );
            if a.discrepancy_with_printed {
                say!("audit: the printed T2(rho_AB) is not reproduced; curves keep the printed value");
            }
            for f in &o.files {
                say!("wrote {}", f.display());
            }
        }
        Command::Example2 { beta_min, steps, out, roof } => {
            let o = cmd_example2(beta_min, steps, &out, &roof.apply(RoofOptions::default()))?;
            for f in &o.files {
                say!("wrote {}", f.display());
            }
        }
        Command::Campaign(args) => {
            let cfg = campaign_config(args)?;
            let o = cmd_campaign(&cfg)?;
            let s = &o.summary;
            say!(
                "{} samples, {} reports, {} violations, {} findings, hierarchy {}/{} ok",
                s.samples,
                s.reports,
                s.violation_count,
                s.findings.len(),
                s.hierarchy.checked - s.hierarchy.failed,
                s.hierarchy.checked
            );
            for f in &o.files {
                say!("wrote {}", f.display());
            }
            return Ok(s.exit_code);
        }
        Command::Check(a) => {
            let params = EntropyParams::new(a.q, a.s).map_err(|e| HarnessError::Config(e.to_string()))?;
            let x = exponent(a.alpha, a.beta, a.mode)?;
            let tightening = TighteningParams::new(a.k, a.delta, x).map_err(|e| HarnessError::Config(e.to_string()))?;
            let roof = a.roof.apply(RoofOptions { seed: a.seed, ..Default::default() });
            let report = cmd_check(&CheckRequest {
                state_file: a.state_file,
                params,
                tightening,
                mode: a.mode,
                partition: None,
                pairwise: a.pairwise,
                options: EvaluateOptions { roof, mixed_lhs: a.mixed_lhs },
            })?;
            say!("{}", serde_json::to_string_pretty(&report).expect("plain data serializes"));
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

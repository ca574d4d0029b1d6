mod config;
mod svg;
mod verify;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use andrievskii::envelope::{akhiezer_curve, delta_star, diagram, upper_envelope};
use andrievskii::extremal::solve_extremal;
use andrievskii::green::green_eval;
use andrievskii::interval_sets::CompactSet;
use andrievskii::problem::{l_n_delta, remez_residuals, totik_widom_residuals, Candidate};

use config::Settings;

#[derive(Parser)]
#[command(name = "andrievskii", version, about = "Extremal polynomial growth on sets of fixed measure")]
struct Cli {
    /// Flat key=value file overriding solver tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Two-interval Green function bundle {G, c, c_dot, dG/dalpha}.
    Green {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Upper envelope Phi_delta(x) and the configuration realizing it.
    Envelope {
        #[arg(long)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Threshold delta_* where the Remez and symmetric values tie at 0.
    DeltaStar {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Asymptotic diagram table (csv, json) or figure (svg).
    Diagram {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Finite-degree extremal value M_n(x0, E) by linear programming.
    Extremal {
        #[command(flatten)]
        set: SetArg,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// L_{n,delta}(x0): best of the Remez and one-gap configurations.
    Andrievskii {
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Residuals r_n = log(2 L_n) - n Phi_delta(x0).
    Residuals {
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long)]
        delta: f64,
        /// Comma-separated degrees.
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
        n_list: Vec<usize>,
        /// Remez closed forms instead of the LP search.
        #[arg(long)]
        closed_form: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run self-check suites; exits 4 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "closed-forms")]
        suite: verify::Suite,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Largest degree in the residual suite.
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SetArg {
    /// JSON interval array, e.g. "[[-1,-0.5],[0.5,1]]".
    #[arg(long, allow_hyphen_values = true)]
    set: Option<String>,
    #[arg(long)]
    set_file: Option<PathBuf>,
}

enum Failure {
    Args(String),
    Core(andrievskii::Error),
    Verify(String),
}

impl From<andrievskii::Error> for Failure {
    fn from(e: andrievskii::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Args(_) => 2,
            Failure::Core(e) if e.is_domain() => 2,
            Failure::Core(_) => 3,
            Failure::Verify(_) => 4,
        }
    }
}

fn parse_set(arg: &SetArg) -> Result<CompactSet, Failure> {
    let text = match (&arg.set, &arg.set_file) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => fs::read_to_string(p).map_err(|e| Failure::Args(format!("cannot read {}: {e}", p.display())))?,
        (None, None) => return Err(Failure::Args("one of --set or --set-file is required".into())),
    };
    let pairs: Vec<[f64; 2]> =
        serde_json::from_str(&text).map_err(|e| Failure::Args(format!("set must be a JSON array of [lo, hi] pairs: {e}")))?;
    let pairs: Vec<(f64, f64)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
    Ok(CompactSet::from_pairs(&pairs)?)
}

fn no_svg(format: Format) -> Result<(), Failure> {
    if format == Format::Svg {
        return Err(Failure::Args("format svg is only valid for the diagram command".into()));
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output types serialize");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn run(cli: &Cli, settings: &Settings) -> Result<String, Failure> {
    let q = &settings.quad;
    Ok(match &cli.command {
        Command::Green { alpha, delta, x, format } => {
            no_svg(*format)?;
            let e = green_eval(*alpha, *delta, *x, q)?;
            match format {
                Format::Json => to_json(&json!({
                    "alpha": alpha, "delta": delta, "x": x,
                    "G": e.g, "c": e.c, "c_dot": e.c_dot, "dG_dalpha": e.dg_dalpha, "err_estimate": e.err_estimate,
                })),
                _ => format!(
                    "alpha,delta,x,G,c,c_dot,dG_dalpha\n{alpha},{delta},{x},{},{},{},{}\n",
                    e.g,
                    e.c,
                    e.c_dot,
                    opt(e.dg_dalpha)
                ),
            }
        }
        Command::Envelope { delta, x, format } => {
            no_svg(*format)?;
            let p = upper_envelope(*delta, *x, &settings.envelope)?;
            match format {
                Format::Json => to_json(&p),
                _ => format!("x,phi,source,alpha\n{},{},{},{}\n", p.x, p.phi, p.source.label(), opt(p.source.alpha())),
            }
        }
        Command::DeltaStar { tol } => format!("{}\n", delta_star(*tol)?),
        Command::Diagram { delta, points, format } => {
            let d = diagram(*delta, *points, &settings.envelope)?;
            if let Some(w) = &d.warning {
                eprintln!("warning: {w}");
            }
            match format {
                Format::Csv => d.to_csv(),
                Format::Json => to_json(&d),
                Format::Svg => {
                    let lo = -1.0 + delta;
                    let alphas: Vec<f64> = (1..=200).map(|k| lo + (0.0 - lo) * (k as f64 / 200.0).powi(2)).collect();
                    let curve: Vec<(f64, f64)> = akhiezer_curve(*delta, &alphas, q).into_iter().flatten().collect();
                    svg::render(&d, &curve)
                }
            }
        }
        Command::Extremal { set, x0, n, format } => {
            no_svg(*format)?;
            let e = parse_set(set)?;
            let r = solve_extremal(&e, *x0, *n, &settings.oracle())?;
            match format {
                Format::Json => to_json(&r),
                _ => {
                    let tag = r.case_tag.map(|t| serde_json::to_value(t).expect("tag serializes"));
                    let tag = tag.as_ref().and_then(|t| t.as_str()).unwrap_or("");
                    format!("value,log_value,degree_deficient,case_tag\n{},{},{},{tag}\n", r.value, r.log_value, r.degree_deficient)
                }
            }
        }
        Command::Andrievskii { x0, delta, n, format } => {
            no_svg(*format)?;
            let r = l_n_delta(*x0, *delta, *n, &settings.problem)?;
            let alpha = match r.best {
                Candidate::Akhiezer { alpha } => Some(alpha),
                Candidate::Remez => None,
            };
            match format {
                Format::Json => to_json(&json!({ "x0": x0, "delta": delta, "n": n, "result": r })),
                _ => format!(
                    "x0,delta,n,value,log_value,best,alpha\n{x0},{delta},{n},{},{},{},{}\n",
                    r.value,
                    r.log_value,
                    r.best.label(),
                    opt(alpha)
                ),
            }
        }
        Command::Residuals { x0, delta, n_list, closed_form, format } => {
            no_svg(*format)?;
            let s = if *closed_form {
                remez_residuals(*x0, *delta, n_list)?
            } else {
                totik_widom_residuals(*x0, *delta, n_list, &settings.problem)?
            };
            match format {
                Format::Json => to_json(&s),
                _ => s.to_csv(),
            }
        }
        Command::Verify { suite, seed, trials, n_max } => {
            let checks = verify::run(*suite, settings, &verify::Options { seed: *seed, trials: *trials, n_max: *n_max })?;
            let mut out = String::new();
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &checks {
                out.push_str(&format!("{:<width$}  {}  {}\n", c.name, if c.ok { "PASS" } else { "FAIL" }, c.detail));
            }
            let failed = checks.iter().filter(|c| !c.ok).count();
            if failed > 0 {
                emit(cli, &out).map_err(Failure::Args)?;
                return Err(Failure::Verify(format!("{failed} of {} checks failed", checks.len())));
            }
            out
        }
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.output {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut settings = Settings::default();
    if let Some(path) = &cli.config {
        let applied = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))
            .and_then(|text| settings.apply(&text));
        if let Err(msg) = applied {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli, &settings).and_then(|text| emit(&cli, &text).map_err(Failure::Args));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Args(m) | Failure::Verify(m) => m.clone(),
                Failure::Core(e) => e.to_string(),
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}

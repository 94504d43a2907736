//! Command-line front end shared by the `qfid` binary and the tests.
//!
//! Exit codes: 0 on success, 1 on any input error, 2 when a simulation
//! finds its average fidelity below one of the bounds.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bound::{self, SiteMass};
use crate::channel::{Channel, ChannelKind, DEFAULT_TOLERANCE};
use crate::simulator::{self, Mode, Simulator, StateSpec, DOMINANCE_SLACK};
use crate::stabilizer::StabilizerCode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BOUND_VIOLATED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qfid", version, about = "Fidelity bounds for stabilizer codes over general memoryless channels")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Trace-preservation tolerance for channel validation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct ChannelSource {
    /// Channel JSON file.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Built-in channel, e.g. depolarizing:0.04, x_rotation:0.1, random:7:3.
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infidelity bounds for given (n, t, p), or for a code and channel.
    Bound {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        tprime: Option<usize>,
        #[arg(long)]
        code: Option<PathBuf>,
        #[command(flatten)]
        channel: ChannelSource,
    },
    /// Code length, dimension, distances and purity.
    CodeInfo {
        code: PathBuf,
        #[arg(long)]
        weight_budget: Option<usize>,
    },
    /// Minimum-weight recovery for every syndrome.
    DecodeTable { code: PathBuf },
    /// Pauli masses and validation of a single-site channel.
    ChannelInfo {
        file: Option<PathBuf>,
        #[arg(long)]
        kind: Option<String>,
    },
    /// Exact simulation of a code under a memoryless channel.
    Simulate {
        /// Stabilizer code file, one signed generator per line
        #[arg(long)]
        code: PathBuf,
        #[command(flatten)]
        channel: ChannelSource,
        /// Codeword: basis:<i> (projected basis state) or random:<seed>
        #[arg(long, default_value = "basis:0")]
        state: String,
        /// Recovery: full, or bounded:<t'> with t' <= t
        #[arg(long, default_value = "full")]
        mode: String,
    },
    /// Bound along t = floor(alpha n) for a list of lengths.
    Sweep {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: f64,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
    },
}

type CliResult = Result<Outcome, String>;

struct Outcome {
    command: &'static str,
    inputs: Value,
    results: Value,
    text: String,
    exit: i32,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load_code(path: &PathBuf) -> Result<StabilizerCode, String> {
    StabilizerCode::from_file(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_channel(src: &ChannelSource, tolerance: f64) -> Result<Channel, String> {
    let ch = match (&src.channel, &src.kind) {
        (Some(path), None) => Channel::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(kind)) => ChannelKind::parse(kind).and_then(|k| k.build()).map_err(err)?,
        (Some(_), Some(_)) => return Err("give either --channel or --kind, not both".into()),
        (None, None) => return Err("a channel is required (--channel FILE or --kind KIND)".into()),
    };
    ch.ensure_valid(tolerance).map_err(err)?;
    Ok(ch)
}

fn channel_label(src: &ChannelSource) -> Value {
    match (&src.channel, &src.kind) {
        (Some(p), _) => json!(p.display().to_string()),
        (_, Some(k)) => json!(k),
        _ => Value::Null,
    }
}

fn fmt_e(x: f64) -> String {
    format!("{x:.6e}")
}

fn bound_json(r: &bound::BoundReport) -> Value {
    json!({
        "n": r.n,
        "t": r.t_used,
        "p": r.p,
        "epsilon": r.epsilon,
        "log10_epsilon": r.log10_epsilon,
        "fidelity_lb": r.fidelity_lb,
        "fidelity_lb_clamped": r.fidelity_lb_clamped,
        "vacuous": r.is_vacuous(),
    })
}

fn bound_text(label: &str, r: &bound::BoundReport) -> String {
    format!(
        "{label}: epsilon = {}  fidelity >= {:.9}  (clamped {:.9}{})\n",
        fmt_e(r.epsilon),
        r.fidelity_lb,
        r.fidelity_lb_clamped,
        if r.is_vacuous() { ", vacuous" } else { "" }
    )
}

fn cmd_bound(
    n: Option<usize>,
    t: Option<usize>,
    p: Option<f64>,
    tprime: Option<usize>,
    code: Option<PathBuf>,
    channel: ChannelSource,
    tolerance: f64,
) -> CliResult {
    let (n, t, p, inputs) = match code {
        Some(path) => {
            if n.is_some() || t.is_some() || p.is_some() {
                return Err("--code/--channel cannot be combined with --n/--t/--p".into());
            }
            let c = load_code(&path)?;
            let params = c.params(c.n()).map_err(err)?;
            let t = params.t().ok_or("distance search did not finish")?;
            let ch = load_channel(&channel, tolerance)?;
            let p = ch.pauli_mass_unchecked().p().min(1.0);
            let inputs = json!({"code": path.display().to_string(), "channel": channel_label(&channel), "tprime": tprime});
            (c.n(), t, p, inputs)
        }
        None => {
            let (Some(n), Some(t), Some(p)) = (n, t, p) else {
                return Err("bound needs --n, --t and --p (or --code with a channel)".into());
            };
            (n, t, p, json!({"n": n, "t": t, "p": p, "tprime": tprime}))
        }
    };
    let paper = bound::paper_bound(n, t, p).map_err(err)?;
    let product = bound::product_bound(&vec![SiteMass::from_p(p); n], t).map_err(err)?;
    let bounded = tprime.map(|tp| bound::bounded_distance_bound(n, tp, p)).transpose().map_err(err)?;

    let mut text = format!("n = {n}, t = {t}, p = {p}\n");
    text += &bound_text("binomial tail bound", &paper);
    text += &format!("product form (i.i.d. masses): epsilon = {}\n", fmt_e(product));
    text += &format!("asymptotic p^(t+1) 2^n: {}\n", fmt_e(paper.asymptotic));
    if let Some(b) = &bounded {
        text += &bound_text(&format!("bounded distance (t' = {})", b.t_used), b);
    }
    let results = json!({
        "paper": bound_json(&paper),
        "product_epsilon": product,
        "asymptotic": paper.asymptotic,
        "bounded_distance": bounded.as_ref().map(bound_json),
    });
    Ok(Outcome { command: "bound", inputs, results, text, exit: EXIT_OK })
}

fn cmd_code_info(path: PathBuf, budget: Option<usize>) -> CliResult {
    let c = load_code(&path)?;
    let budget = budget.unwrap_or(c.n());
    let params = c.params(budget).map_err(err)?;
    let t = params.t();
    let pure = params.is_pure();
    let text = format!(
        "n = {}, k = {}, d = {}, d' = {}, t = {}, {}\n",
        c.n(),
        c.k(),
        params.d,
        params.d_prime,
        t.map_or("unknown".to_string(), |t| t.to_string()),
        match pure {
            Some(true) => "pure",
            Some(false) => "impure",
            None => "purity unknown",
        }
    );
    let results = json!({
        "n": c.n(),
        "k": c.k(),
        "d": params.d.value(),
        "d_exact": params.d.exact().is_some(),
        "d_prime": params.d_prime.value(),
        "d_prime_exact": params.d_prime.exact().is_some(),
        "t": t,
        "pure": pure,
    });
    let inputs = json!({"code": path.display().to_string(), "weight_budget": budget});
    Ok(Outcome { command: "code-info", inputs, results, text, exit: EXIT_OK })
}

fn cmd_decode_table(path: PathBuf) -> CliResult {
    let c = load_code(&path)?;
    let table = c.decoding_table().map_err(err)?;
    let mut text = String::from("syndrome  leader  weight  ambiguous\n");
    let mut rows = Vec::with_capacity(table.len());
    for (s, e) in table.iter() {
        text += &format!("{s}  {}  {}  {}\n", e.leader.pattern(), e.leader.weight(), e.ambiguous);
        rows.push(json!({
            "syndrome": s.to_string(),
            "leader": e.leader.pattern(),
            "weight": e.leader.weight(),
            "ambiguous": e.ambiguous,
        }));
    }
    let inputs = json!({"code": path.display().to_string()});
    Ok(Outcome { command: "decode-table", inputs, results: json!({"entries": rows}), text, exit: EXIT_OK })
}

fn cmd_channel_info(file: Option<PathBuf>, kind: Option<String>, tolerance: f64) -> CliResult {
    let src = ChannelSource { channel: file, kind };
    let ch = match (&src.channel, &src.kind) {
        (Some(path), None) => Channel::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(k)) => ChannelKind::parse(k).and_then(|k| k.build()).map_err(err)?,
        _ => return Err("channel-info needs exactly one of FILE or --kind".into()),
    };
    let v = ch.validate(tolerance);
    let mass = ch.pauli_mass_unchecked();
    let mut text = format!(
        "q = {}, Kraus operators = {}\nvalidation: {} (max deviation {:.3e}, tolerance {:.1e})\n",
        ch.q(),
        ch.kraus().len(),
        if v.is_ok() { "ok" } else { "NOT trace preserving" },
        v.deviation,
        tolerance
    );
    for (i, row) in mass.grid().iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            text += &format!("mass[{i}][{j}] = {m:.12e}\n");
        }
    }
    text += &format!("ell0 = {:.12}\np = {:.12e}\n", mass.ell0(), mass.p());
    let results = json!({
        "q": ch.q(),
        "kraus_count": ch.kraus().len(),
        "valid": v.is_ok(),
        "deviation": v.deviation,
        "masses": mass.grid(),
        "ell0": mass.ell0(),
        "p": mass.p(),
        "total": mass.total(),
    });
    let inputs = json!({"channel": channel_label(&src)});
    let exit = if v.is_ok() { EXIT_OK } else { EXIT_INPUT };
    Ok(Outcome { command: "channel-info", inputs, results, text, exit })
}

fn cmd_simulate(code: PathBuf, channel: ChannelSource, state: String, mode: String, tolerance: f64) -> CliResult {
    let c = load_code(&code)?;
    let ch = load_channel(&channel, tolerance)?;
    let spec: StateSpec = state.parse().map_err(err)?;
    let mode: Mode = mode.parse().map_err(err)?;
    let sim = Simulator::new(c).map_err(err)?;
    let chs = simulator::memoryless(&ch, sim.code().n());
    let report = sim.run(&chs, spec, mode).map_err(err)?;

    let mut text = format!(
        "n = {}, k = {}, t = {}, mode = {}, state = {}\np = {:.12e}\n",
        report.n, report.k, report.t, report.mode, spec, report.p_max
    );
    text += "syndrome  probability  fidelity  leader  weight  ambiguous  beyond_radius\n";
    for b in &report.branches {
        text += &format!(
            "{}  {:.6e}  {}  {}  {}  {}  {}\n",
            b.syndrome,
            b.probability,
            b.fidelity.map_or("-".to_string(), |f| format!("{f:.12}")),
            b.leader,
            b.leader_weight,
            b.ambiguous,
            b.beyond_radius
        );
    }
    text += &format!("average fidelity = {:.15}\n", report.average_fidelity);
    for check in &report.checks {
        text += &format!(
            "{}: 1 - epsilon = {:.15} (epsilon {}), margin {:.3e} -> {}\n",
            check.label,
            check.fidelity_lb,
            fmt_e(check.epsilon),
            check.margin,
            if check.holds { "holds" } else { "VIOLATED" }
        );
    }
    let exit = if report.dominance_holds() { EXIT_OK } else { EXIT_BOUND_VIOLATED };
    let inputs = json!({
        "code": code.display().to_string(),
        "channel": channel_label(&channel),
        "state": spec.to_string(),
        "mode": mode.to_string(),
    });
    let results = serde_json::to_value(&report).map_err(err)?;
    Ok(Outcome { command: "simulate", inputs, results, text, exit })
}

fn cmd_sweep(alpha: f64, p: f64, lengths: Vec<usize>) -> CliResult {
    let points = bound::sweep_asymptotic(alpha, p, &lengths).map_err(err)?;
    let feasible = points.first().is_some_and(|pt| pt.feasible);
    let mut text = format!(
        "alpha = {alpha}, p = {p}, 2 p^alpha = {:.6} ({})\n",
        2.0 * p.powf(alpha),
        if feasible { "feasible" } else { "infeasible" }
    );
    text += "n  t  epsilon  p(2p^alpha)^n  within\n";
    for pt in &points {
        text += &format!("{}  {}  {}  {}  {}\n", pt.n, pt.t, fmt_e(pt.epsilon), fmt_e(pt.envelope), pt.within_envelope(0.0));
    }
    let results = json!({"feasible": feasible, "points": points});
    let inputs = json!({"alpha": alpha, "p": p, "n": lengths});
    Ok(Outcome { command: "sweep", inputs, results, text, exit: EXIT_OK })
}

fn dispatch(cfg: RunConfig) -> CliResult {
    let tol = cfg.tolerance;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(format!("tolerance {tol} must be positive"));
    }
    match cfg.command {
        Command::Bound { n, t, p, tprime, code, channel } => cmd_bound(n, t, p, tprime, code, channel, tol),
        Command::CodeInfo { code, weight_budget } => cmd_code_info(code, weight_budget),
        Command::DecodeTable { code } => cmd_decode_table(code),
        Command::ChannelInfo { file, kind } => cmd_channel_info(file, kind, tol),
        Command::Simulate { code, channel, state, mode } => cmd_simulate(code, channel, state, mode, tol),
        Command::Sweep { alpha, p, lengths } => cmd_sweep(alpha, p, lengths),
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes its report to `out`. Errors go to `errout`.
pub fn run<I, T>(args: I, out: &mut dyn Write, errout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(errout, "{e}") };
            return code;
        }
    };
    let format = cfg.format;
    let tolerance = cfg.tolerance;
    match dispatch(cfg) {
        Ok(o) => {
            let written = match format {
                Format::Text => out.write_all(o.text.as_bytes()),
                Format::Json => {
                    let doc = json!({
                        "command": o.command,
                        "inputs": o.inputs,
                        "results": o.results,
                        "tolerances": {
                            "channel_validation": tolerance,
                            "dominance_slack": DOMINANCE_SLACK,
                            "min_branch_probability": simulator::MIN_BRANCH_PROBABILITY,
                        },
                        "version": env!("CARGO_PKG_VERSION"),
                    });
                    let s = serde_json::to_string_pretty(&doc).expect("report serializes");
                    writeln!(out, "{s}")
                }
            };
            if written.is_err() {
                return EXIT_INPUT;
            }
            o.exit
        }
        Err(msg) => {
            let _ = writeln!(errout, "error: {msg}");
            EXIT_INPUT
        }
    }
}

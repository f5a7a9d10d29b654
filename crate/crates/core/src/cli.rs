//! Command-line front end: argument model, report assembly and output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distfn::{make_empirical, read_sample_file, DistributionModel};
use crate::equilibrium::{EquilibriumChain, NumericSettings};
use crate::error::{Error, Result};
use crate::orderings::{classify_all, ordering_report, AgeingClassification, OrderingReport};
use crate::report::{ChainSummary, CurveSet, Inputs, ReportDocument, Results};
use crate::shapes::Outcome;
use crate::transforms::{curve, empirical_ttt, format_decimal, write_csv, CurveKind};

/// Exit status for malformed input.
pub const EXIT_INPUT: u8 = 2;
/// Exit status for numeric failures.
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ageorder",
    version,
    about = "Equilibrium ladders, reliability transforms and generalized ageing orderings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the ladder of one distribution and tabulate T̄, r and μ per level.
    Chain(CommonArgs),
    /// TTT, R-transform and Lorenz curves at levels 1..S−1.
    Curves(CommonArgs),
    /// Full ordering matrix for a pair of distributions.
    Order(CommonArgs),
    /// Ageing classification of one distribution at levels 1..S.
    Classify(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `family=<name> param.<key>=<value> ...`, `data=<path>`, or a path to a sample file.
    #[arg(long = "dist", required = true)]
    pub dist: Vec<String>,
    /// Highest ladder level S.
    #[arg(long = "levels", default_value_t = 3)]
    pub levels: usize,
    /// Directory for the report and CSV files; stdout when absent.
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
    #[arg(long = "format", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Absolute quadrature tolerance.
    #[arg(long = "quad-tol")]
    pub quad_tol: Option<f64>,
    /// Number of grid points per window.
    #[arg(long = "grid")]
    pub grid: Option<usize>,
    /// Survival-level window as `LO,HI`.
    #[arg(long = "window", value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
}

fn parse_window(text: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got '{text}'"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("'{a}' is not a number"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("'{b}' is not a number"))?;
    Ok((lo, hi))
}

impl CommonArgs {
    fn settings(&self) -> NumericSettings {
        let mut s = NumericSettings::default();
        if let Some(t) = self.quad_tol {
            s.quad_abs_tol = t;
        }
        if let Some(g) = self.grid {
            s.grid_points = g;
        }
        if let Some(w) = self.window {
            s.quantile_window = w;
        }
        s
    }
}

/// A rendered invocation: the report plus any side files.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub report: ReportDocument,
    /// CSV body for `--format csv`.
    pub csv: String,
    /// File name of the CSV when written under `--out`.
    pub csv_name: &'static str,
}

/// Parses a `--dist` value: spec text when it holds `=`, otherwise a sample path.
pub fn parse_dist(text: &str) -> Result<DistributionModel> {
    if text.contains('=') {
        DistributionModel::from_spec(text)
    } else {
        make_empirical(&read_sample_file(Path::new(text))?)
    }
}

fn expect_specs(args: &CommonArgs, count: usize, command: &str) -> Result<Vec<DistributionModel>> {
    if args.dist.len() != count {
        return Err(Error::Parse(format!(
            "{command} takes exactly {count} --dist argument(s), got {}",
            args.dist.len()
        )));
    }
    if args.levels < 1 {
        return Err(Error::Parameter("--levels must be at least 1".into()));
    }
    args.dist.iter().map(|d| parse_dist(d)).collect()
}

fn document(command: &str, args: &CommonArgs, settings: NumericSettings, results: Results, warnings: Vec<String>) -> ReportDocument {
    ReportDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: Inputs {
            command: command.to_string(),
            specs: args.dist.clone(),
            levels: args.levels,
            settings,
        },
        results,
        warnings,
    }
}

fn empirical_warning(d: &DistributionModel) -> Option<String> {
    (!d.is_absolutely_continuous()).then(|| {
        format!("{d} is an empirical step law; failure rates at level 1 vanish between jumps and ordering verdicts are best-effort")
    })
}

/// Builds the report for one invocation without touching the filesystem
/// beyond reading sample files.
pub fn render(command: &Command) -> Result<Rendered> {
    match command {
        Command::Chain(args) => render_chain(args),
        Command::Curves(args) => render_curves(args),
        Command::Order(args) => render_order(args),
        Command::Classify(args) => render_classify(args),
    }
}

fn render_chain(args: &CommonArgs) -> Result<Rendered> {
    let settings = args.settings();
    let d = expect_specs(args, 1, "chain")?.remove(0);
    let chain = EquilibriumChain::build(&d, args.levels, settings)?;
    let summary = ChainSummary::from_chain(&chain)?;
    let mut csv = String::from("s,x,t_bar,failure_rate,mrl\n");
    let opt = |v: Option<f64>| v.map(format_decimal).unwrap_or_default();
    for level in &summary.levels {
        for i in 0..level.x.len() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                level.level,
                format_decimal(level.x[i]),
                format_decimal(level.t_bar[i]),
                opt(level.failure_rate[i]),
                opt(level.mrl[i])
            );
        }
    }
    let warnings = empirical_warning(&d).into_iter().collect();
    Ok(Rendered {
        report: document("chain", args, settings, Results::Chain(summary), warnings),
        csv,
        csv_name: "chain.csv",
    })
}

fn render_curves(args: &CommonArgs) -> Result<Rendered> {
    let settings = args.settings();
    let d = expect_specs(args, 1, "curves")?.remove(0);
    if args.levels < 2 {
        return Err(Error::Parameter("curves need --levels of at least 2".into()));
    }
    let chain = EquilibriumChain::build(&d, args.levels, settings)?;
    let mut curves = Vec::new();
    for s in 1..args.levels {
        for kind in CurveKind::ALL {
            match (kind, d.sample()) {
                (CurveKind::Ttt, Some(sample)) if s == 1 => curves.push(empirical_ttt(sample)?),
                _ => curves.push(curve(&chain, kind, s)?),
            }
        }
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &curves)?;
    let csv = String::from_utf8(buf).expect("csv output is ascii");
    let mut warnings: Vec<String> = empirical_warning(&d).into_iter().collect();
    if d.sample().is_some() {
        warnings.push("level-1 TTT curve is the empirical scaled TTT statistic at i/n".into());
    }
    let set = CurveSet {
        distribution: d.name().to_string(),
        curves,
        files: if args.out.is_some() { vec!["curves.csv".into()] } else { Vec::new() },
    };
    Ok(Rendered {
        report: document("curves", args, settings, Results::Curves(set), warnings),
        csv,
        csv_name: "curves.csv",
    })
}

fn verdict_warnings(report: &OrderingReport) -> Vec<String> {
    let mut out = report.notes.clone();
    for v in &report.matrix {
        if v.equivalence_candidate {
            out.push(format!(
                "{} at s={}: boundary verdict (margin {:e}), equivalence candidate",
                v.relation.label(),
                v.level,
                v.primary_form.verdict.margin
            ));
        }
        for f in std::iter::once(&v.primary_form).chain(&v.secondary_forms) {
            if let Some(note) = &f.verdict.note {
                out.push(format!("{} at s={}, form {}: {note}", v.relation.label(), v.level, f.name));
            }
        }
        if !v.agreement {
            out.push(format!("{} at s={}: equivalent forms disagree", v.relation.label(), v.level));
        }
    }
    if !report.chain_consistency.is_empty() {
        out.push(format!(
            "{} implication-chain violation(s) detected",
            report.chain_consistency.len()
        ));
    }
    out
}

fn render_order(args: &CommonArgs) -> Result<Rendered> {
    let settings = args.settings();
    let ds = expect_specs(args, 2, "order")?;
    let chains = ds
        .iter()
        .map(|d| EquilibriumChain::build(d, args.levels + 1, settings))
        .collect::<Result<Vec<_>>>()?;
    let report = ordering_report(&chains[0], &chains[1], args.levels)?;
    let mut csv = String::from("relation,s,outcome,margin,agreement,equivalence_candidate\n");
    for v in &report.matrix {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            v.relation.label(),
            v.level,
            outcome_label(v.outcome),
            format_decimal(v.primary_form.verdict.margin),
            v.agreement,
            v.equivalence_candidate
        );
    }
    let mut warnings = verdict_warnings(&report);
    warnings.push(format!(
        "verdicts are certified only on the window where survivals lie in [{}, {}]",
        settings.quantile_window.0, settings.quantile_window.1
    ));
    Ok(Rendered {
        report: document("order", args, settings, Results::Order(report), warnings),
        csv,
        csv_name: "order.csv",
    })
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Holds => "holds",
        Outcome::Fails => "fails",
        Outcome::Inconclusive => "inconclusive",
    }
}

fn classify_warnings(c: &AgeingClassification) -> Vec<String> {
    let mut out = Vec::new();
    if c.exponential_borderline {
        out.push(format!("{} is exponential-borderline: every class sits on its boundary", c.distribution));
    }
    for e in &c.entries {
        if !e.agreement {
            out.push(format!(
                "{} at s={}: direct and exponential-reference verdicts disagree",
                e.relation.label(),
                e.level
            ));
        }
        if let Some(note) = &e.direct.note {
            out.push(format!("{} at s={}, direct check: {note}", e.relation.label(), e.level));
        }
    }
    out.push("the average-failure-rate class is tested as (1/x)∫₀ˣ r(t)dt ≥ r(0)".into());
    out
}

fn render_classify(args: &CommonArgs) -> Result<Rendered> {
    let settings = args.settings();
    let d = expect_specs(args, 1, "classify")?.remove(0);
    let chain = EquilibriumChain::build(&d, args.levels + 1, settings)?;
    let classification = classify_all(&chain, args.levels)?;
    let mut csv = String::from("relation,s,classical_name,direct,bridge,agreement\n");
    for e in &classification.entries {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            e.relation.label(),
            e.level,
            e.classical_name.as_deref().unwrap_or(""),
            outcome_label(e.direct.outcome),
            outcome_label(e.bridge.outcome),
            e.agreement
        );
    }
    let mut warnings: Vec<String> = empirical_warning(&d).into_iter().collect();
    warnings.extend(classify_warnings(&classification));
    Ok(Rendered {
        report: document("classify", args, settings, Results::Classify(classification), warnings),
        csv,
        csv_name: "classify.csv",
    })
}

fn common(command: &Command) -> &CommonArgs {
    match command {
        Command::Chain(a) | Command::Curves(a) | Command::Order(a) | Command::Classify(a) => a,
    }
}

/// Renders and writes one invocation. With `--out` the report goes to
/// `report.json` and the CSV alongside it; otherwise the selected format is
/// written to `stdout`.
pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> Result<()> {
    let rendered = render(&cli.command)?;
    let args = common(&cli.command);
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("report.json"), rendered.report.to_json())?;
            std::fs::write(dir.join(rendered.csv_name), &rendered.csv)?;
        }
        None => {
            let body = match args.format {
                Format::Json => rendered.report.to_json(),
                Format::Csv => rendered.csv,
            };
            // A closed downstream pipe is not a failure of the computation.
            match stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

/// Maps an error to the process exit status.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_NUMERIC
    }
}

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use multispace::coalesce::{
    verify_coord_limit, verify_infinitesimal_limit, CoalesceOptions, CoalescenceReport, DEFAULT_PRECISION_BITS,
    MIN_PRECISION_BITS,
};
use multispace::jetoracle::{jet_prolong_characteristic, jet_prolong_expanded, jet_prolong_recursive};
use multispace::lattice::csv_io::read_samples;
use multispace::lattice::{newton_interpolant, newton_monomial, PointedCurveSamples};
use multispace::multiprolong::{
    check_action_consistency, infinitesimal_recursive, prolong_direct, prolong_finite_action,
};
use multispace::random::DEFAULT_SEED;
use multispace::verify::{self, Suite, VerifyConfig};
use multispace::{
    parse, CoalescenceSchedule, ExactScalar, Execution, OneParamAction, ProlongationResult, VectorField,
};

#[derive(Parser, Debug)]
#[command(name = "multispace", version, about = "Prolonged infinitesimals on the multispace of curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized verification.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Float precision for limit extrapolation.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: usize,
    /// Run trials and schedule steps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newton and monomial interpolants of an `x,u` CSV file.
    Interp { samples: PathBuf },
    /// Jet-space prolongation of a vector field.
    ProlongJet {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        order: usize,
        /// Print all three formulations and whether they agree.
        #[arg(long)]
        all_forms: bool,
    },
    /// Multispace infinitesimals on sampled points.
    ProlongMulti {
        #[command(flatten)]
        field: FieldArgs,
        /// Finite action `x̃(x, u, eps)`.
        #[arg(long, requires = "utilde", allow_hyphen_values = true)]
        xtilde: Option<String>,
        /// Finite action `ũ(x, u, eps)`.
        #[arg(long, requires = "xtilde", allow_hyphen_values = true)]
        utilde: Option<String>,
        /// `x,u` CSV file.
        samples: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// Randomized verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Coalescent-limit convergence report.
    Coalesce {
        #[command(flatten)]
        field: FieldArgs,
        /// Curve `u(x)` as an expression in `x`.
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        /// Base point.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "1/8")]
        h0: String,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        /// Comma-separated offsets starting at 0; default `0,1,…,order`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        offsets: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = Target::Infinitesimal)]
        target: Target,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[arg(long, requires = "phi", conflicts_with = "action", allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, requires = "xi", allow_hyphen_values = true)]
    phi: Option<String>,
    /// Built-in: scaling, rotation, translation, projective.
    #[arg(long)]
    action: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Recursive,
    Both,
    FiniteAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Identities,
    Oracles,
    Coalesce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Coordinate,
    Infinitesimal,
}

/// Usage, parse, I/O and singularity errors; exit status 2.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Rendered output and whether every check in it passed.
struct Output {
    json: serde_json::Value,
    csv: Vec<Vec<String>>,
    pass: bool,
}

impl Output {
    fn new(value: impl Serialize, csv: Vec<Vec<String>>, pass: bool) -> Result<Self, Failure> {
        Ok(Output { json: serde_json::to_value(value)?, csv, pass })
    }
}

fn scalar(s: &str, what: &str) -> Result<ExactScalar, Failure> {
    s.parse().map_err(|_| Failure(format!("{what}: `{s}` is not an exact rational")))
}

fn field(args: &FieldArgs) -> Result<Option<VectorField>, Failure> {
    match (&args.xi, &args.phi, &args.action) {
        (Some(xi), Some(phi), _) => Ok(Some(VectorField::parse(xi, phi)?)),
        (_, _, Some(name)) => VectorField::builtin(name)
            .map(Some)
            .ok_or_else(|| Failure(format!("unknown action `{name}`"))),
        _ => Ok(None),
    }
}

fn require_field(args: &FieldArgs) -> Result<VectorField, Failure> {
    field(args)?.ok_or_else(|| Failure("give --xi and --phi, or --action".into()))
}

fn load_samples(path: &PathBuf) -> Result<PointedCurveSamples, Failure> {
    let file = File::open(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    read_samples(file).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn interp(path: &PathBuf) -> Result<Output, Failure> {
    #[derive(Serialize)]
    struct Interp {
        points: usize,
        newton: String,
        monomial: String,
        reproduces_samples: bool,
    }
    let s = load_samples(path)?;
    let newton = newton_interpolant(&s);
    let monomial = newton_monomial(&s);
    let mut ok = true;
    for (x, u) in s.x().iter().zip(s.u()) {
        ok &= monomial.eval(&multispace::expr::binding([("x", x.clone())]))? == *u;
    }
    let out = Interp {
        points: s.x().len(),
        newton: newton.to_string(),
        monomial: monomial.to_string(),
        reproduces_samples: ok,
    };
    let csv = vec![
        vec!["form".into(), "expression".into()],
        vec!["newton".into(), out.newton.clone()],
        vec!["monomial".into(), out.monomial.clone()],
    ];
    Output::new(out, csv, ok)
}

fn prolong_jet(args: &FieldArgs, order: usize, all_forms: bool) -> Result<Output, Failure> {
    let vf = require_field(args)?;
    let rec = jet_prolong_recursive(&vf, order)?;
    if !all_forms {
        let csv = std::iter::once(vec!["k".into(), "component".into()])
            .chain(rec.printed().into_iter().enumerate().map(|(k, c)| vec![k.to_string(), c]))
            .collect();
        return Output::new(rec.printed(), csv, true);
    }
    #[derive(Serialize)]
    struct Forms {
        recursive: Vec<String>,
        expanded: Vec<String>,
        characteristic: Vec<String>,
        agree: bool,
    }
    let exp = jet_prolong_expanded(&vf, order)?;
    let chr = jet_prolong_characteristic(&vf, order)?;
    let agree = rec.equal(&exp) && rec.equal(&chr);
    let forms = Forms { recursive: rec.printed(), expanded: exp.printed(), characteristic: chr.printed(), agree };
    let mut csv = vec![vec!["k".into(), "recursive".into(), "expanded".into(), "characteristic".into()]];
    for k in 0..=order {
        csv.push(vec![
            k.to_string(),
            forms.recursive[k].clone(),
            forms.expanded[k].clone(),
            forms.characteristic[k].clone(),
        ]);
    }
    Output::new(forms, csv, agree)
}

fn result_rows(r: &ProlongationResult, csv: &mut Vec<Vec<String>>) {
    let method = serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    for k in 0..=r.order {
        csv.push(vec![
            method.clone(),
            k.to_string(),
            r.xi[k].to_string(),
            r.phi[k].to_string(),
            r.phibracket[k].to_string(),
        ]);
    }
}

fn prolong_multi(
    args: &FieldArgs,
    finite: (Option<&String>, Option<&String>),
    path: &PathBuf,
    order: usize,
    method: MethodArg,
) -> Result<Output, Failure> {
    let s = load_samples(path)?;
    let header = vec!["method".into(), "k".into(), "xi".into(), "phi".into(), "phibracket".into()];
    let action = || -> Result<OneParamAction, Failure> {
        match (finite, &args.action) {
            ((Some(xt), Some(ut)), _) => Ok(OneParamAction::parse(xt, ut)?),
            (_, Some(name)) => Ok(OneParamAction::builtin(name)?),
            _ => Err(Failure("finite-action needs --action or --xtilde and --utilde".into())),
        }
    };
    let vf = || -> Result<VectorField, Failure> {
        match field(args)? {
            Some(vf) => Ok(vf),
            None => Ok(check_action_consistency(&action()?)?),
        }
    };
    let mut csv = vec![header];
    match method {
        MethodArg::Direct => {
            let r = prolong_direct(&vf()?, &s, order)?;
            result_rows(&r, &mut csv);
            Output::new(r, csv, true)
        }
        MethodArg::Recursive => {
            let r = infinitesimal_recursive(&vf()?, &s, order)?;
            result_rows(&r, &mut csv);
            Output::new(r, csv, true)
        }
        MethodArg::FiniteAction => {
            let r = prolong_finite_action(&action()?, &s, order)?;
            result_rows(&r, &mut csv);
            Output::new(r, csv, true)
        }
        MethodArg::Both => {
            #[derive(Serialize)]
            struct Both {
                direct: ProlongationResult,
                recursive: ProlongationResult,
                equal: bool,
            }
            let vf = vf()?;
            let direct = prolong_direct(&vf, &s, order)?;
            let recursive = infinitesimal_recursive(&vf, &s, order)?;
            let equal = direct.phibracket == recursive.phibracket;
            result_rows(&direct, &mut csv);
            result_rows(&recursive, &mut csv);
            Output::new(Both { direct, recursive, equal }, csv, equal)
        }
    }
}

fn run_verify(suite: SuiteArg, trials: usize, cfg: VerifyConfig) -> Result<Output, Failure> {
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Identities => Suite::Identities,
        SuiteArg::Oracles => Suite::Oracles,
        SuiteArg::Coalesce => Suite::Coalesce,
    };
    let report = verify::run(suite, &VerifyConfig { trials, ..cfg });
    let mut csv = vec![vec!["check".into(), "trials".into(), "passed".into(), "pass".into()]];
    for c in &report.checks {
        csv.push(vec![c.name.clone(), c.trials.to_string(), c.passed.to_string(), c.pass.to_string()]);
    }
    let pass = report.pass;
    Output::new(report, csv, pass)
}

#[allow(clippy::too_many_arguments)]
fn coalesce(
    args: &FieldArgs,
    curve: &str,
    x: &str,
    order: usize,
    h0: &str,
    steps: usize,
    offsets: Option<&Vec<String>>,
    target: Target,
    opts: CoalesceOptions,
) -> Result<Output, Failure> {
    let curve = parse(curve).map_err(|e| Failure(format!("--curve: {e}")))?;
    let x = scalar(x, "--x")?;
    let offsets = match offsets {
        Some(raw) => raw.iter().map(|t| scalar(t, "--offsets")).collect::<Result<Vec<_>, _>>()?,
        None => (0..=order as i64).map(ExactScalar::from_int).collect(),
    };
    let sched = CoalescenceSchedule::new(x, offsets, scalar(h0, "--h0")?, steps)?;
    let report: CoalescenceReport = match target {
        Target::Coordinate => verify_coord_limit(&curve, order, &sched, &opts)?,
        Target::Infinitesimal => verify_infinitesimal_limit(&require_field(args)?, &curve, order, &sched, &opts)?,
    };
    let mut csv = vec![vec!["m".into(), "h".into(), "value".into(), "residual".into()]];
    for (m, (h, v)) in report.h.iter().zip(&report.value).enumerate() {
        csv.push(vec![m.to_string(), h.to_string(), v.to_string(), format!("{:e}", report.residuals[m])]);
    }
    let pass = report.pass;
    Output::new(report, csv, pass)
}

fn render(out: &Output, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&out.json)? + "\n"),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            for row in &out.csv {
                w.write_record(row)?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| Failure(e.to_string()))?)?)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    if cli.precision_bits < MIN_PRECISION_BITS {
        return Err(Failure(format!("--precision-bits must be at least {MIN_PRECISION_BITS}")));
    }
    let execution = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let opts = CoalesceOptions { precision_bits: cli.precision_bits, execution };
    let out = match &cli.command {
        Command::Interp { samples } => interp(samples)?,
        Command::ProlongJet { field, order, all_forms } => prolong_jet(field, *order, *all_forms)?,
        Command::ProlongMulti { field, xtilde, utilde, samples, order, method } => {
            prolong_multi(field, (xtilde.as_ref(), utilde.as_ref()), samples, *order, *method)?
        }
        Command::Verify { suite, trials } => run_verify(
            *suite,
            *trials,
            VerifyConfig { seed: cli.seed, trials: *trials, execution, precision_bits: cli.precision_bits },
        )?,
        Command::Coalesce { field, curve, x, order, h0, steps, offsets, target } => {
            coalesce(field, curve, x, *order, h0, *steps, offsets.as_ref(), *target, opts)?
        }
    };
    let text = render(&out, cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(out.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use polya_order::sweep::{format_float, threads_from_env};
use polya_order::{
    apply_general, auto_grid, bernstein, build_partition, lookup, parse_rational, r_n,
    run_sweep_with_threads, stancu, OperatorKind, PolyaError, PolyaParams, StandardParams,
    SweepConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "polya",
    version,
    about = "Pólya urn distributions and Bernstein-Stancu operators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the pmf of a Pólya urn.
    Pmf {
        #[arg(long)]
        n: usize,
        /// Standard urn (a = x, b = 1 - x).
        #[arg(long, conflicts_with_all = ["a", "b"], required_unless_present = "a")]
        x: Option<f64>,
        #[arg(long, requires = "b", allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, requires = "a", allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Evaluate an operator on a registered function.
    Eval {
        #[arg(long = "f")]
        function: String,
        #[arg(long)]
        op: OperatorKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        /// White mass for `general` (default x).
        #[arg(long)]
        a: Option<f64>,
        /// Black mass for `general` (default 1 - x).
        #[arg(long)]
        b: Option<f64>,
    },
    /// Run a verification sweep from a TOML config.
    Verify {
        config: PathBuf,
        #[arg(long, default_value = "report.csv")]
        out: PathBuf,
    },
    /// Bernstein-Stancu value and error along a c grid, as CSV.
    Curve {
        #[arg(long = "f")]
        function: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: f64,
        /// Comma-separated list, or `auto:N`.
        #[arg(long, allow_hyphen_values = true)]
        c_grid: String,
    },
    /// Print the interlacing partition for n, k and x = p/q.
    Partition {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    /// Invalid input: exit 2.
    Usage(String),
    /// A check did not hold: exit 1.
    Check(String),
}

impl From<PolyaError> for Failure {
    fn from(e: PolyaError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Pmf {
            n,
            x,
            a,
            b,
            c,
            json,
            csv,
        } => cmd_pmf(n, x, a.zip(b), c, json, csv),
        Command::Eval {
            function,
            op,
            n,
            x,
            c,
            a,
            b,
        } => cmd_eval(&function, op, n, x, c, a, b),
        Command::Verify { config, out } => cmd_verify(&config, &out),
        Command::Curve {
            function,
            n,
            x,
            c_grid,
        } => cmd_curve(&function, n, x, &c_grid),
        Command::Partition { n, k, x, json } => cmd_partition(n, k, &x, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}

#[derive(Serialize)]
struct PmfOut<'a> {
    n: usize,
    a: f64,
    b: f64,
    c: f64,
    probs: &'a [f64],
    cumulative: Vec<f64>,
}

fn cmd_pmf(
    n: usize,
    x: Option<f64>,
    ab: Option<(f64, f64)>,
    c: f64,
    json: bool,
    csv: bool,
) -> Result<(), Failure> {
    let params: PolyaParams = match (x, ab) {
        (Some(x), _) => StandardParams::new(n, x, c)?.into(),
        (None, Some((a, b))) => PolyaParams::new(n, a, b, c)?,
        (None, None) => return Err(Failure::Usage("give --x or both --a and --b".into())),
    };
    let pmf = params.pmf();
    let cumulative = pmf.cumulative();
    if json {
        let out = PmfOut {
            n,
            a: params.a(),
            b: params.b(),
            c,
            probs: pmf.probs(),
            cumulative,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("plain data")
        );
    } else if csv {
        println!("k,p,cumulative");
        for (k, (p, cum)) in pmf.probs().iter().zip(&cumulative).enumerate() {
            println!("{k},{},{}", format_float(*p), format_float(*cum));
        }
    } else {
        println!("{:>4}  {:<20}  {:<20}", "k", "p_k", "cumulative");
        for (k, (p, cum)) in pmf.probs().iter().zip(&cumulative).enumerate() {
            println!("{k:>4}  {p:<20.17}  {cum:<20.17}");
        }
    }
    Ok(())
}

fn cmd_eval(
    function: &str,
    op: OperatorKind,
    n: usize,
    x: f64,
    c: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
) -> Result<(), Failure> {
    let f = lookup(function)?;
    let needs_c = matches!(op, OperatorKind::Stancu | OperatorKind::General);
    if needs_c != c.is_some() {
        return Err(Failure::Usage(if needs_c {
            format!("--c is required for --op {op}")
        } else {
            format!("--c is not accepted for --op {op}")
        }));
    }
    if op != OperatorKind::General && (a.is_some() || b.is_some()) {
        return Err(Failure::Usage("--a/--b only apply to --op general".into()));
    }
    let eval = match op {
        OperatorKind::Bernstein => bernstein(f, n, x)?,
        OperatorKind::Rn => r_n(f, n, x)?,
        OperatorKind::Stancu => stancu(f, n, x, c.expect("checked"))?,
        OperatorKind::General => apply_general(
            f,
            n,
            x,
            a.unwrap_or(x),
            b.unwrap_or(1.0 - x),
            c.expect("checked"),
        )?,
    };
    println!("operator  {}", eval.op);
    println!("function  {} ({})", f.id, f.description);
    println!("n         {}", eval.n);
    println!("x         {}", eval.x);
    println!("c         {}", eval.c);
    println!("value     {}", eval.value);
    println!("f(x)      {}", f.at(x));
    println!("error     {}", eval.error);
    Ok(())
}

fn cmd_verify(config: &std::path::Path, out: &std::path::Path) -> Result<(), Failure> {
    let cfg = SweepConfig::from_path(config)?;
    let report = run_sweep_with_threads(&cfg, threads_from_env())?;
    fs::write(out, report.to_csv())
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", out.display())))?;
    print!("{}", report.summary());
    println!("report written to {}", out.display());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} failing cells", report.failures)))
    }
}

fn parse_grid(spec: &str, n: usize, x: f64) -> Result<Vec<f64>, Failure> {
    if let Some(count) = spec.strip_prefix("auto:") {
        let count: usize = count
            .parse()
            .map_err(|_| Failure::Usage(format!("bad auto grid `{spec}`")))?;
        return Ok(auto_grid(n, x, count, 5.0)?);
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad c value `{s}`")))
        })
        .collect()
}

fn cmd_curve(function: &str, n: usize, x: f64, spec: &str) -> Result<(), Failure> {
    const TOL: f64 = 1e-12;
    let f = lookup(function)?;
    let grid = parse_grid(spec, n, x)?;
    polya_order::ordering::validate_grid(n, x, &grid)?;
    let evals = grid
        .iter()
        .map(|&c| stancu(f, n, x, c))
        .collect::<Result<Vec<_>, _>>()?;
    println!("c,value,error");
    for e in &evals {
        println!(
            "{},{},{}",
            format_float(e.c),
            format_float(e.value),
            format_float(e.error)
        );
    }
    if f.is_convex {
        if let Some(w) = evals
            .windows(2)
            .find(|w| w[1].error.abs() - w[0].error.abs() < -TOL)
        {
            return Err(Failure::Check(format!(
                "error decreases from c = {} to c = {}",
                w[0].c, w[1].c
            )));
        }
    }
    Ok(())
}

fn cmd_partition(n: usize, k: usize, x: &str, json: bool) -> Result<(), Failure> {
    let xr = parse_rational(x)?;
    let p = build_partition(n, k, xr)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&p).expect("plain data"));
        return Ok(());
    }
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    println!("n_seq  {}", join(&p.n_seq));
    println!("m_seq  {}", join(&p.m_seq));
    println!("raw_n  {}", join(&p.raw_n));
    println!("raw_m  {}", join(&p.raw_m));
    let remap: Vec<String> = p.remap().iter().map(|(r, s)| format!("{r}->{s}")).collect();
    println!("remap  {}", remap.join(" "));
    println!("slack  {}", p.min_slack(xr));
    Ok(())
}

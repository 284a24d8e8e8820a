use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lagflux_core::dynamics::requested_threads;
use lagflux_core::engine::{AmbientMode, Window};
use lagflux_core::io::{
    read_problem, render_region_svg, run, ChekanovParams, Command, CustomParams, DynamicsSpec, Ext, Family,
    FiberParams, PolytopeSpec, ProblemFile, ResultReport, SurfaceParams, ToricParams, Q,
};
use lagflux_core::lattice::{parse_rational, Extended, RationalVector};
use lagflux_core::{Error, Result};

mod selftest;

/// Bounds and simulation certificates for Lagrangian flux invariants.
#[derive(Parser)]
#[command(name = "lagflux", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the two-sided bound for a family and class.
    Bound(ProblemArgs),
    /// Build the family's witness Hamiltonian, simulate it and print a certificate.
    Verify(ProblemArgs),
    /// Write the case diagram of a split plane torus as SVG.
    Diagram(DiagramArgs),
    /// Run the built-in examples and report PASS/FAIL for each.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Toric,
    Split,
    Chekanov,
    Surface,
    Cpn,
    S2s2,
    CustomModel,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    InteriorOnly,
    FullAmbient,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file (TOML); replaces `--family` and the parameter flags.
    #[arg(long, conflicts_with = "family")]
    problem: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "problem")]
    family: Option<FamilyArg>,
    /// Comma-separated rationals, e.g. `1,3` or `1/3,1/3`.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Comma-separated integers; for chekanov `m,n`.
    #[arg(long, allow_hyphen_values = true)]
    class: Option<String>,
    /// Surface: the two areas `A₊,A₋` (`inf` allowed).
    #[arg(long)]
    areas: Option<String>,
    /// Surface: area on the positive side; implies a separating curve.
    #[arg(long = "A")]
    area: Option<String>,
    #[arg(long)]
    separating: bool,
    /// Surface: class multiplicity.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    /// Chekanov: area of the circle.
    #[arg(long)]
    a: Option<String>,
    /// Chekanov: size of the ambient model used by `verify`.
    #[arg(long)]
    size: Option<String>,
    /// Toric: `orthant`, `simplex` or `cube`.
    #[arg(long, default_value = "orthant")]
    polytope: String,
    #[arg(long, value_enum, default_value = "full-ambient")]
    mode: ModeArg,
    /// Custom model: `annulus` or `unit-box`.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DiagramArgs {
    /// Two positive rationals.
    #[arg(long)]
    x: String,
    /// `r` for `[−r, r]²`, or `m_min,m_max,n_min,n_max`.
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    window: String,
    #[arg(long, short)]
    out: PathBuf,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidModel(msg.into())
}

fn rationals(s: &str) -> Result<Vec<Q>> {
    s.split(',')
        .map(|t| parse_rational(t.trim()).map(Q).map_err(usage))
        .collect()
}

fn integers(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|e| usage(format!("bad integer {t:?}: {e}"))))
        .collect()
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| usage(format!("--{flag} is required for this family")))
}

fn fiber(args: &ProblemArgs) -> Result<FiberParams> {
    Ok(FiberParams {
        x: rationals(required(&args.x, "x")?)?,
        class: integers(required(&args.class, "class")?)?,
    })
}

fn problem(args: &ProblemArgs) -> Result<ProblemFile> {
    if let Some(path) = &args.problem {
        return read_problem(path);
    }
    let family = match args.family.expect("clap requires --family without --problem") {
        FamilyArg::Toric => Family::Toric(ToricParams {
            polytope: PolytopeSpec::Named(args.polytope.clone()),
            x: rationals(required(&args.x, "x")?)?,
            class: integers(required(&args.class, "class")?)?,
            mode: match args.mode {
                ModeArg::InteriorOnly => AmbientMode::InteriorOnly,
                ModeArg::FullAmbient => AmbientMode::FullAmbient,
            },
        }),
        FamilyArg::Split => Family::Split(fiber(args)?),
        FamilyArg::Cpn => Family::Cpn(fiber(args)?),
        FamilyArg::S2s2 => Family::S2s2(fiber(args)?),
        FamilyArg::Chekanov => {
            let class = integers(required(&args.class, "class")?)?;
            let [m, n] = class[..] else {
                return Err(usage("--class must be m,n for chekanov"));
            };
            Family::Chekanov(ChekanovParams {
                a: Q(parse_rational(required(&args.a, "a")?).map_err(usage)?),
                m,
                n,
                k: args.size.as_deref().map(|s| parse_rational(s).map(Q).map_err(usage)).transpose()?,
            })
        }
        FamilyArg::Surface => {
            let ext = |s: &str| s.trim().parse::<Extended>().map(Ext).map_err(usage);
            let (a_plus, a_minus) = match (&args.areas, &args.area) {
                (Some(areas), _) => match areas.split(',').collect::<Vec<_>>()[..] {
                    [p, m] => (ext(p)?, ext(m)?),
                    _ => return Err(usage("--areas must be A₊,A₋")),
                },
                (None, Some(a)) => (ext(a)?, Ext(Extended::Infinity)),
                (None, None) => return Err(usage("--areas or --A is required for surface")),
            };
            Family::Surface(SurfaceParams {
                a_plus,
                a_minus,
                separating: args.separating || args.area.is_some(),
                k: args.k.ok_or_else(|| usage("--k is required for surface"))?,
            })
        }
        FamilyArg::CustomModel => Family::CustomModel(CustomParams {
            periods: None,
            pair: args.pair.clone(),
        }),
    };
    let q = |s: &Option<String>| s.as_deref().map(|s| parse_rational(s).map(Q).map_err(usage)).transpose();
    let dynamics = DynamicsSpec {
        eps: q(&args.eps)?,
        delta: q(&args.delta)?,
        dt: args.dt,
        samples: args.samples,
        t_max: args.t_max,
    };
    Ok(ProblemFile {
        family,
        dynamics: (dynamics != DynamicsSpec::default()).then_some(dynamics),
    })
}

fn print(report: &ResultReport, json: bool) {
    let text = if json { format!("{}\n", report.to_json()) } else { report.to_string() };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn window(s: &str) -> Result<Window> {
    match integers(s)?[..] {
        [r] if r >= 0 => Ok(Window::square(r)),
        [m_min, m_max, n_min, n_max] => Ok(Window {
            m_min,
            m_max,
            n_min,
            n_max,
        }),
        _ => Err(usage("--window must be r or m_min,m_max,n_min,n_max")),
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Bound(args) => {
            let report = run(Command::Bound, &problem(&args)?)?;
            print(&report, args.json);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify(args) => {
            let report = run(Command::Verify, &problem(&args)?)?;
            print(&report, args.json);
            let passed = report.certificate.as_ref().is_some_and(|c| c.passed());
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Cmd::Diagram(args) => {
            let x = RationalVector::new(rationals(&args.x)?.into_iter().map(|q| q.0).collect())?;
            let d = render_region_svg(&x, window(&args.window)?, &args.out)?;
            let w = d.window;
            for n in (w.n_min..=w.n_max).rev() {
                let row: Vec<String> = (w.m_min..=w.m_max)
                    .map(|m| format!("{:>10}", d.cell(m, n).map_or("?", |c| c.label.name())))
                    .collect();
                println!("{n:>3} {}", row.join(""));
            }
            println!("wrote {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Selftest => Ok(if selftest::run() { ExitCode::SUCCESS } else { ExitCode::FAILURE }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = requested_threads() {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("lagflux: could not size the thread pool: {e}");
        }
    }
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lagflux: {e}");
            ExitCode::FAILURE
        }
    }
}

use clap::{Args, Parser, Subcommand};
use sjg_cli::commands;
use sjg_cli::harness::{self, RunConfig, Suite};
use sjg_cli::report::{fmt_f64, to_json, write_atomic};
use sjg_core::config::{HolonomyConvention, TwoFormConvention};
use sjg_core::{ChartId, GeoError, ModelParams, NumConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "sjg", version, about = "Geometry of the Jacobi-group homogeneous spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Model parameters, e.g. `k=2,nu=1,delta=1`.
    #[arg(long, env = "SJG_PARAMS")]
    params: Option<String>,
    /// Print JSON.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Print CSV.
    #[arg(long)]
    csv: bool,
    /// Kähler form normalisation: `full` (i h dz∧dz̄) or `half`.
    #[arg(long, env = "SJG_TWO_FORM", default_value = "full")]
    two_form: String,
    /// Curvature of the line bundle: `1w` (−iω) or `2w` (−2iω).
    #[arg(long, env = "SJG_HOLONOMY", default_value = "1w")]
    holonomy: String,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a metric, Christoffel field, connection matrix or form at a point.
    Eval {
        #[arg(long)]
        space: String,
        #[arg(long)]
        object: String,
        #[arg(long)]
        at: String,
        /// Metric id overriding the chart default.
        #[arg(long)]
        metric: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = "SJG_SAMPLES", default_value_t = 200)]
        samples: usize,
        #[arg(long, env = "SJG_SEED", default_value_t = 42)]
        seed: u64,
        /// Report path.
        #[arg(long, env = "SJG_OUT", default_value = "sjg-report.json")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the geodesic equations with RK4.
    Geodesic {
        #[arg(long)]
        space: String,
        #[arg(long)]
        init: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Keep every n-th step.
        #[arg(long, default_value_t = 1)]
        every: usize,
        #[arg(long)]
        metric: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Integrate Hamilton's equations on the extended space.
    Flow {
        #[arg(long)]
        space: String,
        /// Linear Hamiltonian coefficients `a,b,c,m,n`.
        #[arg(long = "H")]
        h: String,
        /// Coefficients `c0,c1,...` of the polynomial κ term.
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long, default_value = "x=0,y=1,q=0,p=0,kappa=0")]
        init: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 1)]
        every: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Berry phase of a loop, by line integral and by Stokes.
    LoopPhase {
        #[arg(long)]
        space: String,
        /// `circle:r=R`.
        #[arg(long)]
        curve: String,
        #[arg(long)]
        center: Option<String>,
        /// Two coordinate names spanning the circle's plane.
        #[arg(long)]
        plane: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the almost-cosymplectic structure at random points.
    CosymCheck {
        #[arg(long)]
        space: String,
        #[arg(long, env = "SJG_SAMPLES", default_value_t = 200)]
        samples: usize,
        #[arg(long, env = "SJG_SEED", default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Geo(GeoError),
    Io(std::io::Error),
    /// The run finished; the report says what failed.
    Verify,
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        Failure::Geo(e)
    }
}

impl Common {
    /// Defaults, then `SJG_K`/`SJG_NU`/`SJG_DELTA`, then `--params`.
    fn params(&self) -> Result<ModelParams, Failure> {
        let mut p = ModelParams::default();
        for (var, key) in [("SJG_K", "k"), ("SJG_NU", "nu"), ("SJG_DELTA", "delta")] {
            if let Ok(v) = std::env::var(var) {
                p = p.with_overrides(&format!("{key}={v}")).map_err(|e| Failure::Usage(format!("{var}: {e}")))?;
            }
        }
        if let Some(s) = &self.params {
            p = p.with_overrides(s).map_err(|e| Failure::Usage(e.to_string()))?;
        }
        Ok(p)
    }

    fn num(&self) -> Result<NumConfig, Failure> {
        let two_form = match self.two_form.as_str() {
            "full" => TwoFormConvention::Full,
            "half" => TwoFormConvention::Half,
            o => return Err(Failure::Usage(format!("--two-form: expected full or half, got `{o}`"))),
        };
        let holonomy = match self.holonomy.to_ascii_lowercase().as_str() {
            "1w" => HolonomyConvention::OneW,
            "2w" => HolonomyConvention::TwoW,
            o => return Err(Failure::Usage(format!("--holonomy: expected 1w or 2w, got `{o}`"))),
        };
        Ok(NumConfig { two_form, holonomy, ..NumConfig::default() })
    }
}

fn chart(s: &str) -> Result<ChartId, Failure> {
    s.parse().map_err(|e: GeoError| Failure::Usage(e.to_string()))
}

fn print_table(t: &commands::Table, common: &Common) -> Result<(), Failure> {
    if common.json {
        print!("{}", to_json(&t.to_json()));
    } else {
        print!("{}", t.to_csv());
    }
    match t.exit {
        Some(t) => Err(Failure::Geo(GeoError::DomainExit { t })),
        None => Ok(()),
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Eval { space, object, at, metric, common } => {
            let chart = chart(&space)?;
            if common.csv {
                return Err(Failure::Usage("eval prints JSON only".into()));
            }
            let v = commands::eval(chart, &object, &at, common.params()?, metric.as_deref(), &common.num()?)?;
            print!("{}", to_json(&v));
        }
        Cmd::Verify { suite, samples, seed, out, common } => {
            let suite: Suite = suite.parse().map_err(|_| Failure::Usage(format!("unknown suite `{suite}`; expected one of {}", Suite::NAMES.join(", "))))?;
            let cfg = RunConfig { params: common.params()?, seed, samples, num: common.num()?, out: Some(out.clone()) };
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let report = harness::run(&cfg, suite)?;
            write_atomic(&out, &to_json(&report)).map_err(Failure::Io)?;
            if common.json {
                print!("{}", to_json(&report));
            } else if common.csv {
                print!("{}", report.to_csv());
            } else {
                for r in report.failures() {
                    println!("FAIL {} ({}): max_abs_err {} tol {}", r.identity_id, r.paper_anchor, fmt_f64(r.max_abs_err), fmt_f64(r.tol));
                    if let Some(e) = &r.error {
                        println!("     {e}");
                    }
                }
                let s = report.summary;
                println!(
                    "suite {}: {} identities, {} passed, {} failed ({} errata and {} discrepancies expected to differ); report at {}",
                    report.suite,
                    s.total,
                    s.passed,
                    s.failed,
                    s.errata,
                    s.discrepancies,
                    out.display()
                );
            }
            if !report.pass {
                return Err(Failure::Verify);
            }
        }
        Cmd::Geodesic { space, init, t, step, every, metric, common } => {
            let chart = chart(&space)?;
            let table = commands::geodesic(chart, &init, t, step, every, common.params()?, metric.as_deref(), &common.num()?)?;
            print_table(&table, &common)?;
        }
        Cmd::Flow { space, h, kappa, init, t, step, every, common } => {
            let chart = chart(&space)?;
            let table = commands::flow(chart, &h, kappa.as_deref(), &init, t, step, every, common.params()?)?;
            print_table(&table, &common)?;
        }
        Cmd::LoopPhase { space, curve, center, plane, common } => {
            let chart = chart(&space)?;
            let r = commands::loop_phase(chart, &curve, center.as_deref(), plane.as_deref(), common.params()?, &common.num()?)?;
            if common.json {
                print!("{}", to_json(&r));
            } else {
                println!("loop,stokes,abs_diff");
                println!("{},{},{}", fmt_f64(r.loop_value), fmt_f64(r.surface_value), fmt_f64(r.diff));
            }
        }
        Cmd::CosymCheck { space, samples, seed, common } => {
            let chart = chart(&space)?;
            let v = commands::cosym_check(chart, samples, seed, common.params()?, &common.num()?)?;
            print!("{}", to_json(&v));
            if v["acos"] != true {
                return Err(Failure::Verify);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Geo(e)) if e.is_domain() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Geo(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

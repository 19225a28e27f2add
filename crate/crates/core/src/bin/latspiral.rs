//! Command-line driver for the counting, sampling and second-moment tools.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use latspiral::approximates::{
    counting_series, enumerate_approximates, spiralling_counts, ApproximateOptions,
};
use latspiral::geometry::{Region, SphericalCap};
use latspiral::harness::{
    emit_report, fit_envelope, run_sweep, EnvelopeScale, EnvelopeSpec, ExperimentKind,
    ReportFormat, SweepConfig,
};
use latspiral::moment2d::{
    centered_second_moment, ky_second_norm, series_eval, SeriesSpec, ALL_EXPANSIONS,
};
use latspiral::numtheory::{zeta2, TotientTable};
use latspiral::{haar, Error};

#[derive(Parser)]
#[command(name = "latspiral", version, about = "Lattice approximate counting and verification")]
struct Cli {
    /// RNG seed shared by every randomized subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for replicated or sampled runs.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// JSON config file for sweep-style subcommands; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> ReportFormat {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct CapArgs {
    /// Cap axis, comma-separated (unit-normalized); for one-dimensional x use
    /// "+1", "-1" or "+1,-1" to pick sides.
    #[arg(long)]
    cap_axis: Option<String>,
    /// Cap polar angle in radians.
    #[arg(long)]
    cap_angle: Option<f64>,
}

impl CapArgs {
    fn build(&self, d_sphere: usize) -> Result<Option<SphericalCap>, Error> {
        match (&self.cap_axis, self.cap_angle) {
            (None, None) => Ok(None),
            (Some(axis), angle) => {
                if d_sphere == 0 {
                    let plus = axis.contains("+1") || axis.trim() == "1";
                    let minus = axis.contains("-1");
                    Ok(Some(SphericalCap::zero_sphere(plus, minus)))
                } else {
                    let axis = parse_vec(axis)?;
                    let angle = angle.unwrap_or(std::f64::consts::FRAC_PI_2);
                    Ok(Some(SphericalCap::angular(axis, angle)?))
                }
            }
            (None, Some(_)) => Err(Error::InvalidConfig("cap-angle given without cap-axis".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the approximates of a vector.
    Approx {
        /// Target vector, comma-separated.
        #[arg(long)]
        x: String,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        t: f64,
        /// Keep only pairs with gcd(p, q) = 1.
        #[arg(long)]
        coprime: bool,
        #[command(flatten)]
        cap: CapArgs,
        /// Report counts along a comma-separated T grid instead of dumping pairs.
        #[arg(long)]
        t_grid: Option<String>,
    },
    /// Direction statistics of the approximates of a vector.
    Spiral {
        #[arg(long)]
        x: String,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        coprime: bool,
        #[command(flatten)]
        cap: CapArgs,
    },
    /// Replicated lattice-counting sweep (config-driven; see --config).
    Count,
    /// Monte Carlo moments over the invariant measure on unimodular lattices.
    HaarMc {
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Region as JSON, e.g. '{"kind":"p","d":2,"T":10.0,"c":1.0}'.
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 1)]
        moment: u8,
        #[arg(long)]
        primitive: bool,
    },
    /// Closed-form second moment pipeline for the two-dimensional region.
    Moment2d {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        t: f64,
        /// Re-derive every per-n integral by adaptive quadrature.
        #[arg(long)]
        quadrature_check: bool,
        /// Cross-check against a Monte Carlo second moment.
        #[arg(long)]
        mc_check: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Compare truncated expansions against direct evaluation.
    VerifySeries {
        /// Comma-separated n values.
        #[arg(long, default_value = "10,20,50,100")]
        n: String,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Totient-ratio partial sums with their analytic envelope.
    PhiSum {
        #[arg(long)]
        n_max: u64,
        /// Checkpoints per decade (log-spaced).
        #[arg(long, default_value_t = 4)]
        per_decade: u32,
    },
    /// Run a sweep and fit the error envelope; exit 2 when the fit fails.
    Fit {
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
}

fn parse_vec(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidConfig(format!("bad number {p:?}: {e}")))
        })
        .collect()
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn load_config(cli: &Cli) -> Result<SweepConfig, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("count/fit need --config <file>".into()))?;
    let text = std::fs::read_to_string(path)?;
    let mut config: SweepConfig = serde_json::from_str(&text)?;
    // Flags override file values when explicitly changed from the defaults.
    if cli.seed != 0 {
        config.seed = cli.seed;
    }
    if cli.threads != 1 {
        config.threads = cli.threads;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let format: ReportFormat = cli.format.into();
    match &cli.command {
        Command::Approx { x, c, t, coprime, cap, t_grid } => {
            let x = parse_vec(x)?;
            let opts = ApproximateOptions { coprime: *coprime };
            if let Some(grid) = t_grid {
                let grid = parse_vec(grid)?;
                let rows = counting_series(&x, *c, &grid, &opts)?;
                let content = match format {
                    ReportFormat::Json => serde_json::to_string_pretty(&rows)?,
                    ReportFormat::Csv => {
                        let mut s = String::from("T,count,target,residual,n_exact\n");
                        for r in rows {
                            s.push_str(&format!(
                                "{},{},{},{},{}\n",
                                r.t, r.count, r.target, r.residual, r.n_exact
                            ));
                        }
                        s
                    }
                };
                write_out(&cli.out, &content)?;
                return Ok(0);
            }
            let cap = cap.build(x.len() - 1)?;
            let pairs = enumerate_approximates(&x, *c, *t, &opts)?;
            let content = match format {
                ReportFormat::Json => serde_json::to_string_pretty(&pairs)?,
                ReportFormat::Csv => {
                    let mut s = String::from("q,p,err_norm,dir,in_cap\n");
                    for a in &pairs {
                        let p = a.p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
                        let dir = a
                            .dir
                            .as_ref()
                            .map(|d| d.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"))
                            .unwrap_or_default();
                        let in_cap = match (&a.dir, &cap) {
                            (Some(d), Some(cap)) => cap.contains(d).to_string(),
                            _ => String::new(),
                        };
                        s.push_str(&format!("{},{},{},{},{}\n", a.q, p, a.err_norm, dir, in_cap));
                    }
                    s
                }
            };
            write_out(&cli.out, &content)?;
            Ok(0)
        }
        Command::Spiral { x, c, t, coprime, cap } => {
            let x = parse_vec(x)?;
            let cap = cap
                .build(x.len() - 1)?
                .unwrap_or_else(|| SphericalCap::hemisphere(x.len() - 1));
            let counts =
                spiralling_counts(&x, *c, *t, &cap, &ApproximateOptions { coprime: *coprime })?;
            write_out(&cli.out, &serde_json::to_string_pretty(&counts)?)?;
            Ok(0)
        }
        Command::Count => {
            let config = load_config(cli)?;
            let result = run_sweep(&config)?;
            write_out(&cli.out, &emit_report(&result.averaged, None, format)?)?;
            Ok(0)
        }
        Command::HaarMc { samples, region, moment, primitive } => {
            let region: Region = serde_json::from_str(region)?;
            let est = match moment {
                1 => haar::mc_mean(&region, *primitive, *samples, cli.seed, cli.threads)?,
                2 => haar::mc_second_moment(&region, *primitive, *samples, cli.seed, cli.threads)?,
                m => return Err(Error::InvalidConfig(format!("moment must be 1 or 2, got {m}"))),
            };
            #[derive(serde::Serialize)]
            struct Report<'a> {
                estimate: f64,
                target: Option<f64>,
                se: f64,
                z: Option<f64>,
                full: &'a haar::MomentEstimate,
            }
            let report = Report {
                estimate: est.estimate,
                target: est.target,
                se: est.std_error,
                z: est.z_score,
                full: &est,
            };
            write_out(&cli.out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
        Command::Moment2d { c, t, quadrature_check, mc_check, samples } => {
            let report = ky_second_norm(*c, *t, *quadrature_check)?;
            let centered = centered_second_moment(*c, *t)?;
            let mc = if *mc_check {
                let region = Region::p(latspiral::geometry::PRegion::new(2, *c, *t)?);
                Some(haar::mc_second_moment(&region, true, *samples, cli.seed, cli.threads)?)
            } else {
                None
            };
            #[derive(serde::Serialize)]
            struct Out<'a> {
                report: &'a latspiral::moment2d::SecondMomentReport,
                centered_second_moment: f64,
                ratio_log_t: f64,
                mc: Option<&'a haar::MomentEstimate>,
            }
            let out = Out {
                report: &report,
                centered_second_moment: centered.value,
                ratio_log_t: centered.ratio_log_t,
                mc: mc.as_ref(),
            };
            write_out(&cli.out, &serde_json::to_string_pretty(&out)?)?;
            Ok(0)
        }
        Command::VerifySeries { n, c, terms } => {
            let ns = parse_vec(n)?;
            #[derive(serde::Serialize)]
            struct Row {
                expansion: String,
                n: u64,
                truncated: f64,
                direct: f64,
                abs_diff: f64,
            }
            let mut rows = Vec::new();
            for which in ALL_EXPANSIONS {
                for &nf in &ns {
                    let spec = SeriesSpec { which, n: nf as u64, c: *c, terms: *terms };
                    let eval = series_eval(&spec)?;
                    rows.push(Row {
                        expansion: format!("{which:?}"),
                        n: nf as u64,
                        truncated: eval.truncated,
                        direct: eval.direct,
                        abs_diff: eval.abs_diff,
                    });
                }
            }
            let content = match format {
                ReportFormat::Json => serde_json::to_string_pretty(&rows)?,
                ReportFormat::Csv => {
                    let mut s = String::from("expansion,n,truncated,direct,abs_diff\n");
                    for r in rows {
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            r.expansion, r.n, r.truncated, r.direct, r.abs_diff
                        ));
                    }
                    s
                }
            };
            write_out(&cli.out, &content)?;
            Ok(0)
        }
        Command::PhiSum { n_max, per_decade } => {
            let table = TotientTable::new(*n_max);
            let mut checkpoints = Vec::new();
            let mut k = 0u32;
            loop {
                let v = (10f64.powf(1.0 + k as f64 / *per_decade as f64)).round() as u64;
                if v >= *n_max {
                    break;
                }
                checkpoints.push(v);
                k += 1;
            }
            checkpoints.push(*n_max);
            checkpoints.dedup();
            let sums = table.phi_ratio_partial_sums_at(&checkpoints);
            let mut s = String::from("N,sum,target,residual,envelope\n");
            for (i, &n) in checkpoints.iter().enumerate() {
                let target = n as f64 / zeta2();
                let residual = sums[i] - target;
                let ln = (n as f64).ln();
                let envelope = 10.0 * ln.powf(2.0 / 3.0) * ln.ln().max(1.0).powf(4.0 / 3.0);
                s.push_str(&format!("{},{},{},{},{}\n", n, sums[i], target, residual, envelope));
            }
            write_out(&cli.out, &s)?;
            Ok(0)
        }
        Command::Fit { epsilon } => {
            let config = load_config(cli)?;
            let result = run_sweep(&config)?;
            let scale = match config.kind {
                ExperimentKind::Spiral { .. } => EnvelopeScale::Ratio,
                _ => EnvelopeScale::CountPerLog,
            };
            let spec = EnvelopeSpec::gaposhkin(*epsilon, scale);
            let fit = fit_envelope(&result.averaged, &spec)?;
            let pass = fit.pass;
            write_out(&cli.out, &emit_report(&result.averaged, Some(&fit), format)?)?;
            eprintln!(
                "envelope C = {:.6}, per-decade = {:?}, pass = {}",
                fit.c, fit.per_decade, pass
            );
            Ok(if pass { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! `qrs`: reproducible runs of the code constructions, fraction estimates,
//! frontier sweeps and fault-injection checks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qrs_core::basis::{MappingSet, QuditBasis};
use qrs_core::failure::{total_failure, ProtocolParams};
use qrs_core::frontier::{crossover, curve, pareto};
use qrs_core::qrs::{binarize, build_qrs};
use qrs_core::tableau::FaultAlphabet;
use qrs_core::{FieldCtx, FieldElement};
use qrs_tools::config::{CodeSpec, RunConfig};
use qrs_tools::error::read_text;
use qrs_tools::faultsweep::{random_gammas, sweep_parallel as fault_sweep, transcript_jsonl};
use qrs_tools::fractions::{check_matrix, estimate_parallel, gather, points_key, to_csv, FractionCache, Sampling};
use qrs_tools::manifest::{write_atomic, FileRecord, RunManifest};
use qrs_tools::sweep::{breakdown_json, frontier_csv, parse_baseline, qualifying, sweep_parallel};
use qrs_tools::{Result, ToolError};
use serde_json::json;

/// Field size of the production codes.
const Q: u64 = 2048;

#[derive(Debug, Parser)]
#[command(name = "qrs", version, about = "Quantum Reed-Solomon code tooling")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Alphabet {
    Full,
    Elementary,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Binarize a code and print its X and Z stabilizer listings.
    Binarize {
        /// Code file (TOML: n, d, alpha or points, optional v).
        #[arg(long)]
        code: PathBuf,
        /// Basis file; defaults to the built-in self-dual GF(2048) basis.
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reference listing to compare against; a mismatch exits with 1.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Estimate syndrome-collision fractions for one (n, d, e).
    Fractions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        e: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Points file; defaults to the reference points for `n`.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the parameter grid and export every point with its failure terms.
    Frontier {
        /// Noise and grid configuration (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Baseline curve (CSV: ler,overhead); the crossover goes to the manifest.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Fraction-table cache directory.
        #[arg(long)]
        fractions: Option<PathBuf>,
        /// Sample missing fraction tables with this many samples.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every failure term of one parameter point as JSON.
    Breakdown {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "big-m")]
        big_m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inject every fault set into the cat-state preparation.
    Faultsweep {
        /// Cat size.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Verification rounds.
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Field size, a power of two.
        #[arg(long, default_value_t = 8)]
        q: u32,
        #[arg(long = "max-faults", default_value_t = 1)]
        max_faults: usize,
        #[arg(long, value_enum, default_value_t = Alphabet::Full)]
        alphabet: Alphabet,
        /// Comma-separated cat coefficients; random nonzero by default.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<u64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Counterexample transcript (JSON lines) on violation.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Write the primary output (or print it) and the manifest beside it (or
/// to stderr).
fn emit(out: Option<&Path>, text: &str, manifest: &mut RunManifest, start: Instant) -> Result<()> {
    match out {
        Some(p) => {
            write_atomic(p, text.as_bytes())?;
            manifest.outputs.push(FileRecord::of(p, text.as_bytes()));
            manifest.finish(start.elapsed());
            write_atomic(&RunManifest::path_for(p), manifest.to_json().as_bytes())
        }
        None => {
            print!("{text}");
            manifest.finish(start.elapsed());
            eprint!("{}", manifest.to_json());
            Ok(())
        }
    }
}

fn input(manifest: &mut RunManifest, path: &Path) -> Result<String> {
    let text = read_text(path)?;
    manifest.inputs.push(FileRecord::of(path, text.as_bytes()));
    Ok(text)
}

fn run(cli: Cli, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| ToolError::config(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Binarize { code, basis, out, check } => {
            let mut manifest = RunManifest::new("binarize", args);
            let (ctx, basis) = match &basis {
                Some(p) => QuditBasis::parse_file(&input(&mut manifest, p)?)
                    .map_err(|e| ToolError::config(format!("{}: {e}", p.display())))?,
                None => {
                    let ctx = FieldCtx::default();
                    let b = QuditBasis::default_self_dual(&ctx).expect("built-in basis");
                    (ctx, b)
                }
            };
            manifest.inputs.push(FileRecord::of(&code, read_text(&code)?.as_bytes()));
            let spec = CodeSpec::load(&ctx, &code)?;
            let qrs = build_qrs(&ctx, spec.n, spec.d, &spec.alpha, &spec.v).map_err(ToolError::config)?;
            let bin = binarize(&ctx, &qrs, &MappingSet::uniform(basis, spec.n)).map_err(ToolError::config)?;
            if !bin.is_orthogonal() {
                return Err(ToolError::Violation("binarized X and Z rows are not orthogonal".into()));
            }
            let text = format!("{}\n{}", bin.render_x(), bin.render_z());
            if let Some(reference) = &check {
                let want = input(&mut manifest, reference)?;
                if want != text {
                    let line = want.lines().zip(text.lines()).position(|(a, b)| a != b);
                    return Err(ToolError::Violation(format!(
                        "listing differs from {} (first differing line: {})",
                        reference.display(),
                        line.map_or("length".to_string(), |l| (l + 1).to_string())
                    )));
                }
                eprintln!("listing matches {}", reference.display());
            }
            emit(out.as_deref(), &text, &mut manifest, start)
        }
        Command::Fractions { n, d, e, samples, seed, points, out } => {
            let mut manifest = RunManifest::new("fractions", args);
            manifest.seeds.insert("root".into(), seed);
            let ctx = FieldCtx::default();
            let alpha = match &points {
                Some(p) => qrs_core::grs::parse_points_file(&ctx, &input(&mut manifest, p)?)
                    .map_err(|err| ToolError::config(format!("{}: {err}", p.display())))?,
                None => qrs_tools::fractions::production_points(&ctx, n)?,
            };
            if alpha.len() != n {
                return Err(ToolError::config(format!("{} points for n = {n}", alpha.len())));
            }
            if d < 2 || d > n || e == 0 || e > n {
                return Err(ToolError::config(format!("need 2 ≤ d ≤ n and 1 ≤ e ≤ n, got d = {d}, e = {e}")));
            }
            let table = estimate_parallel(&ctx, &check_matrix(&ctx, &alpha, d), d, e, samples, seed)?;
            manifest.results.insert("points_sha256".into(), json!(points_key(&ctx, &alpha)));
            manifest.results.insert("total_collision_fraction".into(), json!(table.total_collision_fraction()));
            manifest.results.insert("weighted_failure".into(), json!(table.weighted_failure()));
            emit(out.as_deref(), &to_csv(&table), &mut manifest, start)
        }
        Command::Frontier { config, baseline, fractions, samples, seed, out } => {
            let mut manifest = RunManifest::new("frontier", args);
            manifest.seeds.insert("fractions".into(), seed);
            let cfg = match &config {
                Some(p) => RunConfig::parse(&input(&mut manifest, p)?)
                    .map_err(|e| ToolError::config(format!("{}: {e}", p.display())))?,
                None => RunConfig::default(),
            };
            let base = match &baseline {
                Some(p) => Some(parse_baseline(&input(&mut manifest, p)?)
                    .map_err(|e| ToolError::config(format!("{}: {e}", p.display())))?),
                None => None,
            };
            let ctx = FieldCtx::default();
            let fr = match &fractions {
                Some(dir) => {
                    let sampling = samples.map(|samples| Sampling { samples, seed });
                    let (fr, files) = gather(&ctx, &FractionCache::new(dir), &cfg.grid.n, &cfg.grid.d, sampling)?;
                    for f in files {
                        manifest.inputs.push(FileRecord::of(&f, read_text(&f)?.as_bytes()));
                    }
                    fr
                }
                None if samples.is_some() => {
                    return Err(ToolError::config("--samples needs a --fractions cache directory"))
                }
                None => qrs_core::failure::CollisionFractions::analytic(),
            };
            let (points, skipped) = sweep_parallel(&cfg.grid, Q, &cfg.rates, &cfg.post_selection, &fr);
            for s in &skipped {
                eprintln!("skipped {:?}: {}", s.params, s.reason);
            }
            let front = pareto(&points);
            manifest.results.insert("points".into(), json!(points.len()));
            manifest.results.insert("skipped".into(), json!(skipped.len()));
            manifest.results.insert("pareto_points".into(), json!(front.len()));
            let teraquop = qualifying(&points, 500_000, 1e-13);
            manifest.results.insert("teraquop_points".into(), json!(teraquop.len()));
            if let Some(best) = teraquop.iter().min_by(|a, b| a.counts.physical.cmp(&b.counts.physical)) {
                let p = best.params;
                manifest.results.insert(
                    "teraquop_smallest".into(),
                    json!({ "n": p.n, "m": p.m, "d": p.d, "M": p.big_m, "R": p.r,
                            "physical": best.counts.physical, "ler_per_lqr": best.ler() }),
                );
            }
            if let Some(b) = &base {
                let x = crossover(&curve(&front), b).map_err(ToolError::config)?;
                manifest.results.insert("crossover_ler".into(), json!(x));
            }
            emit(out.as_deref(), &frontier_csv(&points, &front, &cfg.rates), &mut manifest, start)
        }
        Command::Breakdown { config, n, m, d, big_m, r, out } => {
            let mut manifest = RunManifest::new("breakdown", args);
            let cfg = match &config {
                Some(p) => RunConfig::parse(&input(&mut manifest, p)?)
                    .map_err(|e| ToolError::config(format!("{}: {e}", p.display())))?,
                None => RunConfig::default(),
            };
            let params = ProtocolParams { n, m, d, big_m, r };
            let fr = qrs_core::failure::CollisionFractions::analytic();
            let b = total_failure(&params, Q, &cfg.rates, &cfg.post_selection, &fr).map_err(ToolError::config)?;
            let mut text = serde_json::to_string_pretty(&breakdown_json(&params, Q, &b)).expect("JSON");
            text.push('\n');
            emit(out.as_deref(), &text, &mut manifest, start)
        }
        Command::Faultsweep { n, rounds, q, max_faults, alphabet, gammas, seed, out } => {
            let mut manifest = RunManifest::new("faultsweep", args);
            manifest.seeds.insert("root".into(), seed);
            if !q.is_power_of_two() || !(2..=1 << 16).contains(&q) {
                return Err(ToolError::config(format!("q must be a power of two in 2..=65536, got {q}")));
            }
            let ctx = FieldCtx::with_degree(q.trailing_zeros()).map_err(ToolError::config)?;
            let gammas: Vec<FieldElement> = match gammas {
                Some(g) => g.iter().map(|&x| ctx.elem(x).map_err(ToolError::config)).collect::<Result<_>>()?,
                None => random_gammas(&ctx, n, seed),
            };
            if gammas.len() != n || n < 2 {
                return Err(ToolError::config(format!("need n ≥ 2 coefficients, got {}", gammas.len())));
            }
            let alphabet = match alphabet {
                Alphabet::Full => FaultAlphabet::Full,
                Alphabet::Elementary => FaultAlphabet::Elementary,
            };
            let (clean, report) = fault_sweep(&ctx, &gammas, rounds, max_faults, alphabet, seed)?;
            let clean_ok = clean.accepted && clean.residual.as_ref().is_some_and(|r| r.x_weight == 0);
            manifest.results.insert(
                "gammas".into(),
                json!(gammas.iter().map(|&g| ctx.render_element(g)).collect::<Vec<_>>()),
            );
            manifest.results.insert("runs".into(), json!(report.runs));
            manifest.results.insert("accepted".into(), json!(report.accepted));
            manifest.results.insert("violations".into(), json!(report.violations.len()));
            println!(
                "fault sets: {}  accepted: {}  violations: {}",
                report.runs,
                report.accepted,
                report.violations.len()
            );
            if !clean_ok {
                return Err(ToolError::Violation("faultless preparation did not yield a clean cat".into()));
            }
            let Some((faults, outcome)) = report.violations.first() else {
                manifest.finish(start.elapsed());
                eprint!("{}", manifest.to_json());
                return Ok(());
            };
            let text = transcript_jsonl(&ctx, faults, outcome);
            emit(out.as_deref(), &text, &mut manifest, start)?;
            Err(ToolError::Violation(format!(
                "{} fault set(s) accepted with excess residual error",
                report.violations.len()
            )))
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

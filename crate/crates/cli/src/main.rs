//! `l3c`: solve, check and generate LIST-3-COLOURING instances.
//!
//! Exit codes: 0 YES (or success), 1 NO (or failed verification),
//! 2 usage or parse error, 3 indeterminate or internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use l3c::branch::{solve, Answer, BranchConfig, DiameterPolicy};
use l3c::gen::{derive_seed, generate, GenFamily, GenSpec, ListProfile};
use l3c::io::{parse_certificate, parse_instance, write_instance, write_solution};
use l3c::lab::run_lab;
use l3c::oracle::brute_force;
use l3c::par::Mode;
use l3c::reduce::RuleId;
use l3c::report::RunReport;
use l3c::scaling::{format_table, scaling_sweep};
use l3c::{Error, Instance};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "l3c", version, about = "LIST-3-COLOURING on graphs of diameter at most three")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Strict,
    Fallback,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.02)]
    epsilon: f64,
    #[arg(long, default_value_t = 12)]
    r4_cutoff: usize,
    #[arg(long, default_value_t = 1.0)]
    threshold_scale: f64,
    #[arg(long, value_enum, default_value_t = Policy::Strict)]
    diameter_policy: Policy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for child exploration.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 20_000)]
    b5_pair_budget: u64,
    /// Skip the per-branch invariant checks.
    #[arg(long)]
    no_invariants: bool,
}

impl SolverArgs {
    fn config(&self) -> BranchConfig {
        BranchConfig {
            epsilon: self.epsilon,
            r4_cutoff: self.r4_cutoff,
            threshold_scale: self.threshold_scale,
            diameter_policy: match self.diameter_policy {
                Policy::Strict => DiameterPolicy::Strict,
                Policy::Fallback => DiameterPolicy::Fallback,
            },
            rng_seed: self.seed,
            b5_pair_budget: self.b5_pair_budget,
            jobs: self.jobs,
            check_invariants: !self.no_invariants,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    RandomDiam3,
    Planted,
    GadgetB1,
    GadgetB2,
    GadgetB3,
    GadgetB4,
    GadgetB5,
    Magic,
}

impl Family {
    fn gen_family(self) -> GenFamily {
        match self {
            Family::RandomDiam3 => GenFamily::RandomDiam3,
            Family::Planted => GenFamily::Planted3colDiam3,
            Family::GadgetB1 => GenFamily::RuleGadget(RuleId::B1),
            Family::GadgetB2 => GenFamily::RuleGadget(RuleId::B2),
            Family::GadgetB3 => GenFamily::RuleGadget(RuleId::B3),
            Family::GadgetB4 => GenFamily::RuleGadget(RuleId::B4),
            Family::GadgetB5 => GenFamily::RuleGadget(RuleId::B5),
            Family::Magic => GenFamily::MagicPrecond,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the branch-and-reduce solver.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the structured JSON report here.
        #[arg(long)]
        stats_out: Option<PathBuf>,
        /// Check the certificate against the instance before printing it.
        #[arg(long)]
        verify_certificate: bool,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        report_timings: bool,
    },
    /// Run the brute-force oracle.
    Oracle {
        instance: PathBuf,
        /// Give up after this many search nodes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Generate instances.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Vertex count, or |L3| for gadgets and magic graphs.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0.0)]
        p1: f64,
        #[arg(long, default_value_t = 0.0)]
        p2: f64,
        #[arg(long, default_value_t = 1.0)]
        p3: f64,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        /// Write `<family>-<n>-<i>.l3c` files here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Monte-Carlo report on the structural lemma behind B5.
    LemmaLab {
        #[arg(long, value_delimiter = ',', default_values_t = [60usize, 120, 240])]
        mu: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Node counts on planted YES families.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [20usize, 30, 40, 60, 80])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        per_size: usize,
        // --seed also seeds the generated corpus
        #[command(flatten)]
        solver: SolverArgs,
        /// Print JSON rows instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Check a certificate file against an instance.
    Verify { instance: PathBuf, certificate: PathBuf },
}

/// An error with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::DiameterTooLarge { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidGenParams(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(EXIT_INTERNAL, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve { instance, solver, stats_out, verify_certificate, report_timings } => {
            let inst = load(&instance)?;
            let cfg = solver.config();
            let start = Instant::now();
            let result = solve(&inst, &cfg);
            let (answer, mut stats) = match result {
                Ok(r) => r,
                Err(e) => {
                    if let Some(p) = &stats_out {
                        write(p, &RunReport::from_error(Some(&inst), &cfg, &e).to_json())?;
                    }
                    return Err(e.into());
                }
            };
            stats.wall_time_secs = start.elapsed().as_secs_f64();
            let report = RunReport::from_run(&inst, &cfg, &answer, &stats, report_timings);
            if let Some(p) = &stats_out {
                write(p, &report.to_json())?;
            }
            eprint!("{}", report.summary());
            match &answer {
                Answer::Yes(c) => {
                    if verify_certificate {
                        if let Err(v) = inst.check_coloring(c) {
                            return Err(Failure(EXIT_INTERNAL, format!("certificate failed verification: {v}")));
                        }
                        eprintln!("certificate verified");
                    }
                    print!("{}", write_solution(Some(c)));
                    Ok(EXIT_YES)
                }
                Answer::No => {
                    print!("{}", write_solution(None));
                    Ok(EXIT_NO)
                }
            }
        }
        Command::Oracle { instance, budget } => {
            let inst = load(&instance)?;
            let r = brute_force(&inst, budget)?;
            eprintln!("oracle: {} nodes", r.nodes_explored);
            print!("{}", write_solution(r.certificate.as_ref()));
            Ok(if r.feasible { EXIT_YES } else { EXIT_NO })
        }
        Command::Gen { family, n, seed, count, p1, p2, p3, epsilon, out_dir } => {
            let list_profile = ListProfile::new(p1, p2, p3)?;
            for i in 0..count {
                let item_seed = if count == 1 { seed } else { derive_seed(seed, i as u64) };
                let spec = GenSpec { n, seed: item_seed, family: family.gen_family(), list_profile, epsilon };
                let inst = generate(&spec)?;
                let text = format!("c family {:?} n {n} seed {item_seed}\n{}", spec.family, write_instance(&inst)?);
                match &out_dir {
                    Some(dir) => {
                        fs::create_dir_all(dir).map_err(|e| Failure(EXIT_INTERNAL, format!("{}: {e}", dir.display())))?;
                        let name = format!("{}-{n}-{i}.l3c", family.to_possible_value().unwrap().get_name());
                        write(&dir.join(name), &text)?;
                    }
                    None => print!("{text}"),
                }
            }
            Ok(EXIT_YES)
        }
        Command::LemmaLab { mu, trials, epsilon, seed, jobs, out } => {
            let mode = Mode::from_jobs(jobs);
            let reports = mu
                .iter()
                .map(|&m| run_lab(m, trials, epsilon, derive_seed(seed, m as u64), mode))
                .collect::<Result<Vec<_>, _>>()?;
            for r in &reports {
                eprintln!(
                    "mu={} |V'|={} mean|S|={:.2} (expected {:.2}, se {:.3}) outcome2={:.3} dichotomy={:.3} violations={}",
                    r.mu, r.v_prime_size, r.mean_s, r.expected_s, r.se_s, r.outcome2_rate, r.dichotomy_rate, r.structural_violations
                );
            }
            let text = serde_json::to_string_pretty(&reports).expect("report serializes") + "\n";
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            let bad = reports.iter().any(|r| r.structural_violations > 0);
            Ok(if bad { EXIT_NO } else { EXIT_YES })
        }
        Command::Bench { sizes, per_size, solver, json } => {
            let rows = scaling_sweep(&sizes, per_size, solver.seed, &solver.config())?;
            if json {
                print!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n");
            } else {
                print!("{}", format_table(&rows));
            }
            Ok(EXIT_YES)
        }
        Command::Verify { instance, certificate } => {
            let inst = load(&instance)?;
            let cert = parse_certificate(&read(&certificate)?, inst.vertex_count())
                .map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", certificate.display())))?;
            match inst.check_coloring(&cert) {
                Ok(()) => {
                    println!("valid");
                    Ok(EXIT_YES)
                }
                Err(v) => {
                    println!("invalid: {v}");
                    Ok(EXIT_NO)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stackmonoid::bbox::{bbox_pipeline, pram_bbox};
use stackmonoid::executor::{Executor, PartitionConfig, THREADS_ENV};
use stackmonoid::frontend::{
    bench, medians, parse_scene, serialize_scene, throughput_ratios, verify, write_bbox_csv,
    write_bench_csv, write_matches, gen_random, BenchAlgo, BenchConfig, ParsedScene,
};
use stackmonoid::matching::{parenmatch, Algo};
use stackmonoid::Result;

#[derive(Parser)]
#[command(name = "stackmatch", version, about = "Parallel parentheses matching and scene bounding boxes")]
struct Cli {
    /// Executor threads; defaults to $STACKMONOID_THREADS, then all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Check every dispatch for shared and global write conflicts.
    #[arg(long, global = true)]
    validate: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Shape {
    /// Workgroup size.
    #[arg(long = "wg", default_value_t = 256)]
    w: usize,
    /// Elements per lane.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

impl Shape {
    fn cfg(self) -> Result<PartitionConfig> {
        PartitionConfig::new(self.w, self.k)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a random underflow-free input.
    Gen {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random clips, blends and leaves instead of bare parens.
        #[arg(long)]
        scene: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Match every element to its enclosing or matching open.
    Match {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "we")]
        algo: Algo,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        out: PathBuf,
    },
    /// Clipped boxes and blend unions as CSV.
    Bbox {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare against the sequential oracles; exit status 1 on mismatch.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "we")]
        algo: Algo,
        /// Every algorithm on several configurations.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        shape: Shape,
    },
    /// Time algorithms on random inputs and write CSV.
    Bench {
        #[arg(long, default_value_t = 10)]
        min_log: u32,
        #[arg(long, default_value_t = 20)]
        max_log: u32,
        /// Comma-separated: core, simple, we, seq, bbox, seq-bbox.
        #[arg(long, default_value = "core,simple,we,seq", value_delimiter = ',')]
        algos: Vec<BenchAlgo>,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 5)]
        trials: u32,
        #[arg(long = "wg", default_value_t = 256)]
        w: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn read_scene(path: &Path) -> Result<ParsedScene> {
    parse_scene(&fs::read_to_string(path)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = match cli.threads {
        Some(t) => Executor::new(t),
        None => Executor::from_env(),
    }
    .validating(cli.validate);

    match cli.command {
        Command::Gen { size, seed, scene, out } => {
            let seq = gen_random(size, seed, scene);
            fs::write(&out, serialize_scene(&seq))?;
            eprintln!("wrote {size} elements, max depth {}", seq.max_depth());
        }
        Command::Match { input, algo, shape, out } => {
            let scene = read_scene(&input)?;
            let run = parenmatch(&exec, &scene.seq, shape.cfg()?, algo)?;
            let mut w = create(&out)?;
            write_matches(&mut w, &run.out)?;
            w.flush()?;
            eprintln!(
                "{algo}: {} elements, {} dispatches, max {} probes",
                scene.seq.len(),
                run.stats.dispatches,
                run.stats.max_probes
            );
        }
        Command::Bbox { input, shape, out } => {
            let scene = read_scene(&input)?;
            let cfg = shape.cfg()?;
            let run = if scene.seq.len() <= cfg.two_dispatch_limit() {
                bbox_pipeline(&exec, &scene.seq, cfg)?
            } else {
                eprintln!("input exceeds the two-dispatch limit of {cfg}, using link doubling");
                pram_bbox(&exec, &scene.seq, cfg)?
            };
            let mut w = create(&out)?;
            write_bbox_csv(&mut w, &scene.seq, &run.result)?;
            w.flush()?;
        }
        Command::Verify { input, algo, all, shape } => {
            let scene = read_scene(&input)?;
            let n = scene.seq.len();
            let runs: Vec<(Algo, PartitionConfig)> = if all {
                let mut runs = Vec::new();
                for algo in Algo::ALL {
                    for (w, k) in [(2, 1), (16, 1), (256, 1), (4, 4), (64, 2), (256, 8)] {
                        let cfg = PartitionConfig::new(w, k)?;
                        if algo.supports(n, cfg) {
                            runs.push((algo, cfg));
                        }
                    }
                }
                runs
            } else {
                vec![(algo, shape.cfg()?)]
            };
            let mut ok = true;
            for (algo, cfg) in runs {
                let v = verify(&exec, &scene.seq, cfg, algo)?;
                println!(
                    "{} {algo} {cfg}: matches {}, bbox {}",
                    if v.passed() { "PASS" } else { "FAIL" },
                    if v.matches_ok { "ok" } else { "differ" },
                    if v.bbox_ok { "ok" } else { "differ" },
                );
                ok &= v.passed();
            }
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Bench { min_log, max_log, algos, csv, trials, w, k, seed } => {
            let bc = BenchConfig {
                min_log,
                max_log,
                algos,
                trials,
                w,
                k,
                seed,
                ..BenchConfig::default()
            };
            eprintln!("{} threads (set --threads or {THREADS_ENV})", exec.threads());
            let rows = bench(&exec, &bc, |_| {})?;
            let mut out = create(&csv)?;
            write_bench_csv(&mut out, &rows)?;
            out.flush()?;
            let summary = medians(&rows);
            println!("{:<9} {:>9} {:>5} {:>3} {:>13} {:>14}", "algo", "n", "w", "k", "median_ns", "elems/s");
            for s in &summary {
                println!(
                    "{:<9} {:>9} {:>5} {:>3} {:>13} {:>14.0}",
                    s.algo, s.n, s.w, s.k, s.median_ns, s.elems_per_sec
                );
            }
            for algo in ["core", "simple", "we"] {
                for (n, r) in throughput_ratios(&summary, algo, "seq") {
                    println!("{algo} / seq at n={n}: {r:.3}");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bbox::bbox_pipeline;
use crate::error::{Error, Result};
use crate::executor::{Executor, PartitionConfig};
use crate::matching::{parenmatch, Algo};
use crate::oracle::{seq_bbox, seq_parenmatch};

use super::gen_random;

/// Something the bench harness can time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchAlgo {
    Match(Algo),
    /// Sequential matcher.
    Seq,
    /// Partitioned bounding-box passes.
    BBox,
    /// Sequential bounding boxes.
    SeqBBox,
}

impl BenchAlgo {
    pub fn name(self) -> &'static str {
        match self {
            BenchAlgo::Match(a) => a.name(),
            BenchAlgo::Seq => "seq",
            BenchAlgo::BBox => "bbox",
            BenchAlgo::SeqBBox => "seq-bbox",
        }
    }

    fn is_sequential(self) -> bool {
        matches!(self, BenchAlgo::Seq | BenchAlgo::SeqBBox)
    }

    fn scene(self) -> bool {
        matches!(self, BenchAlgo::BBox | BenchAlgo::SeqBBox)
    }

    /// Configuration actually used for `(w, k)`; the simple matcher always
    /// runs with one element per lane.
    fn config(self, w: usize, k: usize) -> Result<PartitionConfig> {
        match self {
            BenchAlgo::Match(Algo::Simple) => PartitionConfig::new(w, 1),
            _ => PartitionConfig::new(w, k),
        }
    }

    fn supports(self, n: usize, cfg: PartitionConfig) -> bool {
        match self {
            BenchAlgo::Match(a) => a.supports(n, cfg),
            BenchAlgo::BBox => n <= cfg.two_dispatch_limit(),
            BenchAlgo::Seq | BenchAlgo::SeqBBox => true,
        }
    }
}

impl fmt::Display for BenchAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" => Ok(BenchAlgo::Seq),
            "bbox" => Ok(BenchAlgo::BBox),
            "seq-bbox" => Ok(BenchAlgo::SeqBBox),
            other => other.parse().map(BenchAlgo::Match).map_err(|_| {
                Error::Config(format!(
                    "unknown bench algorithm `{other}` (expected core, simple, we, seq, bbox or seq-bbox)"
                ))
            }),
        }
    }
}

/// One timed run. Sequential rows report `w = k = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algo: String,
    pub n: usize,
    pub w: usize,
    pub k: usize,
    pub trial: u32,
    pub elapsed_ns: u64,
    pub elems_per_sec: f64,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub min_log: u32,
    pub max_log: u32,
    pub algos: Vec<BenchAlgo>,
    pub trials: u32,
    pub warmups: u32,
    pub w: usize,
    pub k: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            min_log: 10,
            max_log: 20,
            algos: vec![
                BenchAlgo::Match(Algo::Core),
                BenchAlgo::Match(Algo::Simple),
                BenchAlgo::Match(Algo::WorkEfficient),
                BenchAlgo::Seq,
            ],
            trials: 5,
            warmups: 2,
            w: 256,
            k: 4,
            seed: 1,
        }
    }
}

/// Minimum number of timed trials per point.
pub const MIN_TRIALS: u32 = 5;

/// Times every algorithm on one random input per size `2^min_log ..=
/// 2^max_log`. Only the algorithm call is timed, not input generation.
/// Combinations over the two-dispatch limit are skipped. `on_row` sees each
/// row as it is produced.
pub fn bench(exec: &Executor, bc: &BenchConfig, mut on_row: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>> {
    if bc.trials < MIN_TRIALS {
        return Err(Error::Config(format!(
            "at least {MIN_TRIALS} trials are needed, got {}",
            bc.trials
        )));
    }
    if bc.min_log > bc.max_log || bc.max_log > 28 {
        return Err(Error::Config(format!(
            "bad size range 2^{}..2^{}",
            bc.min_log, bc.max_log
        )));
    }
    let mut rows = Vec::new();
    for log in bc.min_log..=bc.max_log {
        let n = 1usize << log;
        let plain = gen_random(n, bc.seed, false);
        let scene = gen_random(n, bc.seed, true);
        for &algo in &bc.algos {
            let cfg = algo.config(bc.w, bc.k)?;
            if !algo.supports(n, cfg) {
                continue;
            }
            let elems = if algo.scene() { &scene } else { &plain };
            let run = || -> Result<()> {
                match algo {
                    BenchAlgo::Match(a) => drop(parenmatch(exec, elems, cfg, a)?),
                    BenchAlgo::Seq => drop(seq_parenmatch(elems)?),
                    BenchAlgo::BBox => drop(bbox_pipeline(exec, elems, cfg)?),
                    BenchAlgo::SeqBBox => drop(seq_bbox(elems)?),
                }
                Ok(())
            };
            for _ in 0..bc.warmups {
                run()?;
            }
            for trial in 0..bc.trials {
                let start = Instant::now();
                run()?;
                let ns = start.elapsed().as_nanos().max(1) as u64;
                let (w, k) = if algo.is_sequential() { (0, 0) } else { (cfg.w(), cfg.k()) };
                let row = BenchRow {
                    algo: algo.name().to_string(),
                    n,
                    w,
                    k,
                    trial,
                    elapsed_ns: ns,
                    elems_per_sec: n as f64 * 1e9 / ns as f64,
                };
                on_row(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Median over the trials of one `(algo, n, w, k)` point.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub algo: String,
    pub n: usize,
    pub w: usize,
    pub k: usize,
    pub median_ns: u64,
    pub elems_per_sec: f64,
}

pub fn medians(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut out: Vec<BenchSummary> = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let key = (&rows[i].algo, rows[i].n, rows[i].w, rows[i].k);
        let mut j = i;
        let mut times = Vec::new();
        while j < rows.len() && (&rows[j].algo, rows[j].n, rows[j].w, rows[j].k) == key {
            times.push(rows[j].elapsed_ns);
            j += 1;
        }
        times.sort_unstable();
        let median_ns = times[times.len() / 2];
        out.push(BenchSummary {
            algo: key.0.clone(),
            n: key.1,
            w: key.2,
            k: key.3,
            median_ns,
            elems_per_sec: key.1 as f64 * 1e9 / median_ns as f64,
        });
        i = j;
    }
    out
}

/// Median throughput of `algo` over that of `baseline` at each size both
/// were run at.
pub fn throughput_ratios(summary: &[BenchSummary], algo: &str, baseline: &str) -> Vec<(usize, f64)> {
    summary
        .iter()
        .filter(|s| s.algo == algo)
        .filter_map(|s| {
            let b = summary.iter().find(|b| b.algo == baseline && b.n == s.n)?;
            Some((s.n, s.elems_per_sec / b.elems_per_sec))
        })
        .collect()
}

pub fn write_bench_csv(out: impl Write, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run() {
        let exec = Executor::new(1);
        let bc = BenchConfig {
            min_log: 4,
            max_log: 6,
            algos: vec![BenchAlgo::Match(Algo::Simple), BenchAlgo::Seq, BenchAlgo::BBox],
            w: 4,
            k: 2,
            ..BenchConfig::default()
        };
        let rows = bench(&exec, &bc, |_| {}).unwrap();
        // simple needs n <= 16 at w=4, bbox n <= 64.
        assert_eq!(rows.iter().filter(|r| r.algo == "simple").count(), 5);
        assert_eq!(rows.iter().filter(|r| r.algo == "seq").count(), 15);
        assert_eq!(rows.iter().filter(|r| r.algo == "bbox").count(), 15);
        let m = medians(&rows);
        assert_eq!(m.len(), 7);
        assert_eq!(throughput_ratios(&m, "simple", "seq").len(), 1);
        let mut buf = Vec::new();
        write_bench_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("algo,n,w,k,trial,elapsed_ns,elems_per_sec\n"));
    }

    #[test]
    fn rejects_bad_settings() {
        let exec = Executor::new(1);
        let bc = BenchConfig { trials: 3, ..BenchConfig::default() };
        assert!(bench(&exec, &bc, |_| {}).is_err());
        assert!("bogus".parse::<BenchAlgo>().is_err());
        assert_eq!("seq-bbox".parse::<BenchAlgo>().unwrap(), BenchAlgo::SeqBBox);
        assert_eq!("we".parse::<BenchAlgo>().unwrap(), BenchAlgo::Match(Algo::WorkEfficient));
    }
}

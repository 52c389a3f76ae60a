//! A short benchmark run printed as CSV.

use stackmonoid::executor::Executor;
use stackmonoid::frontend::{bench, medians, write_bench_csv, BenchConfig};

fn main() -> stackmonoid::Result<()> {
    let bc = BenchConfig { min_log: 10, max_log: 14, ..BenchConfig::default() };
    let exec = Executor::from_env();
    let rows = bench(&exec, &bc, |_| {})?;
    write_bench_csv(std::io::stdout().lock(), &rows)?;
    for s in medians(&rows) {
        eprintln!("{:<7} n={:<6} {:>12.0} elems/s", s.algo, s.n, s.elems_per_sec);
    }
    Ok(())
}

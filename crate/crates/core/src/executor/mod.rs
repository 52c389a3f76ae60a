//! Deterministic data-parallel executor shaped like a GPU.
//!
//! A *dispatch* runs a grid of independent workgroups. A workgroup is `w`
//! logical lanes that share scratch arrays ([`SharedArray`]) and advance in
//! lock-step through *steps*; the end of each step is a barrier. Data moves
//! between workgroups only through global buffers, and only between
//! dispatches.
//!
//! Shared writes are deferred to the barrier, so the lanes of one step can run
//! in any order without changing the result. Workgroups are distributed over
//! a pool of OS threads; outputs are collected in workgroup order, which makes
//! every dispatch bit-identical across physical thread counts.
//!
//! With validation on, every barrier also checks that no two lanes wrote the
//! same location in the same step, and global write logs are checked for
//! locations written by more than one lane.

mod scan;
mod shared;
mod tree;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

pub use scan::{wg_chunked_scan, wg_scan, Direction};
#[doc(hidden)]
pub use shared::CommitCtx;
pub use shared::{Commit, GlobalWrites, Lane, Registers, SharedArray};
pub use tree::{level_offset, tree_dispatch, wg_tree_build, ReductionTree, SharedTree, TreeView};

/// Environment variable holding the physical thread count.
pub const THREADS_ENV: &str = "STACKMONOID_THREADS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("kernel `{kernel}` workgroup {workgroup} step {step}: lanes {first} and {second} both wrote `{buffer}`[{location}]")]
    SharedConflict {
        kernel: &'static str,
        workgroup: usize,
        step: u32,
        buffer: &'static str,
        location: usize,
        first: usize,
        second: usize,
    },

    #[error("global `{buffer}`[{location}] written by workgroup {first_workgroup} lane {first_lane} and workgroup {second_workgroup} lane {second_lane}")]
    GlobalConflict {
        buffer: &'static str,
        location: usize,
        first_workgroup: usize,
        first_lane: usize,
        second_workgroup: usize,
        second_lane: usize,
    },

    #[error("kernel `{kernel}` workgroup {workgroup} step {step}: write to `{buffer}`[{location}] out of bounds (len {len})")]
    OutOfBounds {
        kernel: &'static str,
        workgroup: usize,
        step: u32,
        buffer: &'static str,
        location: usize,
        len: usize,
    },

    #[error("kernel `{kernel}` workgroup {workgroup}: write to `{buffer}` issued in step {issued} reached the barrier of step {step}")]
    StrayWrite {
        kernel: &'static str,
        workgroup: usize,
        buffer: &'static str,
        issued: u32,
        step: u32,
    },

    #[error("dispatch grid must contain at least one workgroup")]
    EmptyGrid,
}

/// Workgroup size `w` and elements per lane `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionConfig {
    w: usize,
    k: usize,
}

impl PartitionConfig {
    pub const MAX_W: usize = 1024;
    pub const MAX_K: usize = 32;

    pub fn new(w: usize, k: usize) -> Result<Self, crate::Error> {
        if !w.is_power_of_two() || !(2..=Self::MAX_W).contains(&w) {
            return Err(crate::Error::Config(format!(
                "workgroup size {w} must be a power of two in 2..={}",
                Self::MAX_W
            )));
        }
        if !k.is_power_of_two() || k > Self::MAX_K {
            return Err(crate::Error::Config(format!(
                "elements per lane {k} must be a power of two in 1..={}",
                Self::MAX_K
            )));
        }
        Ok(PartitionConfig { w, k })
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Elements covered by one workgroup, `w·k`.
    pub fn partition_size(&self) -> usize {
        self.w * self.k
    }

    /// Largest input two dispatches can handle, `(w·k)²`.
    pub fn two_dispatch_limit(&self) -> usize {
        self.partition_size() * self.partition_size()
    }

    pub fn grid_for(&self, n: usize) -> usize {
        n.div_ceil(self.partition_size()).max(1)
    }
}

impl fmt::Display for PartitionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w={}, k={}", self.w, self.k)
    }
}

/// Per-workgroup execution context handed to [`Kernel::run`].
pub struct Workgroup {
    kernel: &'static str,
    id: usize,
    cfg: PartitionConfig,
    validate: bool,
    step: u32,
}

impl Workgroup {
    fn new(kernel: &'static str, id: usize, cfg: PartitionConfig, validate: bool) -> Self {
        Workgroup {
            kernel,
            id,
            cfg,
            validate,
            step: 0,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    /// Number of lanes, `w`.
    pub fn size(&self) -> usize {
        self.cfg.w
    }

    pub fn k(&self) -> usize {
        self.cfg.k
    }

    pub fn cfg(&self) -> PartitionConfig {
        self.cfg
    }

    pub fn steps_run(&self) -> u32 {
        self.step
    }

    /// Declares a shared scratch array.
    pub fn shared<T: Copy>(&self, name: &'static str, len: usize, init: T) -> SharedArray<T> {
        SharedArray::new(name, len, init, self.validate)
    }

    /// Runs `f` once per lane, then commits `mem` at the barrier.
    ///
    /// Arrays that are only read may be captured by the closure; arrays
    /// written in the step must be passed as `mem`.
    pub fn step<S: Commit + ?Sized>(
        &mut self,
        mem: &mut S,
        mut f: impl FnMut(Lane, &S),
    ) -> Result<(), ExecError> {
        for lane in 0..self.cfg.w {
            f(Lane::new(lane, self.step), mem);
        }
        let ctx = CommitCtx {
            kernel: self.kernel,
            workgroup: self.id,
            step: self.step,
            validate: self.validate,
        };
        self.step += 1;
        mem.commit(&ctx)
    }
}

/// A compute kernel: the program every workgroup of a dispatch runs.
pub trait Kernel: Sync {
    type Output: Send;

    fn name(&self) -> &'static str;

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError>;
}

/// Runs dispatches over a fixed pool of OS threads.
#[derive(Clone)]
pub struct Executor {
    threads: usize,
    validate: bool,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl fmt::Debug for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Executor")
            .field("threads", &self.threads)
            .field("validate", &self.validate)
            .finish()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Executor::new(1)
    }
}

impl Executor {
    pub fn new(threads: usize) -> Self {
        let threads = threads.max(1);
        let pool = (threads > 1).then(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(|i| format!("stackmonoid-{i}"))
                    .build()
                    .expect("failed to start executor threads"),
            )
        });
        Executor {
            threads,
            validate: false,
            pool,
        }
    }

    /// Thread count from `STACKMONOID_THREADS`, else the available
    /// parallelism.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or_else(max_threads);
        Executor::new(threads)
    }

    pub fn validating(mut self, on: bool) -> Self {
        self.validate = on;
        self
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn validates(&self) -> bool {
        self.validate
    }

    /// Runs `grid` workgroups of `kernel` and returns their outputs in
    /// workgroup order.
    pub fn dispatch<K: Kernel>(
        &self,
        grid: usize,
        cfg: PartitionConfig,
        kernel: &K,
    ) -> Result<Vec<K::Output>, ExecError> {
        if grid == 0 {
            return Err(ExecError::EmptyGrid);
        }
        let run = |id: usize| {
            let mut wg = Workgroup::new(kernel.name(), id, cfg, self.validate);
            kernel.run(&mut wg)
        };
        let results: Vec<Result<K::Output, ExecError>> = match &self.pool {
            Some(pool) if grid > 1 => pool.install(|| (0..grid).into_par_iter().map(run).collect()),
            _ => (0..grid).map(run).collect(),
        };
        results.into_iter().collect()
    }

    /// Applies global write logs to `buf` in workgroup order.
    pub fn apply<T>(
        &self,
        buf: &mut [T],
        logs: impl IntoIterator<Item = GlobalWrites<T>>,
    ) -> Result<(), ExecError> {
        // (workgroup, lane) + 1 of the first writer of each location
        let mut owner: Vec<(u32, u32)> = if self.validate {
            vec![(0, 0); buf.len()]
        } else {
            Vec::new()
        };
        for log in logs {
            let name = log.name();
            let wg = log.workgroup();
            for (index, lane, value) in log.into_log() {
                if self.validate {
                    let Some(slot) = owner.get_mut(index) else {
                        return Err(ExecError::OutOfBounds {
                            kernel: name,
                            workgroup: wg,
                            step: 0,
                            buffer: name,
                            location: index,
                            len: buf.len(),
                        });
                    };
                    let me = (wg as u32 + 1, lane + 1);
                    if slot.0 != 0 && *slot != me {
                        return Err(ExecError::GlobalConflict {
                            buffer: name,
                            location: index,
                            first_workgroup: slot.0 as usize - 1,
                            first_lane: slot.1 as usize - 1,
                            second_workgroup: wg,
                            second_lane: lane as usize,
                        });
                    }
                    *slot = me;
                }
                buf[index] = value;
            }
        }
        Ok(())
    }
}

pub fn max_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

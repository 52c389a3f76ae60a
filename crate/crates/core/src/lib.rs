//! Parallel parentheses matching and scene bounding boxes.
//!
//! Opens and closes are reduced with the bicyclic semigroup ([`monoid::Bic`])
//! and the stack monoid ([`monoid::StackMonoid`]). Every parallel algorithm
//! runs on [`executor::Executor`], a deterministic model of GPU workgroups
//! with barrier-synchronized shared memory.
//!
//! - [`matching`]: three matchers (pointer-jumping, two-dispatch with
//!   `k = 1`, and the chunked two-dispatch form).
//! - [`bbox`]: clip intersections down the tree and blend unions up it.
//! - [`oracle`]: sequential references for everything above.
//! - [`frontend`]: the scene format, generators, pipeline and benchmarks.
//!
//! ```
//! use stackmonoid::executor::{Executor, PartitionConfig};
//! use stackmonoid::matching::{parenmatch, Algo};
//! use stackmonoid::oracle::ParenSeq;
//!
//! let seq = ParenSeq::from_parens("(()())").unwrap();
//! let cfg = PartitionConfig::new(2, 2).unwrap();
//! let run = parenmatch(&Executor::default(), &seq, cfg, Algo::WorkEfficient).unwrap();
//! assert_eq!(run.out.as_slice(), [-1, 0, 1, 0, 3, 0]);
//! ```

pub mod bbox;
pub mod error;
pub mod executor;
pub mod frontend;
pub mod matching;
pub mod monoid;
pub mod oracle;

pub use error::{Error, Result};

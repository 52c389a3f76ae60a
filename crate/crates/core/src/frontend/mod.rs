//! Scene files, structural compaction, random inputs, the end-to-end
//! pipeline and benchmarking.
//!
//! A scene file has one record per line:
//!
//! ```text
//! # comment
//! clip 0 0 100 100
//! blend
//! leaf 10 10 20 20
//! draw anything      # no structural meaning, dropped by compaction
//! end
//! end
//! (())               # runs of blends and ends
//! ```

mod bench;
mod compact;
mod gen;
mod output;
mod pipeline;
mod scene;

pub use bench::{
    bench, medians, throughput_ratios, write_bench_csv, BenchAlgo, BenchConfig, BenchRow,
    BenchSummary, MIN_TRIALS,
};
pub use compact::compact_structure;
pub use gen::{gen_nested, gen_random, GEN_EXTENT};
pub use output::{bbox_rows, read_matches, write_bbox_csv, write_matches, BBoxRow};
pub use pipeline::{run_pipeline, verify, PipelineOutput, Verdict};
pub use scene::{
    parse_records, parse_scene, serialize_records, serialize_scene, ParsedScene, Scene,
    SceneRecord, COORD_LIMIT,
};

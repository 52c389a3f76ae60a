//! Dropping draw records from a scene with a parallel count, scan and
//! scatter.

use stackmonoid::executor::{Executor, PartitionConfig};
use stackmonoid::frontend::{compact_structure, parse_records};

fn main() -> stackmonoid::Result<()> {
    let text = "clip 0 0 8 8\ndraw fill red\nleaf 1 1 2 2\ndraw stroke\nend\n# done\ndraw text hi\n";
    let scene = parse_records(text)?;
    let exec = Executor::new(1).validating(true);
    let (elems, map) = compact_structure(&exec, &scene.records, PartitionConfig::new(2, 2)?)?;
    for (e, &r) in elems.iter().zip(&map) {
        println!("record {r} (line {}): {e:?}", scene.lines[r as usize]);
    }
    Ok(())
}

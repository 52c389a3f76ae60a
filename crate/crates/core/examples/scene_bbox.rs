//! Clip and blend bounding boxes for a small scene.

use stackmonoid::bbox::bbox_pipeline;
use stackmonoid::executor::{Executor, PartitionConfig};
use stackmonoid::frontend::{parse_scene, write_bbox_csv};

const SCENE: &str = "\
clip 0 0 100 100
  leaf -20 10 40 50
  blend
    leaf 60 60 140 90
    clip 50 0 200 70
      leaf 80 -10 120 30
    end
  end
end
leaf 300 300 310 310
";

fn main() -> stackmonoid::Result<()> {
    let scene = parse_scene(SCENE)?;
    let exec = Executor::new(1).validating(true);
    let run = bbox_pipeline(&exec, &scene.seq, PartitionConfig::new(2, 2)?)?;
    println!("{} dispatches, clip links settled after {} rounds", run.stats.dispatches, run.stats.converged_after);
    let mut out = std::io::stdout().lock();
    write_bbox_csv(&mut out, &scene.seq, &run.result)?;
    Ok(())
}

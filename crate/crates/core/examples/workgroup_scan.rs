//! A kernel that scans one workgroup's data in shared memory, with every
//! write checked for conflicts.

use stackmonoid::executor::{
    wg_scan, Direction, ExecError, Executor, Kernel, PartitionConfig, Workgroup,
};
use stackmonoid::monoid::Bic;
use stackmonoid::oracle::parse_parens;

struct ReverseScan(Vec<Bic>);

impl Kernel for ReverseScan {
    type Output = Vec<Bic>;

    fn name(&self) -> &'static str {
        "reverse-scan"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Vec<Bic>, ExecError> {
        let (w, n) = (wg.size(), self.0.len());
        let mut buf = wg.shared("buf", n, Bic::IDENTITY);
        wg.step(&mut buf, |lane, buf| {
            for i in (lane.id()..n).step_by(w) {
                buf.set(lane, i, self.0[i]);
            }
        })?;
        wg_scan(wg, &mut buf, n, Bic::IDENTITY, |a, b| a.combine(b), Direction::Reverse, true)?;
        Ok(buf.as_slice().to_vec())
    }
}

fn main() -> stackmonoid::Result<()> {
    let input = ")(()(";
    let leaves = parse_parens(input).iter().map(stackmonoid::monoid::bic_from_element).collect();
    let exec = Executor::new(2).validating(true);
    let out = exec.dispatch(1, PartitionConfig::new(8, 1)?, &ReverseScan(leaves))?;
    println!("reverse scan of {input}: {:?}", out[0]);
    Ok(())
}

//! Minimal harmonic families for a few switch walks on DL(2,3).

use dlharmonic::boundary::{self, Family, SolverConfig};
use dlharmonic::walk::{switch_walk, ZWalk};

fn main() -> dlharmonic::Result<()> {
    let walks = [
        vec![(1, 0.5), (-1, 0.5)],
        vec![(1, 0.7), (-1, 0.3)],
        vec![(2, 0.5), (-1, 0.5)],
    ];
    for mu in walks {
        let w = switch_walk(&ZWalk::new(mu.clone())?, 2, 3)?;
        let report = boundary::enumerate_minimal_families(&w, &SolverConfig::default())?;
        println!("mu~ = {mu:?}: case {:?}, drift {:+.3}, c0 {:?}", report.case, report.drift, report.c0);
        for f in &report.families {
            match f {
                Family::Kernels { side, tree_case, .. } => println!("  kernels on tree {}, {tree_case:?}", side.index()),
                Family::Exponential { side, c } => println!("  exponential on tree {}, c = {c}", side.index()),
                Family::Constant => println!("  constant"),
            }
        }
    }
    Ok(())
}

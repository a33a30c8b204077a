//! Boundary-hit frequencies and a harmonic-measure ratio against the solver.

use dlharmonic::boundary::{self, SolverConfig};
use dlharmonic::montecarlo::{self, Cylinder, TrajectoryParams};
use dlharmonic::tree::{BoundaryPoint, TreeVertex};
use dlharmonic::walk::TreeWalk;

fn main() -> dlharmonic::Result<()> {
    let w = TreeWalk::new(2, [((0, 1), 0.7), ((1, 0), 0.3)])?;
    let c = boundary::solve_coefficients(&w, &SolverConfig::default())?;
    let params = TrajectoryParams { seed: 7, ..Default::default() };
    let runs = 200_000;

    let est = montecarlo::estimate_coefficients(&w, &params, runs, 5)?;
    println!("{runs} runs, {} unconverged", est.unconverged);
    for row in &est.rows {
        let a = c.a[row.j as usize];
        println!("j={} freq {:.5} ± {:.5}   a_j {:.5}", row.j, row.freq, row.stderr, a);
    }

    let x = TreeVertex::from_levels(-1, [(-1, 1)]);
    let xi = BoundaryPoint::new(TreeVertex::zero(10));
    let cyl = Cylinder::around(&x, &xi)?;
    let (from_x, _) = montecarlo::estimate_harmonic_measure(&w, &x, &cyl, &params, runs)?;
    let (from_o, _) = montecarlo::estimate_harmonic_measure(&w, &TreeVertex::root(), &cyl, &params, runs)?;
    let ratio = from_x.ratio(from_o);
    println!("ν_x/ν_o = {:.4} ± {:.4}, K(x, ξ) = {:.4}", ratio.value, ratio.stderr, boundary::kernel_at(&c, &x, &xi)?);
    Ok(())
}

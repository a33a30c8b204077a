//! Exact n-step laws on classes, Green sums and Martin kernel convergence.

use dlharmonic::boundary::{self, SolverConfig};
use dlharmonic::montecarlo::{self, ClassChain};
use dlharmonic::tree::{BoundaryPoint, TreeVertex};
use dlharmonic::walk::TreeWalk;

fn main() -> dlharmonic::Result<()> {
    let w = TreeWalk::new(2, [((0, 1), 0.7), ((1, 0), 0.3)])?;
    let mut chain = ClassChain::new(&w);
    let d = chain.distribution(3)?;
    for (class, p, size) in d.table() {
        println!("p3 on class {class:?}: {p:.5} per vertex × {size}");
    }

    let o = TreeVertex::root();
    let g = montecarlo::green_partial(&w, &o, &o, 200)?;
    println!("G(o, o) ≈ {:.10} (last term {:.1e})", g.sum, g.last_increment);

    let c = boundary::solve_coefficients(&w, &SolverConfig::default())?;
    let xi = BoundaryPoint::new(o.clone());
    let x = TreeVertex::from_levels(9, [(8, 1)]);
    let report = montecarlo::martin_convergence_test(&w, &c, &x, &xi, &[4, 6, 8, 10], 300)?;
    for row in &report.rows {
        println!("n={:2} K̂ = {:.6}  K = {:.6}  rel err {:.1e}", row.n, row.k_hat, row.target, row.rel_err);
    }
    Ok(())
}

//! Boundary coefficients of a tree walk and the kernels they give.

use dlharmonic::boundary::{self, HarmonicFunction, SolverConfig};
use dlharmonic::dl::Side;
use dlharmonic::tree::{self, BoundaryPoint, TreeVertex};
use dlharmonic::walk::TreeWalk;

fn main() -> dlharmonic::Result<()> {
    let w = TreeWalk::new(3, [((0, 1), 0.3), ((1, 0), 0.2), ((1, 1), 0.3), ((2, 1), 0.1), ((0, 2), 0.1)])?;
    let c = boundary::solve_coefficients(&w, &SolverConfig::default())?;
    println!("case {:?}, residual {:.2e}", c.case, c.residual);
    for j in 0..6 {
        println!("a_{j} = {:.8}", c.a[j]);
    }

    let xi = BoundaryPoint::new(TreeVertex::from_levels(20, [(-2, 1), (3, 2), (7, 1)]));
    let x = TreeVertex::from_levels(1, [(-4, 2), (0, 1)]);
    let (k, l) = (tree::up_to_boundary(&TreeVertex::root(), &xi)?, tree::up_to_boundary(&x, &xi)?);
    println!("K(x, ξ) = {:.8} with k = {k}, l = {l}, m = {}", boundary::kernel_at(&c, &x, &xi)?, x.hor());

    let h = HarmonicFunction::tree_kernel(Side::One, xi, c);
    let points = tree::ball(&TreeVertex::root(), 3, 3)?;
    println!("max |Ph − h| / h on B(o, 3): {:.2e}", boundary::harmonicity_error_tree(&h, &w, &points)?);
    Ok(())
}

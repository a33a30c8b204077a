//! A switch walk, its projections, phi and the conjugated walk.

use dlharmonic::dl::Side;
use dlharmonic::walk::{switch_walk, ZWalk, DERIVED_MASS_TOL};

fn main() -> dlharmonic::Result<()> {
    let mu = ZWalk::new([(1, 0.7), (-1, 0.3)])?;
    let w = switch_walk(&mu, 2, 3)?;
    for (key, p) in w.entries() {
        println!("m{key:?} = {p:.4} per vertex, class size {}", w.class_size(key));
    }
    println!("drift {:.4}", w.drift());
    for c in [-1.0, -0.5, 0.0, 0.5] {
        println!("phi({c:+.1}) = {:.6}", w.phi(c));
    }
    let c0 = mu.find_c0(1e-14)?.expect("nonzero drift");
    println!("c0 = {c0:.12} (ln(3/7) = {:.12})", (3.0f64 / 7.0).ln());

    let t1 = w.project_to_tree(Side::One);
    let t2 = w.project_to_tree(Side::Two);
    println!("tree 1 classes {:?}", t1.classes().collect::<Vec<_>>());
    println!("tree 2 classes {:?}", t2.classes().collect::<Vec<_>>());

    let sharp = w.conjugate(c0)?;
    println!("conjugated drift {:.4}, mass ok: {}", sharp.drift(), (sharp.phi(0.0) - 1.0).abs() < DERIVED_MASS_TOL);
    Ok(())
}

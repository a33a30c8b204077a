//! Vertices, confluents and cones of T_3.

use dlharmonic::tree::{self, BoundaryPoint, ConeSpec, TreeVertex};

fn main() -> dlharmonic::Result<()> {
    let q = 3;
    let o = TreeVertex::root();
    let x = TreeVertex::from_word(2, [(0, 1), (1, 2)]);
    let y = TreeVertex::from_word(-1, [(0, 2)]);

    println!("x = {x:?}, y = {y:?}");
    println!("x ⋏ y = {:?}", tree::confluent(&x, &y));
    println!("up(x,y) = {}, up(y,x) = {}, d = {}", tree::up(&x, &y), tree::up(&y, &x), tree::distance(&x, &y));

    let cone = tree::enumerate_cone(&ConeSpec::new(o.clone(), 1, 2)?, q)?;
    println!("|T_(1,2)(o)| = {} (formula {})", cone.len(), tree::cone_count(q, 1, 2)?);

    let xi = BoundaryPoint::new(TreeVertex::from_word(4, [(0, 1), (3, 2)]));
    println!("up(o, ξ) = {}, up(x, ξ) = {}", tree::up_to_boundary(&o, &xi)?, tree::up_to_boundary(&x, &xi)?);
    for n in [0, 2, 4] {
        println!("ray point at depth {n}: {:?}", tree::geodesic_toward(&xi, n));
    }
    Ok(())
}

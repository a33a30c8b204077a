//! DL(2,2) as the lamplighter group: neighbours, flags, distances, products.

use dlharmonic::dl::{self, DLVertex};

fn main() -> dlharmonic::Result<()> {
    let (q, r) = (2, 2);
    let o = DLVertex::root();
    let x = DLVertex::new(2, [(1, 1), (2, 1)], q, r)?;
    let y = DLVertex::new(-1, [(0, 1)], q, r)?;

    println!("o has {} neighbours", dl::neighbors(&o, q, r)?.len());
    let f = dl::flags(&x, &y);
    println!("flags(x, y): fl1 = {}, fl2 = {}", f.fl1, f.fl2);
    println!("up-quadruple(x, y) = {:?}", dl::up_quadruple(&x, &y));
    println!("d(x, y) = {}", dl::dl_distance(&x, &y));

    let xy = dl::group_multiply(&x, &y, q, r)?;
    let back = dl::group_multiply(&xy, &dl::group_inverse(&y, q, r)?, q, r)?;
    println!("x·y = {xy:?}; (x·y)·y⁻¹ = x: {}", back == x);

    let ball = dl::ball(&o, 3, q, r)?;
    println!("|B(o, 3)| = {}", ball.len());
    Ok(())
}

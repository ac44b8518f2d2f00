//! Scenes shared by the benchmarks.

use ditop_core::scene::q;
use ditop_core::{Cover, CubicalScene, GridComplex, VertexId, Window};

/// `n` holes on the diagonal of the unit square.
pub fn diagonal_holes(n: i64) -> CubicalScene {
    let d = 2 * n + 1;
    (0..n).fold(CubicalScene::new(2), |s, k| {
        let iv = (q(2 * k + 1, d), q(2 * k + 2, d));
        s.with_box(&[iv, iv])
    })
}

pub fn swiss_flag() -> CubicalScene {
    CubicalScene::new(2)
        .with_box(&[(q(1, 5), q(4, 5)), (q(2, 5), q(3, 5))])
        .with_box(&[(q(2, 5), q(3, 5)), (q(1, 5), q(4, 5))])
}

/// Left and right overlapping halves of the square annulus.
pub fn annulus_split(g: &GridComplex) -> Cover {
    let at = |x: (i64, i64), y: (i64, i64)| -> VertexId { g.vertex_at(&[q(x.0, x.1), q(y.0, y.1)]).expect("grid vertex") };
    let a = at((0, 1), (0, 1));
    let p = at((1, 3), (1, 3));
    let q1 = at((2, 3), (1, 3));
    let q2 = at((2, 3), (1, 1));
    let b = at((1, 1), (1, 1));
    Cover::new(
        Window::closed_box(&[(q(0, 1), q(2, 3)), (q(0, 1), q(1, 1))]),
        Window::closed_box(&[(q(1, 3), q(1, 1)), (q(0, 1), q(1, 1))]),
        &[a, p, q1, q2],
        &[p, q1, q2, b],
    )
}

#![allow(dead_code)]

pub mod checks;

use ditop_core::scene::q;
use ditop_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn annulus() -> CubicalScene {
    CubicalScene::new(2)
        .with_box(&[(q(1, 3), q(2, 3)), (q(1, 3), q(2, 3))])
        .with_point("a", &[q(0, 1), q(0, 1)])
        .with_point("b", &[q(1, 1), q(1, 1)])
}

pub fn swiss_flag() -> CubicalScene {
    CubicalScene::new(2)
        .with_box(&[(q(1, 5), q(4, 5)), (q(2, 5), q(3, 5))])
        .with_box(&[(q(2, 5), q(3, 5)), (q(1, 5), q(4, 5))])
        .with_point("a", &[q(0, 1), q(0, 1)])
        .with_point("b", &[q(2, 5), q(2, 5)])
        .with_point("c", &[q(3, 5), q(3, 5)])
        .with_point("d", &[q(1, 1), q(1, 1)])
}

/// Two holes on the diagonal; also the holes-in-series scene.
pub fn two_holes() -> CubicalScene {
    CubicalScene::new(2)
        .with_box(&[(q(1, 5), q(2, 5)), (q(1, 5), q(2, 5))])
        .with_box(&[(q(3, 5), q(4, 5)), (q(3, 5), q(4, 5))])
        .with_point("a", &[q(0, 1), q(0, 1)])
        .with_point("b", &[q(3, 5), q(3, 5)])
        .with_point("c", &[q(1, 1), q(1, 1)])
}

pub fn circle() -> CubicalScene {
    CubicalScene::new(1).with_identification(0, q(0, 1), q(1, 1)).with_point("x", &[q(0, 1)])
}

/// Three holes in a row with the strip between `x = 5/16` and
/// `x = 11/16` glued away from the middle one.
pub fn gluing() -> CubicalScene {
    let y = (q(2, 5), q(3, 5));
    CubicalScene::new(2)
        .with_box(&[(q(1, 16), q(3, 16)), y])
        .with_box(&[(q(7, 16), q(9, 16)), y])
        .with_box(&[(q(13, 16), q(15, 16)), y])
        .with_identification(0, q(5, 16), q(11, 16))
        .with_point("a", &[q(0, 1), q(0, 1)])
        .with_point("p", &[q(3, 16), q(0, 1)])
        .with_point("s0", &[q(5, 16), q(0, 1)])
        .with_point("s1", &[q(5, 16), q(1, 1)])
        .with_point("q", &[q(13, 16), q(1, 1)])
        .with_point("b", &[q(1, 1), q(1, 1)])
}

pub fn grid(scene: &CubicalScene) -> GridComplex {
    compactify(scene).unwrap()
}

pub fn pt(g: &GridComplex, scene: &CubicalScene, name: &str) -> VertexId {
    g.vertex_at(scene.point(name).unwrap()).unwrap()
}

pub fn all_vertices(g: &GridComplex) -> Vec<VertexId> {
    g.vertices().collect()
}

/// Up to `max_boxes` boxes with corners on the eighths grid.
pub fn random_scene(rng: &mut impl Rng, max_boxes: usize) -> CubicalScene {
    let mut scene = CubicalScene::new(2);
    for _ in 0..rng.gen_range(1..=max_boxes) {
        let mut iv = Vec::new();
        for _ in 0..2 {
            let lo = rng.gen_range(0..8);
            let hi = rng.gen_range(lo + 1..=8);
            iv.push((q(lo, 8), q(hi, 8)));
        }
        scene = scene.with_box(&iv);
    }
    scene
}

pub fn scene_corpus(seed: u64, n: usize, max_boxes: usize) -> Vec<CubicalScene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_scene(&mut rng, max_boxes)).collect()
}

pub fn arb_scene(max_boxes: usize) -> impl Strategy<Value = CubicalScene> {
    prop::collection::vec(((0i64..8, 1i64..=8), (0i64..8, 1i64..=8)), 1..=max_boxes).prop_map(|boxes| {
        let mut scene = CubicalScene::new(2);
        for ((x0, dx), (y0, dy)) in boxes {
            let x1 = (x0 + dx).min(8).max(x0 + 1);
            let y1 = (y0 + dy).min(8).max(y0 + 1);
            scene = scene.with_box(&[(q(x0, 8), q(x1, 8)), (q(y0, 8), q(y1, 8))]);
        }
        scene
    })
}

mod common;

use common::*;
use ditop_core::category::{extremal_set, preorder};
use ditop_core::dipath::{classes_by_flips, signature_2d};
use ditop_core::model::{greedy_extremal_model, is_minimal};
use ditop_core::scene::q;
use ditop_core::vankampen::{piece_tables, validate_cover, CoverPieces};
use ditop_core::*;

#[test]
fn annulus_two_classes_and_extremal_points() {
    let s = annulus();
    let g = grid(&s);
    let (a, b) = (pt(&g, &s, "a"), pt(&g, &s, "b"));
    assert_eq!(extremal_set(&g), vec![a, b]);
    let list = classes(&g, a, b, Budget::for_grid(&g)).unwrap();
    assert!(list.exact);
    assert_eq!(list.classes.len(), 2);
    assert_eq!(classes_by_flips(&g, a, b, Budget::for_grid(&g)).unwrap().classes.len(), 2);
    assert_eq!(enumerate_dipaths(&g, a, b, Budget::for_grid(&g)).unwrap().len(), 20);
}

#[test]
fn two_diagonal_holes_bipartite_graph() {
    let s = two_holes();
    let g = grid(&s);
    let t = bipartite_graph(&g, Budget::for_grid(&g)).unwrap();
    assert_eq!(t.objects().len(), 2);
    assert!(t.all_exact());
    assert_eq!(t.edge_multiset().values().sum::<usize>(), 4);
    let (a, c) = (pt(&g, &s, "a"), pt(&g, &s, "c"));
    let sigs: std::collections::BTreeSet<_> = enumerate_dipaths(&g, a, c, Budget::for_grid(&g))
        .unwrap()
        .iter()
        .map(|p| signature_2d(&g, p).unwrap())
        .collect();
    assert_eq!(sigs.len(), 4);
}

#[test]
fn swiss_flag_extremal_structure() {
    let s = swiss_flag();
    let g = grid(&s);
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|n| pt(&g, &s, n));
    let (mins, maxs) = extremal_points(&g);
    assert_eq!((mins, maxs), (vec![a, c], vec![b, d]));
    let t = bipartite_graph(&g, Budget::for_grid(&g)).unwrap();
    assert!(t.all_exact());
    assert_eq!([t.hom_count(a, d), t.hom_count(a, b), t.hom_count(c, d), t.hom_count(c, b)], [2, 1, 1, 0]);
    let order = preorder(&g);
    assert!(!order.le(c, b) && !order.le(b, c));
    assert_eq!(g.top_cells().iter().filter(|(_, allowed)| !allowed).count(), 5);
}

#[test]
fn swiss_flag_chain_is_a_minimal_model() {
    let s = swiss_flag();
    let g = grid(&s);
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|n| pt(&g, &s, n));
    let l: Vec<VertexId> = g
        .vertices()
        .filter(|v| {
            let p = g.vertex_point(*v);
            (p[0] <= q(2, 5) && p[1] <= q(1, 5)) || (p[0] <= q(1, 5) && p[1] <= q(2, 5))
        })
        .chain([b, c, d])
        .collect();
    let mut chain = RetractChain::new(full_subcategory(&g, &all_vertices(&g), Budget::for_grid(&g)).unwrap());
    chain.push_found(Direction::Future, &l).unwrap().unwrap();
    chain.push_found(Direction::Past, &[a, b, c, d]).unwrap().unwrap();
    assert!(verify_extremal_model(&g, &chain).unwrap().passed());
    assert!(is_minimal(&g, &chain).unwrap());
    let t = chain.final_table().unwrap();
    let gens: Vec<_> = t.irreducible_arrows().into_iter().map(|f| (f.from, f.to)).collect();
    assert_eq!(gens, vec![(a, b), (a, d), (a, d), (c, d)]);
    assert!(check_bipartite_iso(&g, &chain).unwrap());
}

#[test]
fn swiss_flag_deadlock_has_no_future_retract() {
    let s = swiss_flag();
    let g = grid(&s);
    let t = full_subcategory(&g, &all_vertices(&g), Budget::for_grid(&g)).unwrap();
    assert!(find_retract(&t, &[pt(&g, &s, "b")], Direction::Future).unwrap().is_none());
}

#[test]
fn holes_in_series_model() {
    let s = two_holes();
    let g = grid(&s);
    let [a, b, c] = ["a", "b", "c"].map(|n| pt(&g, &s, n));
    let first: Vec<VertexId> = g
        .vertices()
        .filter(|v| {
            let p = g.vertex_point(*v);
            (p[0] <= q(3, 5) && p[1] <= q(1, 5)) || (p[0] <= q(1, 5) && p[1] <= q(3, 5))
        })
        .chain([b, c])
        .collect();
    let mut chain = RetractChain::new(full_subcategory(&g, &all_vertices(&g), Budget::for_grid(&g)).unwrap());
    chain.push_found(Direction::Future, &first).unwrap().unwrap();
    chain.push_found(Direction::Past, &[a, b, c]).unwrap().unwrap();
    assert!(verify_extremal_model(&g, &chain).unwrap().passed());
    assert!(is_minimal(&g, &chain).unwrap());
    let t = chain.final_table().unwrap();
    assert_eq!([t.hom_count(a, b), t.hom_count(b, c), t.hom_count(a, c)], [2, 2, 4]);
    let mut composites = std::collections::BTreeSet::new();
    for f in t.arrows(a, b) {
        for h in t.arrows(b, c) {
            composites.insert(t.compose(f, h).unwrap());
        }
    }
    assert_eq!(composites.len(), 4);
    assert!(check_bipartite_iso(&g, &chain).unwrap());
}

#[test]
fn directed_circle_is_the_natural_numbers() {
    let s = circle();
    let g = grid(&s);
    let x = pt(&g, &s, "x");
    assert!(extremal_set(&g).is_empty());
    for n in 0..=5 {
        let t = full_subcategory(&g, &[x], Budget::new(1000, n)).unwrap();
        assert_eq!(t.hom_count(x, x), n + 1);
        assert!(!t.is_exact(x, x));
        let loops: Vec<Arrow> = t.arrows(x, x).collect();
        for (i, f) in loops.iter().enumerate() {
            for (j, h) in loops.iter().enumerate() {
                let expected = (i + j <= n).then(|| loops[i + j]);
                assert_eq!(t.compose(*f, *h), expected);
            }
        }
    }
}

#[test]
fn greedy_model_on_the_swiss_flag() {
    let s = swiss_flag();
    let g = grid(&s);
    let chain = greedy_extremal_model(&g, full_subcategory(&g, &all_vertices(&g), Budget::for_grid(&g)).unwrap()).unwrap();
    assert_eq!(chain.final_objects(), extremal_set(&g));
    assert!(verify_extremal_model(&g, &chain).unwrap().passed());
}

fn gluing_cover(g: &GridComplex, s: &CubicalScene) -> (Cover, CoverPieces) {
    let x1 = Window(vec![vec![(q(0, 1), q(5, 16)), (q(11, 16), q(1, 1))], vec![(q(0, 1), q(1, 1))]]);
    let x2 = Window(vec![vec![(q(3, 16), q(13, 16))], vec![(q(0, 1), q(1, 1))]]);
    let a1: Vec<VertexId> = ["a", "p", "s0", "s1", "q", "b"].iter().map(|n| pt(g, s, n)).collect();
    let a2: Vec<VertexId> = ["p", "s0", "s1", "q"].iter().map(|n| pt(g, s, n)).collect();
    let cover = Cover::new(x1, x2, &a1, &a2);
    let pieces = validate_cover(g, &cover).unwrap();
    (cover, pieces)
}

#[test]
fn gluing_example_pieces() {
    let s = gluing();
    let g = grid(&s);
    let (cover, pieces) = gluing_cover(&g, &s);
    assert_eq!(extremal_set(&pieces.x1), vec![pt(&g, &s, "a"), pt(&g, &s, "b")]);
    assert_eq!(extremal_set(&pieces.x2), vec![pt(&g, &s, "p"), pt(&g, &s, "q")]);
    let (t1, t2, t0) = piece_tables(&pieces, &cover.a1, &cover.a2, Budget::for_grid(&g).with_max_steps(9)).unwrap();
    assert!(t1.all_exact() && t0.all_exact());
    assert!(!t2.all_exact());
    let s0 = pt(&g, &s, "s0");
    assert_eq!(t2.hom_count(s0, s0), 4);
}

#[test]
fn gluing_example_presentation() {
    let s = gluing();
    let g = grid(&s);
    let (cover, _) = gluing_cover(&g, &s);
    let report = verify_pushout(&g, &cover, Budget::for_grid(&g).with_max_steps(9)).unwrap();
    assert!(report.isomorphic());
    assert!(!report.exact());
    let pres = &report.presentation;
    let name = |v: VertexId| ["a", "p", "s0", "s1", "q", "b"].into_iter().find(|n| pt(&g, &s, n) == v).unwrap();
    let mut quiver: Vec<(&str, &str)> = pres.quiver().into_iter().map(|i| (name(pres.generators[i].from), name(pres.generators[i].to))).collect();
    quiver.sort();
    let mut expected = vec![
        ("a", "p"),
        ("p", "s0"),
        ("s0", "s1"),
        ("s1", "q"),
        ("q", "b"),
        ("a", "s1"),
        ("s0", "b"),
        ("s0", "s0"),
        ("s1", "s1"),
    ];
    expected.sort();
    assert_eq!(quiver, expected);
    let s0 = pt(&g, &s, "s0");
    let loops = hom_from_presentation(pres, s0, s0, 3);
    assert_eq!(loops.classes.len(), 4);
    assert!(!loops.exact);
    let direct = classes(&g, s0, s0, Budget::for_grid(&g).with_max_steps(9)).unwrap();
    assert_eq!(direct.classes.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![0, 3, 6, 9]);
}

//! Checks shared by the property tests and the acceptance run.

use std::collections::{BTreeMap, BTreeSet};

use ditop_core::category::extremal_set;
use ditop_core::fincat::compose_functors;
use ditop_core::scene::q;
use ditop_core::vankampen::{piece_tables, pushout_category, validate_cover};
use ditop_core::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Found retracts of a scene's greedy model, each with its domain table.
pub fn found_retracts(g: &GridComplex) -> Vec<(HomTable, RetractData)> {
    let base = full_subcategory(g, &g.vertices().collect::<Vec<_>>(), Budget::for_grid(g)).unwrap();
    let chain = ditop_core::model::greedy_extremal_model(g, base).unwrap();
    (0..chain.steps.len())
        .map(|k| (chain.base.subtable(&chain.domain_objects(k)).unwrap(), chain.steps[k].clone()))
        .collect()
}

/// Variants of `data` with one assignment changed: another class to the
/// same target, another target in `A`, or a codomain point moved.
pub fn corrupted(table: &HomTable, data: &RetractData, rng: &mut impl Rng, limit: usize) -> Vec<RetractData> {
    let mut out = Vec::new();
    let future = data.direction == Direction::Future;
    let hom = |x: VertexId, y: VertexId| if future { table.hom(x, y) } else { table.hom(y, x) };
    let mut xs: Vec<VertexId> = data.domain.clone();
    xs.shuffle(rng);
    for x in xs {
        let current = &data.assignment[&x];
        for a in &data.codomain {
            for class in hom(x, *a) {
                if *a == current.target && class.canonical == current.witness {
                    continue;
                }
                let mut v = data.clone();
                v.assignment.insert(x, Assignment { target: *a, witness: class.canonical.clone() });
                out.push(v);
                if out.len() >= limit {
                    return out;
                }
            }
        }
    }
    out
}

/// Number of disagreements between the two retract checks, and how many
/// variants each accepted and rejected.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Agreement {
    pub checked: usize,
    pub disagreements: usize,
    pub accepted: usize,
    pub rejected: usize,
}

impl Agreement {
    pub fn add(&mut self, table: &HomTable, data: &RetractData) {
        let direct = verify_retract(table, data).unwrap().passed();
        let adj = check_adjunction(&induced_functor(data, table), table);
        self.checked += 1;
        if direct != adj {
            self.disagreements += 1;
        }
        if direct {
            self.accepted += 1;
        } else {
            self.rejected += 1;
        }
    }

    pub fn merge(&mut self, other: Agreement) {
        self.checked += other.checked;
        self.disagreements += other.disagreements;
        self.accepted += other.accepted;
        self.rejected += other.rejected;
    }
}

pub fn retract_agreement(g: &GridComplex, rng: &mut impl Rng, corruptions: usize) -> Agreement {
    let mut agreement = Agreement::default();
    for (table, data) in found_retracts(g) {
        agreement.add(&table, &data);
        for v in corrupted(&table, &data, rng, corruptions) {
            agreement.add(&table, &v);
        }
    }
    agreement
}

/// Removes non-extremal objects one at a time in random order until no
/// further retract exists.
pub fn random_greedy_model(g: &GridComplex, rng: &mut impl Rng) -> RetractChain {
    let ext: BTreeSet<VertexId> = extremal_set(g).into_iter().collect();
    let base = full_subcategory(g, &g.vertices().collect::<Vec<_>>(), Budget::for_grid(g)).unwrap();
    let mut chain = RetractChain::new(base);
    'outer: loop {
        let current = chain.final_objects();
        let mut moves: Vec<(Direction, VertexId)> = current
            .iter()
            .filter(|v| !ext.contains(v))
            .flat_map(|&v| [(Direction::Future, v), (Direction::Past, v)])
            .collect();
        moves.shuffle(rng);
        for (dir, v) in moves {
            let rest: Vec<VertexId> = current.iter().copied().filter(|w| *w != v).collect();
            if chain.push_found(dir, &rest).unwrap().is_some() {
                continue 'outer;
            }
        }
        return chain;
    }
}

/// A random concrete category: objects are sets of size 1 to 3, arrows
/// the closure of a few random maps under composition. `None` when some
/// hom-set exceeds `max_parallel`.
pub fn random_category(rng: &mut impl Rng, max_objects: usize, max_parallel: usize) -> Option<FiniteCategory> {
    let n = rng.gen_range(1..=max_objects);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    type Map = (usize, usize, Vec<usize>);
    let mut maps: BTreeSet<Map> = (0..n).map(|a| (a, a, (0..sizes[a]).collect())).collect();
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        maps.insert((a, b, (0..sizes[a]).map(|_| rng.gen_range(0..sizes[b])).collect()));
    }
    loop {
        let current: Vec<Map> = maps.iter().cloned().collect();
        let mut grew = false;
        for f in &current {
            for g in current.iter().filter(|g| g.0 == f.1) {
                grew |= maps.insert((f.0, g.1, f.2.iter().map(|i| g.2[*i]).collect()));
            }
        }
        let mut counts = BTreeMap::new();
        for m in &maps {
            *counts.entry((m.0, m.1)).or_insert(0) += 1;
        }
        if counts.values().any(|c| *c > max_parallel) {
            return None;
        }
        if !grew {
            break;
        }
    }
    let list: Vec<Map> = maps.into_iter().collect();
    let index: BTreeMap<&Map, usize> = list.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let arrows = list.iter().map(|m| (m.0, m.1)).collect();
    let identities = (0..n).map(|a| index[&(a, a, (0..sizes[a]).collect())]).collect();
    let mut compose = BTreeMap::new();
    for (i, f) in list.iter().enumerate() {
        for (j, g) in list.iter().enumerate().filter(|(_, g)| g.0 == f.1) {
            compose.insert((i, j), index[&(f.0, g.1, f.2.iter().map(|k| g.2[*k]).collect())]);
        }
    }
    Some(FiniteCategory { objects: n, arrows, identities, compose })
}

pub fn sample_categories(rng: &mut impl Rng, count: usize) -> Vec<FiniteCategory> {
    let mut out = Vec::new();
    while out.len() < count {
        if let Some(c) = random_category(rng, 4, 3) {
            out.push(c);
        }
    }
    out
}

/// The cover of the square annulus by its left and right thirds-plus.
pub fn annulus_split(g: &GridComplex) -> Cover {
    let at = |x: Coord, y: Coord| g.vertex_at(&[x, y]).unwrap();
    let a = at(q(0, 1), q(0, 1));
    let p = at(q(1, 3), q(1, 3));
    let q1 = at(q(2, 3), q(1, 3));
    let q2 = at(q(2, 3), q(1, 1));
    let b = at(q(1, 1), q(1, 1));
    Cover::new(
        Window::closed_box(&[(q(0, 1), q(2, 3)), (q(0, 1), q(1, 1))]),
        Window::closed_box(&[(q(1, 3), q(1, 1)), (q(0, 1), q(1, 1))]),
        &[a, p, q1, q2],
        &[p, q1, q2, b],
    )
}

/// The pushout square `T₁ ← T₀ → T₂ → P` as explicit categories and
/// functors.
pub struct PushoutSquare {
    pub t: [FiniteCategory; 3],
    pub i: [Functor; 2],
    pub p: FiniteCategory,
    pub j: [Functor; 2],
}

pub fn pushout_square(g: &GridComplex, cover: &Cover) -> PushoutSquare {
    let pieces = validate_cover(g, cover).unwrap();
    let budget = Budget::for_grid(g);
    let (t1, t2, t0) = piece_tables(&pieces, &cover.a1, &cover.a2, budget).unwrap();
    let report = verify_pushout(g, cover, budget).unwrap();
    let pc = pushout_category(&report.presentation, 4 * budget.max_steps).unwrap();
    let (c1, n1) = FiniteCategory::from_table(&t1).unwrap();
    let (c2, n2) = FiniteCategory::from_table(&t2).unwrap();
    let (c0, n0) = FiniteCategory::from_table(&t0).unwrap();
    let pos = |objs: &[VertexId], v: VertexId| objs.iter().position(|w| *w == v).unwrap();
    let inclusion = |tk: &HomTable, nk: &BTreeMap<Arrow, usize>| {
        let mut arrows = vec![0; c0.arrows.len()];
        for (f, i) in &n0 {
            arrows[*i] = nk[&tk.arrow_of(t0.representative(*f)).unwrap()];
        }
        Functor { objects: t0.objects().iter().map(|v| pos(tk.objects(), *v)).collect(), arrows }
    };
    let into_p = |k: usize, tk: &HomTable, nk: &BTreeMap<Arrow, usize>| {
        let mut arrows = vec![0; nk.len()];
        for (f, i) in nk {
            arrows[*i] = pc.j[k][f];
        }
        Functor { objects: tk.objects().iter().map(|v| pos(&pc.objects, *v)).collect(), arrows }
    };
    let i = [inclusion(&t1, &n1), inclusion(&t2, &n2)];
    let j = [into_p(0, &t1, &n1), into_p(1, &t2, &n2)];
    PushoutSquare { t: [c1, c2, c0], i, p: pc.category, j }
}

/// Every compatible pair `(φ₁, φ₂)` into `target` has exactly one
/// mediating functor `P → target`. Returns the number of compatible
/// pairs, or a description of the failure.
pub fn universal_property(square: &PushoutSquare, target: &FiniteCategory) -> Result<usize, String> {
    let phi1 = functors(&square.t[0], target);
    let phi2 = functors(&square.t[1], target);
    let mut compatible = BTreeSet::new();
    for f1 in &phi1 {
        let r1 = compose_functors(&square.i[0], f1);
        for f2 in &phi2 {
            if compose_functors(&square.i[1], f2) == r1 {
                compatible.insert((f1.clone(), f2.clone()));
            }
        }
    }
    let mut mediated: BTreeMap<(Functor, Functor), usize> = BTreeMap::new();
    for psi in functors(&square.p, target) {
        let pair = (compose_functors(&square.j[0], &psi), compose_functors(&square.j[1], &psi));
        if !compatible.contains(&pair) {
            return Err("a functor out of the pushout restricts to an incompatible pair".into());
        }
        *mediated.entry(pair).or_insert(0) += 1;
    }
    for pair in &compatible {
        match mediated.get(pair) {
            None => return Err("a compatible pair has no mediating functor".into()),
            Some(n) if *n > 1 => return Err(format!("a compatible pair has {n} mediating functors")),
            _ => {}
        }
    }
    Ok(compatible.len())
}

/// Random monotone walk from `v`, stopping at a sink or after `max_len`
/// steps.
pub fn random_walk(g: &GridComplex, v: VertexId, max_len: usize, rng: &mut impl Rng) -> LatticePath {
    let mut path = LatticePath::constant(v);
    let mut at = v;
    while path.len() < max_len {
        let Some(e) = g.out_edges(at).choose(rng) else { break };
        path.steps.push(*e);
        at = g.edge(*e).dst;
    }
    path
}

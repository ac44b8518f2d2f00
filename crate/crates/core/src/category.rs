//! Full subcategories of the fundamental category, reachability and
//! extremal points.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::dipath::{Budget, ClassIndex, DihomotopyClass, LatticePath};
use crate::error::{Error, Result};
use crate::grid::{GridComplex, VertexId};

/// A morphism of a [`HomTable`]: the `index`-th class of `hom(from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub from: VertexId,
    pub to: VertexId,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSet {
    pub classes: Vec<DihomotopyClass>,
    pub exact: bool,
}

/// The full subcategory on a finite set of grid vertices.
#[derive(Debug, Clone)]
pub struct HomTable {
    objects: Vec<VertexId>,
    hom: BTreeMap<(VertexId, VertexId), HomSet>,
    index: BTreeMap<VertexId, ClassIndex>,
    budget: Budget,
}

/// Builds the full subcategory on `objects`. A source whose classes exceed
/// `max_paths` is recomputed with fewer steps and its hom-sets are marked
/// inexact.
pub fn full_subcategory(grid: &GridComplex, objects: &[VertexId], budget: Budget) -> Result<HomTable> {
    let objects: Vec<VertexId> = objects.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for &a in &objects {
        if !grid.is_vertex(a) {
            return Err(Error::NotAVertex(a));
        }
    }
    let mut hom = BTreeMap::new();
    let mut index = BTreeMap::new();
    for &a in &objects {
        let (idx, forced) = build_within_budget(grid, a, budget);
        for &b in &objects {
            let mut set = idx.class_list(grid, b);
            if forced {
                set.exact = false;
            }
            hom.insert((a, b), HomSet { classes: set.classes, exact: set.exact });
        }
        index.insert(a, idx);
    }
    Ok(HomTable { objects, hom, index, budget })
}

fn build_within_budget(grid: &GridComplex, a: VertexId, budget: Budget) -> (ClassIndex, bool) {
    let mut steps = budget.max_steps;
    loop {
        match ClassIndex::build(grid, a, budget.with_max_steps(steps)) {
            Ok(idx) => return (idx, steps < budget.max_steps),
            Err(_) if steps > 0 => steps /= 2,
            Err(_) => {
                let idx = ClassIndex::build(grid, a, Budget::new(usize::MAX, 0)).expect("no steps always fit");
                return (idx, true);
            }
        }
    }
}

impl HomTable {
    pub fn objects(&self) -> &[VertexId] {
        &self.objects
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.objects.binary_search(&v).is_ok()
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn hom(&self, a: VertexId, b: VertexId) -> &[DihomotopyClass] {
        self.hom.get(&(a, b)).map(|h| h.classes.as_slice()).unwrap_or(&[])
    }

    pub fn hom_count(&self, a: VertexId, b: VertexId) -> usize {
        self.hom(a, b).len()
    }

    pub fn is_exact(&self, a: VertexId, b: VertexId) -> bool {
        self.hom.get(&(a, b)).map(|h| h.exact).unwrap_or(true)
    }

    pub fn all_exact(&self) -> bool {
        self.hom.values().all(|h| h.exact)
    }

    /// Longest stored representative out of `a`.
    pub fn max_steps(&self) -> usize {
        self.index.values().map(ClassIndex::max_steps).min().unwrap_or(self.budget.max_steps)
    }

    pub fn arrows(&self, a: VertexId, b: VertexId) -> impl Iterator<Item = Arrow> + '_ {
        (0..self.hom_count(a, b)).map(move |index| Arrow { from: a, to: b, index })
    }

    /// Every stored arrow, grouped by `(from, to)`.
    pub fn all_arrows(&self) -> Vec<Arrow> {
        self.hom.keys().flat_map(|&(a, b)| self.arrows(a, b)).collect()
    }

    pub fn identity(&self, a: VertexId) -> Arrow {
        Arrow { from: a, to: a, index: 0 }
    }

    pub fn is_identity(&self, f: Arrow) -> bool {
        f.from == f.to && self.representative(f).is_empty()
    }

    pub fn class(&self, f: Arrow) -> &DihomotopyClass {
        &self.hom(f.from, f.to)[f.index]
    }

    pub fn representative(&self, f: Arrow) -> &LatticePath {
        &self.class(f).canonical
    }

    /// The arrow containing `path`, if both ends are objects and the path
    /// fits the step bound.
    pub fn arrow_of(&self, path: &LatticePath) -> Option<Arrow> {
        let (to, index) = self.index.get(&path.start)?.position_of(path)?;
        self.contains(to).then_some(Arrow { from: path.start, to, index })
    }

    /// `f` followed by `g`, i.e. `g ∘ f`. `None` when the composite is
    /// longer than the stored bound.
    pub fn compose(&self, f: Arrow, g: Arrow) -> Option<Arrow> {
        assert_eq!(f.to, g.from, "arrows are not composable");
        self.arrow_of(&self.representative(f).concat(self.representative(g)))
    }

    /// The full subcategory on a subset of the objects.
    pub fn subtable(&self, objects: &[VertexId]) -> Result<HomTable> {
        let objects: Vec<VertexId> = objects.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if let Some(v) = objects.iter().find(|v| !self.contains(**v)) {
            return Err(Error::NotAVertex(*v));
        }
        let hom = self
            .hom
            .iter()
            .filter(|((a, b), _)| objects.binary_search(a).is_ok() && objects.binary_search(b).is_ok())
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        let index = self.index.iter().filter(|(a, _)| objects.binary_search(a).is_ok()).map(|(k, v)| (*k, v.clone())).collect();
        Ok(HomTable { objects, hom, index, budget: self.budget })
    }

    /// Minimal and maximal objects for the order "some arrow exists".
    pub fn extremal_objects(&self) -> (Vec<VertexId>, Vec<VertexId>) {
        let mins = self
            .objects
            .iter()
            .copied()
            .filter(|&a| self.objects.iter().all(|&x| x == a || self.hom_count(x, a) == 0))
            .collect();
        let maxs = self
            .objects
            .iter()
            .copied()
            .filter(|&b| self.objects.iter().all(|&x| x == b || self.hom_count(b, x) == 0))
            .collect();
        (mins, maxs)
    }

    /// For each composite non-identity arrow, the first factorization into
    /// two non-identity arrows found in canonical order.
    pub fn factorizations(&self) -> BTreeMap<Arrow, (Arrow, Arrow)> {
        let mut out = BTreeMap::new();
        for &a in &self.objects {
            for &b in &self.objects {
                for f in self.arrows(a, b).filter(|f| !self.is_identity(*f)) {
                    for &c in &self.objects {
                        for g in self.arrows(b, c).filter(|g| !self.is_identity(*g)) {
                            if let Some(h) = self.compose(f, g) {
                                out.entry(h).or_insert((f, g));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Non-identity arrows that are not composites of two non-identity
    /// arrows. These generate the category.
    pub fn irreducible_arrows(&self) -> Vec<Arrow> {
        let composite = self.factorizations();
        self.all_arrows().into_iter().filter(|f| !self.is_identity(*f) && !composite.contains_key(f)).collect()
    }

    /// Number of non-identity arrows per ordered pair.
    pub fn edge_multiset(&self) -> BTreeMap<(VertexId, VertexId), usize> {
        self.hom
            .iter()
            .map(|(&(a, b), h)| (a, b, h.classes.iter().filter(|c| !c.is_identity()).count()))
            .filter(|(_, _, n)| *n > 0)
            .map(|(a, b, n)| ((a, b), n))
            .collect()
    }
}

/// Reachability on grid vertices.
#[derive(Debug, Clone)]
pub struct Preorder {
    reach: Vec<Vec<bool>>,
    vertices: Vec<VertexId>,
}

impl Preorder {
    /// `x <= y`: a directed path from `x` to `y` exists.
    pub fn le(&self, x: VertexId, y: VertexId) -> bool {
        self.reach[x.index()][y.index()]
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.vertices.iter().all(|&x| self.vertices.iter().all(|&y| x == y || !(self.le(x, y) && self.le(y, x))))
    }
}

pub fn preorder(grid: &GridComplex) -> Preorder {
    let n = grid.vertex_slots();
    let mut reach = vec![vec![false; n]; n];
    for x in grid.vertices() {
        let row = &mut reach[x.index()];
        row[x.index()] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(w) = queue.pop_front() {
            for e in grid.out_edges(w) {
                let d = grid.edge(*e).dst;
                if !row[d.index()] {
                    row[d.index()] = true;
                    queue.push_back(d);
                }
            }
        }
    }
    Preorder { reach, vertices: grid.vertices().collect() }
}

/// True iff the grid digraph has a directed cycle (self-loops included).
pub fn has_directed_cycle(grid: &GridComplex) -> bool {
    let mut indeg = vec![0usize; grid.vertex_slots()];
    for e in grid.edges() {
        indeg[grid.edge(e).dst.index()] += 1;
    }
    let mut queue: VecDeque<VertexId> = grid.vertices().filter(|v| indeg[v.index()] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for e in grid.out_edges(v) {
            let d = grid.edge(*e).dst;
            indeg[d.index()] -= 1;
            if indeg[d.index()] == 0 {
                queue.push_back(d);
            }
        }
    }
    seen < grid.vertex_count()
}

/// Minimal and maximal points. A vertex is minimal iff no allowed edge
/// enters it: an entering edge from another vertex gives a strictly
/// smaller point, and a loop or cycle through it gives points below it
/// along the loop.
pub fn extremal_points(grid: &GridComplex) -> (Vec<VertexId>, Vec<VertexId>) {
    let mins = grid.vertices().filter(|v| grid.in_edges(*v).is_empty()).collect();
    let maxs = grid.vertices().filter(|v| grid.out_edges(*v).is_empty()).collect();
    (mins, maxs)
}

/// `Ext(X)` as one sorted set.
pub fn extremal_set(grid: &GridComplex) -> Vec<VertexId> {
    let (mins, maxs) = extremal_points(grid);
    mins.into_iter().chain(maxs).collect::<BTreeSet<_>>().into_iter().collect()
}

/// The full subcategory on the extremal points.
pub fn bipartite_graph(grid: &GridComplex, budget: Budget) -> Result<HomTable> {
    full_subcategory(grid, &extremal_set(grid), budget)
}

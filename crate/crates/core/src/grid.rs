//! Coordinate-compacted grid complex of a scene.
//!
//! Every cell is addressed by an ambient base index tuple and the set of
//! axes it spans. Gluing identifies the cells lying in the target
//! hyperplane with their translates in the source hyperplane; cells that
//! cross either hyperplane are never merged.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{format_point, validate_scene, Coord, CubicalScene, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub axis: usize,
    /// Canonical ambient base index tuple.
    pub base: Vec<usize>,
    pub src: VertexId,
    pub dst: VertexId,
}

/// An allowed 2-face. Traversing it from its base corner either goes
/// `first` then `second` axis, or the other way round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub base: Vec<usize>,
    pub axes: (usize, usize),
    /// `(edge along axes.0 from base, edge along axes.1 after it)`
    pub lower: (EdgeId, EdgeId),
    /// `(edge along axes.1 from base, edge along axes.0 after it)`
    pub upper: (EdgeId, EdgeId),
}

/// Per-axis union of closed intervals; a cell belongs to a window when its
/// closure fits inside one interval on every axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window(pub Vec<Vec<(Coord, Coord)>>);

impl Window {
    pub fn full(dim: usize) -> Self {
        Window(vec![vec![(Coord::zero(), Coord::one())]; dim])
    }

    /// A single closed box.
    pub fn closed_box(intervals: &[(Coord, Coord)]) -> Self {
        Window(intervals.iter().map(|iv| vec![*iv]).collect())
    }

    pub fn contains_point(&self, p: &[Coord]) -> bool {
        self.0.iter().zip(p).all(|(ivs, x)| ivs.iter().any(|(lo, hi)| lo <= x && x <= hi))
    }

    fn contains_span(&self, axis: usize, lo: &Coord, hi: &Coord) -> bool {
        self.0[axis].iter().any(|(a, b)| a <= lo && hi <= b)
    }
}

#[derive(Debug, Clone)]
pub struct GridComplex {
    dim: usize,
    coords: Vec<Vec<Coord>>,
    /// `(source index, target index)` of the glued pair on each axis.
    seams: Vec<Option<(usize, usize)>>,
    vertices: Vec<Vec<usize>>,
    vertex_lookup: HashMap<Vec<usize>, VertexId>,
    edges: Vec<Edge>,
    edge_lookup: HashMap<(usize, Vec<usize>), EdgeId>,
    squares: Vec<Square>,
    vertex_active: Vec<bool>,
    edge_active: Vec<bool>,
    square_active: Vec<bool>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    squares_from: Vec<Vec<usize>>,
    flip_table: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    boxes: Vec<crate::scene::OpenBox>,
}

/// Builds the grid complex of a validated scene.
pub fn compactify(scene: &CubicalScene) -> Result<GridComplex> {
    compactify_with(scene, &[])
}

/// Like [`compactify`], also cutting each axis at the given extra coordinates.
pub fn compactify_with(scene: &CubicalScene, extra: &[Vec<Coord>]) -> Result<GridComplex> {
    let scene = validate_scene(scene.clone())?;
    let dim = scene.dim;
    let mut cuts: Vec<BTreeSet<Coord>> = vec![BTreeSet::new(); dim];
    for axis_cuts in cuts.iter_mut() {
        axis_cuts.insert(Coord::zero());
        axis_cuts.insert(Coord::one());
    }
    for b in &scene.forbidden {
        for (axis, (lo, hi)) in b.0.iter().enumerate() {
            cuts[axis].insert(*lo);
            cuts[axis].insert(*hi);
        }
    }
    for id in &scene.identifications {
        cuts[id.axis].insert(id.source);
        cuts[id.axis].insert(id.target);
    }
    for p in scene.marked_points.values() {
        for (axis, x) in p.iter().enumerate() {
            cuts[axis].insert(*x);
        }
    }
    for (axis, xs) in extra.iter().enumerate().take(dim) {
        for x in xs {
            if *x >= Coord::zero() && *x <= Coord::one() {
                cuts[axis].insert(*x);
            }
        }
    }
    let coords: Vec<Vec<Coord>> = cuts.into_iter().map(|s| s.into_iter().collect()).collect();
    let mut seams = vec![None; dim];
    for id in &scene.identifications {
        let s = coords[id.axis].binary_search(&id.source).expect("cut");
        let t = coords[id.axis].binary_search(&id.target).expect("cut");
        seams[id.axis] = Some((s, t));
    }
    Ok(GridComplex::build(dim, coords, seams, scene.forbidden.clone()))
}

impl GridComplex {
    fn build(dim: usize, coords: Vec<Vec<Coord>>, seams: Vec<Option<(usize, usize)>>, boxes: Vec<crate::scene::OpenBox>) -> Self {
        let mut grid = GridComplex {
            dim,
            coords,
            seams,
            vertices: Vec::new(),
            vertex_lookup: HashMap::new(),
            edges: Vec::new(),
            edge_lookup: HashMap::new(),
            squares: Vec::new(),
            vertex_active: Vec::new(),
            edge_active: Vec::new(),
            square_active: Vec::new(),
            out_edges: Vec::new(),
            in_edges: Vec::new(),
            squares_from: Vec::new(),
            flip_table: HashMap::new(),
            boxes,
        };

        let all_bases = grid.ambient_points();
        let mut verts: Vec<Vec<usize>> = all_bases
            .iter()
            .filter(|b| grid.is_canonical(b, &[]) && grid.cell_allowed(b, &[]))
            .cloned()
            .collect();
        verts.sort();
        for (i, v) in verts.iter().enumerate() {
            grid.vertex_lookup.insert(v.clone(), VertexId(i as u32));
        }
        grid.vertices = verts;

        let mut edges = Vec::new();
        for axis in 0..dim {
            for b in &all_bases {
                if b[axis] + 1 >= grid.coords[axis].len() {
                    continue;
                }
                if !grid.is_canonical(b, &[axis]) || !grid.cell_allowed(b, &[axis]) {
                    continue;
                }
                let src = grid.vertex_of_indices(b).expect("face of allowed edge");
                let mut top = b.clone();
                top[axis] += 1;
                let dst = grid.vertex_of_indices(&top).expect("face of allowed edge");
                edges.push(Edge { axis, base: b.clone(), src, dst });
            }
        }
        edges.sort_by(|x, y| (x.axis, &x.base).cmp(&(y.axis, &y.base)));
        for (i, e) in edges.iter().enumerate() {
            grid.edge_lookup.insert((e.axis, e.base.clone()), EdgeId(i as u32));
        }
        grid.edges = edges;

        for p in 0..dim {
            for qa in (p + 1)..dim {
                for b in &all_bases {
                    if b[p] + 1 >= grid.coords[p].len() || b[qa] + 1 >= grid.coords[qa].len() {
                        continue;
                    }
                    let axes = [p, qa];
                    if !grid.is_canonical(b, &axes) || !grid.cell_allowed(b, &axes) {
                        continue;
                    }
                    let mut bp = b.clone();
                    bp[p] += 1;
                    let mut bq = b.clone();
                    bq[qa] += 1;
                    let e = |base: &Vec<usize>, axis: usize| grid.edge_of_indices(base, axis).expect("face of allowed square");
                    let lower = (e(b, p), e(&bp, qa));
                    let upper = (e(b, qa), e(&bq, p));
                    grid.squares.push(Square { base: b.clone(), axes: (p, qa), lower, upper });
                }
            }
        }

        grid.vertex_active = vec![true; grid.vertices.len()];
        grid.edge_active = vec![true; grid.edges.len()];
        grid.square_active = vec![true; grid.squares.len()];
        grid.rebuild_adjacency();
        grid
    }

    fn rebuild_adjacency(&mut self) {
        let n = self.vertices.len();
        self.out_edges = vec![Vec::new(); n];
        self.in_edges = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            if self.edge_active[i] {
                self.out_edges[e.src.index()].push(EdgeId(i as u32));
                self.in_edges[e.dst.index()].push(EdgeId(i as u32));
            }
        }
        self.squares_from = vec![Vec::new(); n];
        self.flip_table.clear();
        for (i, sq) in self.squares.iter().enumerate() {
            if !self.square_active[i] {
                continue;
            }
            let from = self.edges[sq.lower.0.index()].src;
            self.squares_from[from.index()].push(i);
            self.flip_table.insert(sq.lower, sq.upper);
            self.flip_table.insert(sq.upper, sq.lower);
        }
    }

    fn ambient_points(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for axis in 0..self.dim {
            let n = self.coords[axis].len();
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (0..n).map(move |i| {
                        let mut v = prefix.clone();
                        v.push(i);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// A cell spanning `axes` is stored under its source-side copy.
    fn is_canonical(&self, base: &[usize], axes: &[usize]) -> bool {
        self.seams.iter().enumerate().all(|(k, seam)| match seam {
            Some((_, t)) if !axes.contains(&k) => base[k] != *t,
            _ => true,
        })
    }

    fn canonicalize(&self, base: &[usize], axes: &[usize]) -> Vec<usize> {
        let mut b = base.to_vec();
        for (k, seam) in self.seams.iter().enumerate() {
            if let Some((s, t)) = seam {
                if !axes.contains(&k) && b[k] == *t {
                    b[k] = *s;
                }
            }
        }
        b
    }

    /// Every ambient copy of a canonical cell.
    fn copies(&self, base: &[usize], axes: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![base.to_vec()];
        for (k, seam) in self.seams.iter().enumerate() {
            if let Some((s, t)) = seam {
                if !axes.contains(&k) && base[k] == *s {
                    let extra: Vec<Vec<usize>> = out
                        .iter()
                        .map(|b| {
                            let mut c = b.clone();
                            c[k] = *t;
                            c
                        })
                        .collect();
                    out.extend(extra);
                }
            }
        }
        out
    }

    fn cell_allowed(&self, base: &[usize], axes: &[usize]) -> bool {
        !self.boxes.iter().any(|bx| {
            bx.0.iter().enumerate().all(|(k, (lo, hi))| {
                let a = &self.coords[k][base[k]];
                if axes.contains(&k) {
                    let b = &self.coords[k][base[k] + 1];
                    a.max(lo) < b.min(hi)
                } else {
                    lo < a && a < hi
                }
            })
        })
    }

    fn vertex_of_indices(&self, idx: &[usize]) -> Option<VertexId> {
        self.vertex_lookup.get(&self.canonicalize(idx, &[])).copied()
    }

    fn edge_of_indices(&self, base: &[usize], axis: usize) -> Option<EdgeId> {
        self.edge_lookup.get(&(axis, self.canonicalize(base, &[axis]))).copied()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self, axis: usize) -> &[Coord] {
        &self.coords[axis]
    }

    pub fn seam(&self, axis: usize) -> Option<(usize, usize)> {
        self.seams[axis]
    }

    pub fn has_identifications(&self) -> bool {
        self.seams.iter().any(Option::is_some)
    }

    pub fn boxes(&self) -> &[crate::scene::OpenBox] {
        &self.boxes
    }

    /// All active vertices in canonical order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).filter(|&i| self.vertex_active[i]).map(|i| VertexId(i as u32))
    }

    /// Size of the shared vertex id space, active or not.
    pub fn vertex_slots(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_active.iter().filter(|a| **a).count()
    }

    pub fn is_vertex(&self, v: VertexId) -> bool {
        self.vertex_active.get(v.index()).copied().unwrap_or(false)
    }

    pub fn vertex_indices(&self, v: VertexId) -> &[usize] {
        &self.vertices[v.index()]
    }

    pub fn vertex_point(&self, v: VertexId) -> Point {
        self.vertices[v.index()].iter().enumerate().map(|(k, &i)| self.coords[k][i]).collect()
    }

    pub fn vertex_label(&self, v: VertexId) -> String {
        format_point(&self.vertex_point(v))
    }

    /// The vertex at an exact grid point; `None` if the point is not a
    /// grid point, lies in a forbidden box, or is outside this (sub)grid.
    pub fn vertex_at(&self, p: &[Coord]) -> Option<VertexId> {
        if p.len() != self.dim {
            return None;
        }
        let idx: Option<Vec<usize>> = p.iter().enumerate().map(|(k, x)| self.coords[k].binary_search(x).ok()).collect();
        let v = self.vertex_of_indices(&idx?)?;
        self.is_vertex(v).then_some(v)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.edge_active.iter().filter(|a| **a).count()
    }

    pub fn is_edge(&self, e: EdgeId) -> bool {
        self.edge_active.get(e.index()).copied().unwrap_or(false)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(|&i| self.edge_active[i]).map(|i| EdgeId(i as u32))
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.index()]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.index()]
    }

    /// The active edge leaving `v` along `axis`, if it is unique.
    pub fn step_along(&self, v: VertexId, axis: usize) -> Result<Option<EdgeId>> {
        let mut it = self.out_edges(v).iter().filter(|e| self.edges[e.index()].axis == axis);
        let first = it.next().copied();
        if it.next().is_some() {
            return Err(Error::InvalidPath(format!("step along axis {axis} from {} is ambiguous at a glued hyperplane", self.vertex_label(v))));
        }
        Ok(first)
    }

    pub fn square_count(&self) -> usize {
        self.square_active.iter().filter(|a| **a).count()
    }

    pub fn squares(&self) -> impl Iterator<Item = &Square> + '_ {
        self.squares.iter().enumerate().filter(|(i, _)| self.square_active[*i]).map(|(_, s)| s)
    }

    /// Active squares whose base corner is `v`.
    pub fn squares_from(&self, v: VertexId) -> impl Iterator<Item = &Square> + '_ {
        self.squares_from[v.index()].iter().map(|&i| &self.squares[i])
    }

    /// The other side of the 2-face whose one side is `e1` then `e2`.
    pub fn flip_partner(&self, e1: EdgeId, e2: EdgeId) -> Option<(EdgeId, EdgeId)> {
        self.flip_table.get(&(e1, e2)).copied()
    }

    /// Top-dimensional ambient cells as `(base indices, allowed)`, without
    /// quotienting.
    pub fn top_cells(&self) -> Vec<(Vec<usize>, bool)> {
        let axes: Vec<usize> = (0..self.dim).collect();
        self.ambient_points()
            .into_iter()
            .filter(|b| (0..self.dim).all(|k| b[k] + 1 < self.coords[k].len()))
            .map(|b| {
                let ok = self.cell_allowed(&b, &axes);
                (b, ok)
            })
            .collect()
    }

    /// True iff the point lies in an allowed closed cell of the grid, i.e.
    /// is not interior to a forbidden box.
    pub fn point_allowed(&self, p: &[Coord]) -> bool {
        !self.boxes.iter().any(|b| b.contains(p))
    }

    fn in_window(&self, window: &Window, base: &[usize], axes: &[usize]) -> bool {
        self.copies(base, axes).iter().any(|b| {
            (0..self.dim).all(|k| {
                let lo = &self.coords[k][b[k]];
                let hi = if axes.contains(&k) { &self.coords[k][b[k] + 1] } else { lo };
                window.contains_span(k, lo, hi)
            })
        })
    }

    /// The subcomplex of cells whose closure lies in `window`. Vertex and
    /// edge ids are shared with `self`.
    pub fn restrict(&self, window: &Window) -> GridComplex {
        let mut sub = self.clone();
        for (i, v) in self.vertices.iter().enumerate() {
            sub.vertex_active[i] = self.vertex_active[i] && self.in_window(window, v, &[]);
        }
        for (i, e) in self.edges.iter().enumerate() {
            sub.edge_active[i] = self.edge_active[i] && self.in_window(window, &e.base, &[e.axis]);
        }
        for (i, s) in self.squares.iter().enumerate() {
            sub.square_active[i] = self.square_active[i] && self.in_window(window, &s.base, &[s.axes.0, s.axes.1]);
        }
        sub.rebuild_adjacency();
        sub
    }

    /// Grid vertices inside a closed window.
    pub fn vertices_in(&self, window: &Window) -> Vec<VertexId> {
        self.vertices().filter(|v| self.in_window(window, &self.vertices[v.index()], &[])).collect()
    }

    /// Bottom corner `(0,..,0)` if it is a vertex.
    pub fn bottom(&self) -> Option<VertexId> {
        self.vertex_at(&vec![Coord::zero(); self.dim])
    }

    pub fn top(&self) -> Option<VertexId> {
        self.vertex_at(&vec![Coord::one(); self.dim])
    }
}

//! Directed lattice paths and their dihomotopy classes.
//!
//! Two paths with the same endpoints are dihomotopic when they are linked
//! by elementary flips: swapping two consecutive steps along distinct axes
//! whenever the 2-face they span is allowed.
//!
//! [`ClassIndex`] computes the classes out of a fixed source one length
//! layer at a time. A path of length `l+1` is a class of length `l`
//! followed by an edge; such extensions are identified when their prefixes
//! agree, or when the last two steps are the two sides of an allowed
//! 2-face. This is the same equivalence as flip-closure over all paths,
//! which [`classes_by_flips`] computes by brute force for cross-checking.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{EdgeId, GridComplex, VertexId};
use crate::union_find::UnionFind;

/// A directed edge path. Steps are edges rather than axes so that a path
/// through a glued hyperplane is unambiguous.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePath {
    pub start: VertexId,
    pub steps: Vec<EdgeId>,
}

impl LatticePath {
    pub fn constant(v: VertexId) -> Self {
        LatticePath { start: v, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Builds a path from axis indices; fails if a step is blocked or
    /// ambiguous.
    pub fn from_axes(grid: &GridComplex, start: VertexId, axes: &[usize]) -> Result<Self> {
        let mut v = start;
        let mut steps = Vec::with_capacity(axes.len());
        for &axis in axes {
            let e = grid
                .step_along(v, axis)?
                .ok_or_else(|| Error::InvalidPath(format!("no allowed step along axis {axis} from {}", grid.vertex_label(v))))?;
            steps.push(e);
            v = grid.edge(e).dst;
        }
        Ok(LatticePath { start, steps })
    }

    pub fn axes(&self, grid: &GridComplex) -> Vec<usize> {
        self.steps.iter().map(|e| grid.edge(*e).axis).collect()
    }

    pub fn end(&self, grid: &GridComplex) -> VertexId {
        self.steps.last().map(|e| grid.edge(*e).dst).unwrap_or(self.start)
    }

    /// Vertex sequence, `len() + 1` entries.
    pub fn vertices(&self, grid: &GridComplex) -> Vec<VertexId> {
        let mut out = vec![self.start];
        out.extend(self.steps.iter().map(|e| grid.edge(*e).dst));
        out
    }

    /// Checks that the path is connected and uses active edges only.
    pub fn validate(&self, grid: &GridComplex) -> Result<()> {
        if !grid.is_vertex(self.start) {
            return Err(Error::NotAVertex(self.start));
        }
        let mut v = self.start;
        for (i, e) in self.steps.iter().enumerate() {
            if !grid.is_edge(*e) {
                return Err(Error::InvalidPath(format!("step {i} is not an allowed edge")));
            }
            let edge = grid.edge(*e);
            if edge.src != v {
                return Err(Error::InvalidPath(format!("step {i} does not start where step {} ended", i.saturating_sub(1))));
            }
            v = edge.dst;
        }
        Ok(())
    }

    pub fn concat(&self, other: &LatticePath) -> LatticePath {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        LatticePath { start: self.start, steps }
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[", self.start)?;
        for (i, e) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", e.0)?;
        }
        write!(f, "]")
    }
}

/// Bounds for path enumeration and loop unwinding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_paths: usize,
    pub max_steps: usize,
}

impl Budget {
    pub fn new(max_paths: usize, max_steps: usize) -> Self {
        Budget { max_paths: max_paths.max(1), max_steps }
    }

    /// Enough steps for every path of a loop-free grid.
    pub fn for_grid(grid: &GridComplex) -> Self {
        let longest: usize = (0..grid.dim()).map(|k| grid.coords(k).len() - 1).sum();
        Budget::new(1_000_000, longest.max(1))
    }

    pub fn with_max_steps(self, max_steps: usize) -> Self {
        Budget::new(self.max_paths, max_steps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DihomotopyClass {
    pub source: VertexId,
    pub target: VertexId,
    /// Lexicographically least member.
    pub canonical: LatticePath,
    /// All members, when computed by enumeration.
    pub members: Option<Vec<LatticePath>>,
}

#[allow(clippy::len_without_is_empty)]
impl DihomotopyClass {
    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.canonical.is_empty()
    }
}

/// Classes between two vertices, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassList {
    pub classes: Vec<DihomotopyClass>,
    /// False when paths longer than the step budget exist.
    pub exact: bool,
}

/// All allowed paths `u -> v` of length at most `budget.max_steps`, in
/// lexicographic order of their edge sequences.
pub fn enumerate_dipaths(grid: &GridComplex, u: VertexId, v: VertexId, budget: Budget) -> Result<Vec<LatticePath>> {
    check_vertex(grid, u)?;
    check_vertex(grid, v)?;
    let reaches_v = coreachable(grid, v);
    let mut out = Vec::new();
    let mut stack: Vec<EdgeId> = Vec::new();
    let mut frames: Vec<(VertexId, usize)> = vec![(u, 0)];
    if u == v {
        out.push(LatticePath::constant(u));
    }
    while let Some((w, next)) = frames.pop() {
        let outs = grid.out_edges(w);
        if next >= outs.len() || stack.len() >= budget.max_steps {
            stack.pop();
            continue;
        }
        frames.push((w, next + 1));
        let e = outs[next];
        let dst = grid.edge(e).dst;
        if !reaches_v[dst.index()] {
            continue;
        }
        stack.push(e);
        if dst == v {
            out.push(LatticePath { start: u, steps: stack.clone() });
            if out.len() > budget.max_paths {
                return Err(Error::BudgetExceeded { max_paths: budget.max_paths });
            }
        }
        frames.push((dst, 0));
    }
    Ok(out)
}

/// Swaps steps `i` and `i+1` across the 2-face they span, if allowed.
pub fn flip(grid: &GridComplex, path: &LatticePath, i: usize) -> Option<LatticePath> {
    if i + 1 >= path.steps.len() {
        return None;
    }
    let (a, b) = grid.flip_partner(path.steps[i], path.steps[i + 1])?;
    let mut steps = path.steps.clone();
    steps[i] = a;
    steps[i + 1] = b;
    Some(LatticePath { start: path.start, steps })
}

/// Dihomotopy classes of paths `u -> v`.
pub fn classes(grid: &GridComplex, u: VertexId, v: VertexId, budget: Budget) -> Result<ClassList> {
    check_vertex(grid, v)?;
    let index = ClassIndex::build(grid, u, budget)?;
    Ok(index.class_list(grid, v))
}

/// Brute-force classes: enumerate every path, then close under flips with
/// union-find.
pub fn classes_by_flips(grid: &GridComplex, u: VertexId, v: VertexId, budget: Budget) -> Result<ClassList> {
    let paths = enumerate_dipaths(grid, u, v, budget)?;
    let lookup: HashMap<&[EdgeId], usize> = paths.iter().enumerate().map(|(i, p)| (p.steps.as_slice(), i)).collect();
    let mut uf = UnionFind::new(paths.len());
    for (i, p) in paths.iter().enumerate() {
        for pos in 0..p.steps.len().saturating_sub(1) {
            if let Some(f) = flip(grid, p, pos) {
                let j = lookup[f.steps.as_slice()];
                uf.union(i, j);
            }
        }
    }
    let mut classes: Vec<DihomotopyClass> = uf
        .groups()
        .into_iter()
        .map(|group| {
            let members: Vec<LatticePath> = group.iter().map(|&i| paths[i].clone()).collect();
            let canonical = members.iter().min().cloned().expect("nonempty group");
            DihomotopyClass { source: u, target: v, canonical, members: Some(members) }
        })
        .collect();
    classes.sort_by(|a, b| a.canonical.steps.cmp(&b.canonical.steps));
    let exact = !longer_paths_exist(grid, u, v, budget.max_steps);
    Ok(ClassList { classes, exact })
}

/// Per box, whether the path passes above it. Only meaningful in two
/// dimensions without gluing.
pub fn signature_2d(grid: &GridComplex, path: &LatticePath) -> Result<Vec<bool>> {
    if grid.dim() != 2 || grid.has_identifications() {
        return Err(Error::NotTwoDimensional);
    }
    path.validate(grid)?;
    let xs = grid.coords(0);
    let ys = grid.coords(1);
    let ux = grid.vertex_indices(path.start)[0];
    let vx = grid.vertex_indices(path.end(grid))[0];
    let sig = grid
        .boxes()
        .iter()
        .map(|b| {
            let (lo, hi) = b.0[0];
            let lo_i = xs.binary_search(&lo).expect("box endpoint is a cut");
            let hi_i = xs.binary_search(&hi).expect("box endpoint is a cut");
            if vx <= lo_i || ux >= hi_i {
                return false;
            }
            let probe = lo_i.max(ux);
            let top = b.0[1].1;
            path.steps
                .iter()
                .map(|e| grid.edge(*e))
                .find(|e| e.axis == 0 && e.base[0] == probe)
                .map(|e| ys[e.base[1]] >= top)
                .unwrap_or(false)
        })
        .collect();
    Ok(sig)
}

fn check_vertex(grid: &GridComplex, v: VertexId) -> Result<()> {
    if grid.is_vertex(v) {
        Ok(())
    } else {
        Err(Error::NotAVertex(v))
    }
}

/// `mask[w]` iff `w` reaches `v` (including `v` itself).
pub fn coreachable(grid: &GridComplex, v: VertexId) -> Vec<bool> {
    let mut mask = vec![false; grid.vertex_slots()];
    let mut queue = VecDeque::from([v]);
    mask[v.index()] = true;
    while let Some(w) = queue.pop_front() {
        for e in grid.in_edges(w) {
            let s = grid.edge(*e).src;
            if !mask[s.index()] {
                mask[s.index()] = true;
                queue.push_back(s);
            }
        }
    }
    mask
}

/// `mask[w]` iff `u` reaches `w`.
pub fn reachable(grid: &GridComplex, u: VertexId) -> Vec<bool> {
    let mut mask = vec![false; grid.vertex_slots()];
    let mut queue = VecDeque::from([u]);
    mask[u.index()] = true;
    while let Some(w) = queue.pop_front() {
        for e in grid.out_edges(w) {
            let d = grid.edge(*e).dst;
            if !mask[d.index()] {
                mask[d.index()] = true;
                queue.push_back(d);
            }
        }
    }
    mask
}

/// True iff some path `u -> v` is longer than `max_steps`.
pub fn longer_paths_exist(grid: &GridComplex, u: VertexId, v: VertexId, max_steps: usize) -> bool {
    let reaches_v = coreachable(grid, v);
    let mut layer: HashSet<VertexId> = HashSet::from([u]);
    for _ in 0..max_steps {
        layer = layer
            .iter()
            .flat_map(|w| grid.out_edges(*w).iter().map(|e| grid.edge(*e).dst))
            .filter(|d| reaches_v[d.index()])
            .collect();
        if layer.is_empty() {
            return false;
        }
    }
    layer.iter().any(|w| grid.out_edges(*w).iter().any(|e| reaches_v[grid.edge(*e).dst.index()]))
}

#[derive(Debug, Clone)]
struct ClassNode {
    vertex: VertexId,
    canonical: Vec<EdgeId>,
}

/// Every dihomotopy class out of one source vertex, up to a length bound.
#[derive(Debug, Clone)]
pub struct ClassIndex {
    source: VertexId,
    max_steps: usize,
    nodes: Vec<ClassNode>,
    next: HashMap<(u32, EdgeId), u32>,
    by_vertex: BTreeMap<VertexId, Vec<u32>>,
    /// Vertices of the classes of maximal length that still have an
    /// outgoing edge; empty when nothing was cut off.
    frontier: Vec<VertexId>,
}

impl ClassIndex {
    pub fn build(grid: &GridComplex, source: VertexId, budget: Budget) -> Result<Self> {
        check_vertex(grid, source)?;
        let mut idx = ClassIndex {
            source,
            max_steps: budget.max_steps,
            nodes: vec![ClassNode { vertex: source, canonical: Vec::new() }],
            next: HashMap::new(),
            by_vertex: BTreeMap::new(),
            frontier: Vec::new(),
        };
        let mut prev: Vec<u32> = Vec::new();
        let mut layer: Vec<u32> = vec![0];
        for _ in 0..budget.max_steps {
            let mut items: Vec<(u32, EdgeId)> = Vec::new();
            for &c in &layer {
                for &e in grid.out_edges(idx.nodes[c as usize].vertex) {
                    items.push((c, e));
                }
            }
            if items.is_empty() {
                break;
            }
            let item_of: HashMap<(u32, EdgeId), usize> = items.iter().enumerate().map(|(i, it)| (*it, i)).collect();
            let mut uf = UnionFind::new(items.len());
            for &d in &prev {
                for sq in grid.squares_from(idx.nodes[d as usize].vertex) {
                    let c1 = idx.next[&(d, sq.lower.0)];
                    let c2 = idx.next[&(d, sq.upper.0)];
                    uf.union(item_of[&(c1, sq.lower.1)], item_of[&(c2, sq.upper.1)]);
                }
            }
            let mut fresh: Vec<(ClassNode, Vec<usize>)> = uf
                .groups()
                .into_iter()
                .map(|group| {
                    let canonical = group
                        .iter()
                        .map(|&i| {
                            let (c, e) = items[i];
                            let mut s = idx.nodes[c as usize].canonical.clone();
                            s.push(e);
                            s
                        })
                        .min()
                        .expect("nonempty group");
                    let vertex = grid.edge(items[group[0]].1).dst;
                    (ClassNode { vertex, canonical }, group)
                })
                .collect();
            fresh.sort_by(|a, b| (a.0.vertex, &a.0.canonical).cmp(&(b.0.vertex, &b.0.canonical)));
            if idx.nodes.len() + fresh.len() > budget.max_paths {
                return Err(Error::BudgetExceeded { max_paths: budget.max_paths });
            }
            prev = std::mem::take(&mut layer);
            for (node, group) in fresh {
                let id = idx.nodes.len() as u32;
                for i in group {
                    idx.next.insert(items[i], id);
                }
                idx.nodes.push(node);
                layer.push(id);
            }
        }
        idx.frontier = layer
            .iter()
            .map(|&c| idx.nodes[c as usize].vertex)
            .filter(|w| !grid.out_edges(*w).is_empty())
            .collect();
        idx.frontier.sort();
        idx.frontier.dedup();
        for (i, n) in idx.nodes.iter().enumerate() {
            idx.by_vertex.entry(n.vertex).or_default().push(i as u32);
        }
        for ids in idx.by_vertex.values_mut() {
            let nodes = &idx.nodes;
            ids.sort_by(|a, b| nodes[*a as usize].canonical.cmp(&nodes[*b as usize].canonical));
        }
        Ok(idx)
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    /// Number of classes out of the source, over all targets.
    pub fn class_count(&self) -> usize {
        self.nodes.len()
    }

    /// Classes to `v`, in canonical order.
    pub fn class_list(&self, grid: &GridComplex, v: VertexId) -> ClassList {
        let classes = self
            .by_vertex
            .get(&v)
            .map(|ids| {
                ids.iter()
                    .map(|&i| DihomotopyClass {
                        source: self.source,
                        target: v,
                        canonical: LatticePath { start: self.source, steps: self.nodes[i as usize].canonical.clone() },
                        members: None,
                    })
                    .collect()
            })
            .unwrap_or_default();
        ClassList { classes, exact: self.is_exact_to(grid, v) }
    }

    /// False iff a path to `v` longer than the bound exists.
    pub fn is_exact_to(&self, grid: &GridComplex, v: VertexId) -> bool {
        if self.frontier.is_empty() {
            return true;
        }
        let reaches_v = coreachable(grid, v);
        !self
            .frontier
            .iter()
            .any(|w| grid.out_edges(*w).iter().any(|e| reaches_v[grid.edge(*e).dst.index()]))
    }

    /// Canonical representative of the class of `path`, or `None` when the
    /// path does not start at the source or exceeds the bound.
    pub fn canonical_of(&self, path: &LatticePath) -> Option<LatticePath> {
        if path.start != self.source {
            return None;
        }
        let mut node = 0u32;
        for e in &path.steps {
            node = *self.next.get(&(node, *e))?;
        }
        Some(LatticePath { start: self.source, steps: self.nodes[node as usize].canonical.clone() })
    }

    /// Position of the class of `path` among the classes to its endpoint.
    pub fn position_of(&self, path: &LatticePath) -> Option<(VertexId, usize)> {
        if path.start != self.source {
            return None;
        }
        let mut node = 0u32;
        for e in &path.steps {
            node = *self.next.get(&(node, *e))?;
        }
        let v = self.nodes[node as usize].vertex;
        let pos = self.by_vertex[&v].iter().position(|&n| n == node)?;
        Some((v, pos))
    }
}

//! Gluing fundamental categories along a two-piece cover.
//!
//! Pieces are subcomplexes of one grid, so vertex and edge ids are shared
//! and the object sets of the pieces are glued along their common vertices
//! without renaming.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::category::{extremal_set, full_subcategory, Arrow, HomTable};
use crate::dipath::{Budget, LatticePath};
use crate::error::{Error, Result};
use crate::fincat::FiniteCategory;
use crate::grid::{GridComplex, VertexId, Window};
use crate::model::{verify_extremal_model, verify_extremal_model_bounded, ChainReport, RetractChain};
use crate::retract::{check_adjunction, Direction, induced_functor, verify_retract, verify_retract_bounded, RetractData, RetractReport};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub x1: Window,
    pub x2: Window,
    pub a1: Vec<VertexId>,
    pub a2: Vec<VertexId>,
    /// Optional intermediate object sets with `A_k ⊆ B_k ⊆ X_k`.
    pub b: Option<(Vec<VertexId>, Vec<VertexId>)>,
}

/// `X₁`, `X₂` and `X₀ = X₁ ∩ X₂` as subcomplexes of the glued grid.
#[derive(Debug, Clone)]
pub struct CoverPieces {
    pub x1: GridComplex,
    pub x2: GridComplex,
    pub x0: GridComplex,
}

impl CoverPieces {
    pub fn piece(&self, k: u8) -> &GridComplex {
        match k {
            1 => &self.x1,
            2 => &self.x2,
            _ => &self.x0,
        }
    }
}

fn sorted(v: &[VertexId]) -> Vec<VertexId> {
    v.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn intersect(x: &[VertexId], y: &[VertexId]) -> Vec<VertexId> {
    let y: BTreeSet<_> = y.iter().collect();
    sorted(&x.iter().copied().filter(|v| y.contains(v)).collect::<Vec<_>>())
}

fn union(x: &[VertexId], y: &[VertexId]) -> Vec<VertexId> {
    sorted(&x.iter().chain(y).copied().collect::<Vec<_>>())
}

impl Cover {
    pub fn new(x1: Window, x2: Window, a1: &[VertexId], a2: &[VertexId]) -> Self {
        Cover { x1, x2, a1: sorted(a1), a2: sorted(a2), b: None }
    }

    pub fn a0(&self) -> Vec<VertexId> {
        intersect(&self.a1, &self.a2)
    }

    pub fn a(&self) -> Vec<VertexId> {
        union(&self.a1, &self.a2)
    }

    pub fn pieces(&self, grid: &GridComplex) -> CoverPieces {
        let x1 = grid.restrict(&self.x1);
        let x2 = grid.restrict(&self.x2);
        let x0 = x1.restrict(&self.x2);
        CoverPieces { x1, x2, x0 }
    }
}

/// Every edge and every 2-face of the grid lies in a piece, and the object
/// sets sit in their pieces.
pub fn validate_cover(grid: &GridComplex, cover: &Cover) -> Result<CoverPieces> {
    let pieces = cover.pieces(grid);
    if let Some(e) = grid.edges().find(|e| !pieces.x1.is_edge(*e) && !pieces.x2.is_edge(*e)) {
        let edge = grid.edge(e);
        return Err(Error::CoverInvalid(format!("edge from {} along axis {} lies in neither piece", grid.vertex_label(edge.src), edge.axis)));
    }
    let in_piece = |g: &GridComplex, s: &crate::grid::Square| g.flip_partner(s.lower.0, s.lower.1).is_some();
    if let Some(s) = grid.squares().find(|s| !in_piece(&pieces.x1, s) && !in_piece(&pieces.x2, s)) {
        return Err(Error::CoverInvalid(format!("2-face at {:?} lies in neither piece", s.base)));
    }
    let check = |set: &[VertexId], g: &GridComplex, name: &str| -> Result<()> {
        match set.iter().find(|v| !g.is_vertex(**v)) {
            Some(v) => Err(Error::CoverInvalid(format!("{} is in {name} but not in its piece", grid.vertex_label(*v)))),
            None => Ok(()),
        }
    };
    check(&cover.a1, &pieces.x1, "A1")?;
    check(&cover.a2, &pieces.x2, "A2")?;
    if let Some((b1, b2)) = &cover.b {
        check(b1, &pieces.x1, "B1")?;
        check(b2, &pieces.x2, "B2")?;
        if !cover.a1.iter().all(|v| b1.contains(v)) || !cover.a2.iter().all(|v| b2.contains(v)) {
            return Err(Error::CoverInvalid("A_k must be contained in B_k".into()));
        }
    }
    Ok(pieces)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub path: LatticePath,
    pub piece: u8,
}

/// Splits a path into maximal segments each lying in one piece, preferring
/// piece 1 on the overlap.
pub fn decompose_path(grid: &GridComplex, cover: &Cover, path: &LatticePath) -> Result<Vec<Segment>> {
    path.validate(grid)?;
    let pieces = cover.pieces(grid);
    let mut out: Vec<Segment> = Vec::new();
    let mut v = path.start;
    for &e in &path.steps {
        let fits = |k: u8| pieces.piece(k).is_edge(e);
        match out.last_mut() {
            Some(seg) if fits(seg.piece) => seg.path.steps.push(e),
            _ => {
                let piece = if fits(1) {
                    1
                } else if fits(2) {
                    2
                } else {
                    return Err(Error::CoverInvalid(format!("edge from {} lies in neither piece", grid.vertex_label(v))));
                };
                out.push(Segment { path: LatticePath { start: v, steps: vec![e] }, piece });
            }
        }
        v = grid.edge(e).dst;
    }
    if out.is_empty() {
        out.push(Segment { path: path.clone(), piece: 1 });
    }
    Ok(out)
}

/// One generating arrow of a presentation: an irreducible class of a piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub piece: u8,
    pub from: VertexId,
    pub to: VertexId,
    pub path: LatticePath,
}

pub type Word = Vec<usize>;

/// A finitely presented category. `words[k]` sends each arrow of the piece
/// table `T_{k+1}` to a generator word for its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatPresentation {
    pub objects: Vec<VertexId>,
    pub generators: Vec<Generator>,
    pub relations: Vec<(Word, Word)>,
    pub words: [BTreeMap<Arrow, Word>; 2],
}

impl CatPresentation {
    pub fn word_source(&self, w: &[usize], empty: VertexId) -> VertexId {
        w.first().map(|g| self.generators[*g].from).unwrap_or(empty)
    }

    /// The path obtained by concatenating generator representatives.
    pub fn evaluate(&self, start: VertexId, w: &[usize]) -> LatticePath {
        let mut p = LatticePath::constant(start);
        for g in w {
            p.steps.extend_from_slice(&self.generators[*g].path.steps);
        }
        p
    }
}

fn piece_words(table: &HomTable, piece: u8, generators: &mut Vec<Generator>) -> BTreeMap<Arrow, Word> {
    let fact = table.factorizations();
    let mut words = BTreeMap::new();
    for f in table.irreducible_arrows() {
        words.insert(f, vec![generators.len()]);
        generators.push(Generator { piece, from: f.from, to: f.to, path: table.representative(f).clone() });
    }
    fn word_of(f: Arrow, table: &HomTable, fact: &BTreeMap<Arrow, (Arrow, Arrow)>, words: &mut BTreeMap<Arrow, Word>) -> Word {
        if let Some(w) = words.get(&f) {
            return w.clone();
        }
        let w = if table.is_identity(f) {
            Vec::new()
        } else {
            let (g, h) = fact[&f];
            let mut w = word_of(g, table, fact, words);
            w.extend(word_of(h, table, fact, words));
            w
        };
        words.insert(f, w.clone());
        w
    }
    for f in table.all_arrows() {
        word_of(f, table, &fact, &mut words);
    }
    words
}

/// Checks that `T₀ → T_k` sends classes to classes, injectively per
/// hom-set, and preserves composition.
fn check_inclusion(t0: &HomTable, tk: &HomTable, k: u8) -> Result<BTreeMap<Arrow, Arrow>> {
    let mut map = BTreeMap::new();
    for f in t0.all_arrows() {
        let image = tk.arrow_of(t0.representative(f)).ok_or_else(|| {
            Error::InclusionNotFunctorial(format!("class {} of {}→{} has no image in piece {k}", f.index, f.from, f.to))
        })?;
        map.insert(f, image);
    }
    let mut seen = BTreeMap::new();
    for (f, g) in &map {
        if let Some(other) = seen.insert(*g, *f) {
            return Err(Error::InclusionNotFunctorial(format!(
                "classes {} and {} of {}→{} merge in piece {k}",
                other.index, f.index, f.from, f.to
            )));
        }
    }
    for &f in map.keys() {
        for &c in t0.objects() {
            for g in t0.arrows(f.to, c) {
                if let Some(h) = t0.compose(f, g) {
                    if tk.compose(map[&f], map[&g]) != Some(map[&h]) {
                        return Err(Error::InclusionNotFunctorial(format!("composite {}→{}→{} is not preserved in piece {k}", f.from, f.to, c)));
                    }
                }
            }
        }
    }
    Ok(map)
}

/// Presentation of the pushout of `T₁ ← T₀ → T₂`: generators are the
/// irreducible classes of both pieces, relations are their composition
/// tables plus the identification of the two images of every `T₀` class.
pub fn pushout_presentation(t1: &HomTable, t2: &HomTable, t0: &HomTable) -> Result<CatPresentation> {
    if !t0.objects().iter().all(|v| t1.contains(*v) && t2.contains(*v)) {
        return Err(Error::InclusionNotFunctorial("overlap objects are missing from a piece".into()));
    }
    let i1 = check_inclusion(t0, t1, 1)?;
    let i2 = check_inclusion(t0, t2, 2)?;
    let mut generators = Vec::new();
    let w1 = piece_words(t1, 1, &mut generators);
    let w2 = piece_words(t2, 2, &mut generators);
    let mut relations = BTreeSet::new();
    for (t, w) in [(t1, &w1), (t2, &w2)] {
        for (h, (f, g)) in t.factorizations().into_keys().flat_map(|h| {
            let t = &t;
            t.all_arrows()
                .into_iter()
                .filter(move |f| f.from == h.from && !t.is_identity(*f))
                .flat_map(move |f| t.arrows(f.to, h.to).filter(|g| !t.is_identity(*g)).map(move |g| (h, (f, g))).collect::<Vec<_>>())
        }) {
            if t.compose(f, g) == Some(h) {
                let lhs: Word = w[&f].iter().chain(&w[&g]).copied().collect();
                if lhs != w[&h] {
                    relations.insert(ordered(lhs, w[&h].clone()));
                }
            }
        }
    }
    for f in t0.all_arrows().into_iter().filter(|f| !t0.is_identity(*f)) {
        let (l, r) = (w1[&i1[&f]].clone(), w2[&i2[&f]].clone());
        if l != r {
            relations.insert(ordered(l, r));
        }
    }
    Ok(CatPresentation {
        objects: union(t1.objects(), t2.objects()),
        generators,
        relations: relations.into_iter().collect(),
        words: [w1, w2],
    })
}

fn ordered(x: Word, y: Word) -> (Word, Word) {
    if (x.len(), &x) <= (y.len(), &y) {
        (x, y)
    } else {
        (y, x)
    }
}

/// Classes of generator words `a → b`, each listed with all its words up to
/// `max_len`, shortest-then-lexicographic word first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedHom {
    pub classes: Vec<Vec<Word>>,
    pub exact: bool,
}

/// Bounded word enumeration with congruence closure. Exact iff the
/// generators that can occur in a word `a → b` form no cycle and the
/// longest such word has at most `max_len` letters.
pub fn hom_from_presentation(pres: &CatPresentation, a: VertexId, b: VertexId, max_len: usize) -> PresentedHom {
    let gens = &pres.generators;
    let forward = reach(pres, a, true);
    let backward = reach(pres, b, false);
    let relevant: Vec<usize> = (0..gens.len()).filter(|&g| forward.contains(&gens[g].from) && backward.contains(&gens[g].to)).collect();
    let mut out_of: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for &g in &relevant {
        out_of.entry(gens[g].from).or_default().push(g);
    }

    let mut words: Vec<Word> = Vec::new();
    let mut stack: Vec<(VertexId, Word)> = vec![(a, Vec::new())];
    while let Some((v, w)) = stack.pop() {
        if v == b {
            words.push(w.clone());
        }
        if w.len() == max_len {
            continue;
        }
        for &g in out_of.get(&v).map(Vec::as_slice).unwrap_or(&[]).iter().rev() {
            let mut next = w.clone();
            next.push(g);
            stack.push((gens[g].to, next));
        }
    }
    words.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
    let index: HashMap<&[usize], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut uf = UnionFind::new(words.len());
    for (i, w) in words.iter().enumerate() {
        for (l, r) in &pres.relations {
            for (from, to) in [(l, r), (r, l)] {
                if from.is_empty() || from.len() > w.len() {
                    continue;
                }
                for pos in 0..=w.len() - from.len() {
                    if w[pos..pos + from.len()] == from[..] {
                        let rewritten: Word = w[..pos].iter().chain(to.iter()).chain(&w[pos + from.len()..]).copied().collect();
                        if let Some(&j) = index.get(rewritten.as_slice()) {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }
    let classes: Vec<Vec<Word>> = uf.groups().into_iter().map(|g| g.into_iter().map(|i| words[i].clone()).collect()).collect();
    let exact = match longest_word(pres, &relevant, a, b) {
        Some(n) => n <= max_len,
        None => false,
    };
    PresentedHom { classes, exact }
}

fn reach(pres: &CatPresentation, start: VertexId, forward: bool) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([start]);
    let mut todo = vec![start];
    while let Some(v) = todo.pop() {
        for g in &pres.generators {
            let (s, t) = if forward { (g.from, g.to) } else { (g.to, g.from) };
            if s == v && seen.insert(t) {
                todo.push(t);
            }
        }
    }
    seen
}

/// Longest word `a → b` over the relevant generators, `None` if they
/// contain a cycle.
fn longest_word(pres: &CatPresentation, relevant: &[usize], a: VertexId, b: VertexId) -> Option<usize> {
    let gens = &pres.generators;
    let mut indeg: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut nodes = BTreeSet::new();
    for &g in relevant {
        nodes.insert(gens[g].from);
        nodes.insert(gens[g].to);
        *indeg.entry(gens[g].to).or_default() += 1;
    }
    let mut order = Vec::new();
    let mut ready: Vec<VertexId> = nodes.iter().copied().filter(|v| !indeg.contains_key(v)).collect();
    while let Some(v) = ready.pop() {
        order.push(v);
        for &g in relevant.iter().filter(|&&g| gens[g].from == v) {
            let d = indeg.get_mut(&gens[g].to).expect("counted");
            *d -= 1;
            if *d == 0 {
                ready.push(gens[g].to);
            }
        }
    }
    if order.len() < nodes.len() {
        return None;
    }
    let mut best: BTreeMap<VertexId, usize> = BTreeMap::from([(a, 0)]);
    for v in order {
        let Some(&d) = best.get(&v) else { continue };
        for &g in relevant.iter().filter(|&&g| gens[g].from == v) {
            let e = best.entry(gens[g].to).or_insert(0);
            *e = (*e).max(d + 1);
        }
    }
    Some(best.get(&b).copied().unwrap_or(0))
}

impl CatPresentation {
    /// Generator indices up to the identifications made by single-letter
    /// relations; the first index of each group is kept.
    pub fn quiver(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.generators.len());
        for (l, r) in &self.relations {
            if let ([x], [y]) = (l.as_slice(), r.as_slice()) {
                uf.union(*x, *y);
            }
        }
        let mut roots = BTreeSet::new();
        (0..self.generators.len()).filter(|&g| roots.insert(uf.find(g))).collect()
    }
}

/// The presented pushout as an explicit finite category together with the
/// functors `j_k : T_k → P`.
#[derive(Debug, Clone)]
pub struct PushoutCategory {
    pub category: FiniteCategory,
    pub objects: Vec<VertexId>,
    /// Words of each arrow's class.
    pub classes: Vec<Vec<Word>>,
    pub j: [BTreeMap<Arrow, usize>; 2],
}

/// Builds the pushout category; fails with `InexactHomSet` unless every
/// presented hom-set is certified exact at `max_len`.
pub fn pushout_category(pres: &CatPresentation, max_len: usize) -> Result<PushoutCategory> {
    let objects = pres.objects.clone();
    let pos: BTreeMap<VertexId, usize> = objects.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut arrows = Vec::new();
    let mut classes = Vec::new();
    let mut lookup: HashMap<(VertexId, Word), usize> = HashMap::new();
    for &a in &objects {
        for &b in &objects {
            let hom = hom_from_presentation(pres, a, b, max_len);
            if !hom.exact {
                return Err(Error::InexactHomSet { from: a, to: b });
            }
            for class in hom.classes {
                for w in &class {
                    lookup.insert((a, w.clone()), arrows.len());
                }
                arrows.push((pos[&a], pos[&b]));
                classes.push(class);
            }
        }
    }
    let identities = objects.iter().map(|&a| lookup[&(a, Vec::new())]).collect();
    let mut compose = BTreeMap::new();
    for f in 0..arrows.len() {
        for g in (0..arrows.len()).filter(|&g| arrows[g].0 == arrows[f].1) {
            let w: Word = classes[f][0].iter().chain(&classes[g][0]).copied().collect();
            let a = objects[arrows[f].0];
            let h = *lookup.get(&(a, w)).ok_or(Error::InexactHomSet { from: a, to: objects[arrows[g].1] })?;
            compose.insert((f, g), h);
        }
    }
    let j = [0, 1].map(|k| pres.words[k].iter().map(|(f, w)| (*f, lookup[&(f.from, w.clone())])).collect());
    Ok(PushoutCategory { category: FiniteCategory { objects: objects.len(), arrows, identities, compose }, objects, classes, j })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairComparison {
    pub from: VertexId,
    pub to: VertexId,
    pub presented: usize,
    pub direct: usize,
    pub exact: bool,
    /// Word evaluation is a bijection onto the direct classes (up to the
    /// step bound when inexact).
    pub isomorphic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushoutReport {
    pub presentation: CatPresentation,
    pub pairs: Vec<PairComparison>,
    /// `None` without intermediate sets; otherwise whether the inclusion
    /// of the `A`-level pushout into the `B`-level one commutes.
    pub inclusion_commutes: Option<bool>,
}

impl PushoutReport {
    pub fn isomorphic(&self) -> bool {
        self.pairs.iter().all(|p| p.isomorphic) && self.inclusion_commutes != Some(false)
    }

    pub fn exact(&self) -> bool {
        self.pairs.iter().all(|p| p.exact)
    }
}

/// Piece tables `T₁, T₂, T₀` on the given object sets.
pub fn piece_tables(pieces: &CoverPieces, s1: &[VertexId], s2: &[VertexId], budget: Budget) -> Result<(HomTable, HomTable, HomTable)> {
    Ok((
        full_subcategory(&pieces.x1, s1, budget)?,
        full_subcategory(&pieces.x2, s2, budget)?,
        full_subcategory(&pieces.x0, &intersect(s1, s2), budget)?,
    ))
}

/// Compares the presented pushout with the directly computed `τ₁(X, A)`.
pub fn verify_pushout(grid: &GridComplex, cover: &Cover, budget: Budget) -> Result<PushoutReport> {
    let pieces = validate_cover(grid, cover)?;
    let (t1, t2, t0) = piece_tables(&pieces, &cover.a1, &cover.a2, budget)?;
    let presentation = pushout_presentation(&t1, &t2, &t0)?;
    let direct = full_subcategory(grid, &cover.a(), budget)?;
    let pairs = compare(&presentation, &direct, budget.max_steps);
    let inclusion_commutes = match &cover.b {
        None => None,
        Some((b1, b2)) => {
            let (s1, s2, s0) = piece_tables(&pieces, b1, b2, budget)?;
            let upper = pushout_presentation(&s1, &s2, &s0)?;
            Some(inclusion_square_commutes(&presentation, &upper, [&s1, &s2], budget.max_steps))
        }
    };
    Ok(PushoutReport { presentation, pairs, inclusion_commutes })
}

fn compare(pres: &CatPresentation, direct: &HomTable, max_len: usize) -> Vec<PairComparison> {
    let mut out = Vec::new();
    for &a in &pres.objects {
        for &b in &pres.objects {
            let ph = hom_from_presentation(pres, a, b, max_len);
            let exact = ph.exact && direct.is_exact(a, b);
            let bound = if exact { usize::MAX } else { direct.max_steps() };
            let mut hit = BTreeSet::new();
            let mut injective = true;
            let mut counted = 0;
            for class in &ph.classes {
                let path = pres.evaluate(a, &class[0]);
                if path.len() > bound {
                    continue;
                }
                counted += 1;
                let images: BTreeSet<Option<Arrow>> = class.iter().map(|w| direct.arrow_of(&pres.evaluate(a, w))).collect();
                match images.into_iter().collect::<Vec<_>>().as_slice() {
                    [Some(f)] => injective &= hit.insert(*f),
                    _ => injective = false,
                }
            }
            let targets: Vec<Arrow> = direct.arrows(a, b).filter(|f| direct.representative(*f).len() <= bound).collect();
            let surjective = targets.iter().all(|f| hit.contains(f));
            out.push(PairComparison {
                from: a,
                to: b,
                presented: counted,
                direct: targets.len(),
                exact,
                isomorphic: injective && surjective,
            });
        }
    }
    out
}

/// Every generator and relation of the lower presentation, pushed into the
/// upper one through the piece inclusions, lands in one congruence class.
fn inclusion_square_commutes(lower: &CatPresentation, upper: &CatPresentation, upper_tables: [&HomTable; 2], max_len: usize) -> bool {
    let lift = |w: &[usize]| -> Option<Word> {
        let mut out = Vec::new();
        for &g in w {
            let gen = &lower.generators[g];
            let k = (gen.piece - 1) as usize;
            let f = upper_tables[k].arrow_of(&gen.path)?;
            out.extend(upper.words[k].get(&f)?.iter().copied());
        }
        Some(out)
    };
    for (l, r) in &lower.relations {
        let (Some(ul), Some(ur)) = (lift(l), lift(r)) else { return false };
        let a = upper.word_source(&ul, VertexId(0));
        let b = ul.last().map(|g| upper.generators[*g].to).unwrap_or(a);
        let hom = hom_from_presentation(upper, a, b, max_len.max(ul.len()).max(ur.len()));
        if !hom.classes.iter().any(|c| c.contains(&ul) && c.contains(&ur)) {
            return false;
        }
    }
    (0..lower.generators.len()).all(|g| lift(&[g]).is_some())
}

/// A glued retract together with its verification on `X`.
#[derive(Debug, Clone)]
pub struct GluedRetract {
    pub data: RetractData,
    pub report: RetractReport,
    pub adjunction: bool,
}

/// Glues piecewise retracts of `B_k` onto `A_k` into a retract of
/// `B = B₁ ∪ B₂` onto `A = A₁ ∪ A₂`, after checking that they agree on the
/// overlap.
pub fn pushout_retract(
    grid: &GridComplex,
    cover: &Cover,
    data1: &RetractData,
    data2: &RetractData,
    data0: &RetractData,
    budget: Budget,
) -> Result<GluedRetract> {
    let pieces = cover.pieces(grid);
    let data = glue_retracts(&pieces, data1, data2, data0, budget)?;
    let table = full_subcategory(grid, &data.domain, budget)?;
    let report = if table.all_exact() { verify_retract(&table, &data)? } else { verify_retract_bounded(&table, &data)? };
    let adjunction = check_adjunction(&induced_functor(&data, &table), &table);
    Ok(GluedRetract { data, report, adjunction })
}

fn glue_retracts(pieces: &CoverPieces, data1: &RetractData, data2: &RetractData, data0: &RetractData, budget: Budget) -> Result<RetractData> {
    let incompatible = |m: String| Err(Error::IncompatibleRetracts(m));
    if data1.direction != data2.direction || data1.direction != data0.direction {
        return incompatible("pieces retract in different directions".into());
    }
    if sorted(&data0.domain) != intersect(&data1.domain, &data2.domain) {
        return incompatible("overlap domain is not B₁ ∩ B₂".into());
    }
    if sorted(&data0.codomain) != intersect(&data1.codomain, &data2.codomain) {
        return incompatible("overlap codomain is not A₁ ∩ A₂".into());
    }
    let (t1, t2, t0) = piece_tables(pieces, &data1.domain, &data2.domain, budget)?;
    for &x in &data0.domain {
        let a0 = &data0.assignment[&x];
        for (k, (t, d)) in [(&t1, data1), (&t2, data2)].into_iter().enumerate() {
            let ak = &d.assignment[&x];
            if ak.target != a0.target {
                return incompatible(format!("{x} goes to {} in piece {} but to {} on the overlap", ak.target, k + 1, a0.target));
            }
            if t.arrow_of(&ak.witness) != t.arrow_of(&a0.witness) {
                return incompatible(format!("witnesses for {x} differ between piece {} and the overlap", k + 1));
            }
        }
    }
    let f0 = induced_functor(data0, &t0);
    for (k, (t, d)) in [(&t1, data1), (&t2, data2)].into_iter().enumerate() {
        let fk = induced_functor(d, t);
        for f in t0.all_arrows() {
            let lhs = t.arrow_of(t0.representative(f)).and_then(|g| fk.map_arrow(g));
            let rhs = f0.map_arrow(f).and_then(|g| t.arrow_of(t0.representative(g)));
            if lhs.is_some() && lhs != rhs {
                return incompatible(format!("the retracts do not commute with the inclusion of the overlap into piece {} at {}→{}", k + 1, f.from, f.to));
            }
        }
    }
    let mut assignment = data2.assignment.clone();
    assignment.extend(data1.assignment.iter().map(|(k, v)| (*k, v.clone())));
    Ok(RetractData {
        direction: data1.direction,
        domain: union(&data1.domain, &data2.domain),
        codomain: union(&data1.codomain, &data2.codomain),
        assignment,
    })
}

/// Glues compatible chains step by step.
pub fn pushout_chain(
    grid: &GridComplex,
    cover: &Cover,
    chain1: &RetractChain,
    chain2: &RetractChain,
    chain0: &RetractChain,
    budget: Budget,
) -> Result<RetractChain> {
    if chain1.steps.len() != chain2.steps.len() || chain1.steps.len() != chain0.steps.len() {
        return Err(Error::IncompatibleRetracts("chains have different lengths".into()));
    }
    let pieces = cover.pieces(grid);
    let base_objects = union(chain1.base.objects(), chain2.base.objects());
    let base = full_subcategory(grid, &base_objects, budget)?;
    let mut chain = RetractChain::new(base);
    for k in 0..chain1.steps.len() {
        let step = glue_retracts(&pieces, &chain1.steps[k], &chain2.steps[k], &chain0.steps[k], budget)?;
        chain.steps.push(step);
    }
    Ok(chain)
}

#[derive(Debug, Clone)]
pub struct GluedModelReport {
    pub chain: RetractChain,
    pub piece_reports: [ChainReport; 3],
    pub report: ChainReport,
}

impl GluedModelReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Piece chains obtained by intersecting each global step's object set with
/// the piece, starting from `B_k` (all piece vertices when no `B` sets are
/// given). Steps are found by search; `None` if some piece step does not
/// exist.
pub fn restricted_chains(
    grid: &GridComplex,
    cover: &Cover,
    steps: &[(Direction, Vec<VertexId>)],
    budget: Budget,
) -> Result<Option<[RetractChain; 3]>> {
    let pieces = cover.pieces(grid);
    let (b1, b2) = match &cover.b {
        Some((b1, b2)) => (b1.clone(), b2.clone()),
        None => (pieces.x1.vertices().collect(), pieces.x2.vertices().collect()),
    };
    let b0 = intersect(&b1, &b2);
    let mut out = Vec::new();
    for (k, base) in [(1u8, b1), (2, b2), (0, b0)] {
        let piece = pieces.piece(k);
        let mut chain = RetractChain::new(full_subcategory(piece, &base, budget)?);
        for (dir, set) in steps {
            let local: Vec<VertexId> = set.iter().copied().filter(|v| piece.is_vertex(*v) && base.contains(v)).collect();
            if chain.push_found(*dir, &sorted(&local))?.is_none() {
                return Ok(None);
            }
        }
        out.push(chain);
    }
    let [c1, c2, c0]: [RetractChain; 3] = out.try_into().expect("three pieces");
    Ok(Some([c1, c2, c0]))
}

/// Glues compatible extremal models of the pieces and verifies the result
/// as an extremal model of `X`. Truncated tables are compared grade by
/// grade.
pub fn pushout_extremal_model(
    grid: &GridComplex,
    cover: &Cover,
    chain1: &RetractChain,
    chain2: &RetractChain,
    chain0: &RetractChain,
    budget: Budget,
) -> Result<GluedModelReport> {
    let pieces = cover.pieces(grid);
    let check = |g: &GridComplex, c: &RetractChain| -> Result<ChainReport> {
        if c.base.all_exact() {
            verify_extremal_model(g, c)
        } else {
            verify_extremal_model_bounded(g, c)
        }
    };
    let piece_reports = [check(&pieces.x1, chain1)?, check(&pieces.x2, chain2)?, check(&pieces.x0, chain0)?];
    let chain = pushout_chain(grid, cover, chain1, chain2, chain0, budget)?;
    let report = check(grid, &chain)?;
    debug_assert!(report.missing_extremal.iter().all(|v| extremal_set(grid).contains(v)));
    Ok(GluedModelReport { chain, piece_reports, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::compactify;
    use crate::scene::{q, CubicalScene};
    use crate::fincat::FiniteCategory;

    fn annulus() -> GridComplex {
        compactify(&CubicalScene::new(2).with_box(&[(q(1, 3), q(2, 3)), (q(1, 3), q(2, 3))])).unwrap()
    }

    fn at(g: &GridComplex, x: (i64, i64), y: (i64, i64)) -> VertexId {
        g.vertex_at(&[q(x.0, x.1), q(y.0, y.1)]).unwrap()
    }

    fn vertical_split(g: &GridComplex) -> Cover {
        let a = at(g, (0, 1), (0, 1));
        let p = at(g, (1, 3), (1, 3));
        let q1 = at(g, (2, 3), (1, 3));
        let q2 = at(g, (2, 3), (1, 1));
        let b = at(g, (1, 1), (1, 1));
        Cover::new(
            Window::closed_box(&[(q(0, 1), q(2, 3)), (q(0, 1), q(1, 1))]),
            Window::closed_box(&[(q(1, 3), q(1, 1)), (q(0, 1), q(1, 1))]),
            &[a, p, q1, q2],
            &[p, q1, q2, b],
        )
    }

    #[test]
    fn annulus_pushout_is_isomorphic() {
        let g = annulus();
        let cover = vertical_split(&g);
        let report = verify_pushout(&g, &cover, Budget::for_grid(&g)).unwrap();
        assert!(report.isomorphic() && report.exact());
        let (a, b) = (at(&g, (0, 1), (0, 1)), at(&g, (1, 1), (1, 1)));
        let ab = report.pairs.iter().find(|p| p.from == a && p.to == b).unwrap();
        assert_eq!((ab.presented, ab.direct), (2, 2));
    }

    #[test]
    fn decomposition_reassembles() {
        let g = annulus();
        let cover = vertical_split(&g);
        let a = at(&g, (0, 1), (0, 1));
        let bottom_right = LatticePath::from_axes(&g, a, &[0, 0, 0, 1, 1, 1]).unwrap();
        let segs = decompose_path(&g, &cover, &bottom_right).unwrap();
        assert_eq!(segs.iter().map(|s| s.piece).collect::<Vec<_>>(), vec![1, 2]);
        let glued: Vec<_> = segs.iter().flat_map(|s| s.path.steps.clone()).collect();
        assert_eq!(glued, bottom_right.steps);
        let inside = LatticePath::from_axes(&g, at(&g, (1, 3), (0, 1)), &[0]).unwrap();
        assert_eq!(decompose_path(&g, &cover, &inside).unwrap(), vec![Segment { path: inside.clone(), piece: 1 }]);
    }

    #[test]
    fn gap_is_rejected() {
        let g = annulus();
        let mut cover = vertical_split(&g);
        cover.x1 = Window::closed_box(&[(q(0, 1), q(1, 3)), (q(0, 1), q(1, 1))]);
        cover.x2 = Window::closed_box(&[(q(2, 3), q(1, 1)), (q(0, 1), q(1, 1))]);
        assert!(matches!(validate_cover(&g, &cover), Err(Error::CoverInvalid(_))));
    }

    #[test]
    fn identity_only_hom() {
        let g = annulus();
        let cover = vertical_split(&g);
        let pieces = cover.pieces(&g);
        let (t1, t2, t0) = piece_tables(&pieces, &cover.a1, &cover.a2, Budget::for_grid(&g)).unwrap();
        let pres = pushout_presentation(&t1, &t2, &t0).unwrap();
        let a = at(&g, (0, 1), (0, 1));
        let h = hom_from_presentation(&pres, a, a, 4);
        assert_eq!(h.classes, vec![vec![Vec::<usize>::new()]]);
        assert!(h.exact);
    }

    fn swiss() -> GridComplex {
        compactify(
            &CubicalScene::new(2)
                .with_box(&[(q(1, 5), q(4, 5)), (q(2, 5), q(3, 5))])
                .with_box(&[(q(2, 5), q(3, 5)), (q(1, 5), q(4, 5))]),
        )
        .unwrap()
    }

    #[test]
    fn swiss_horizontal_split_is_isomorphic() {
        let g = swiss();
        let at = |x, y| at(&g, (x, 5), (y, 5));
        let overlap = [at(2, 2), at(3, 3), at(0, 2), at(3, 2)];
        let mut a1 = overlap.to_vec();
        a1.push(at(0, 0));
        let mut a2 = overlap.to_vec();
        a2.push(at(5, 5));
        let cover = Cover::new(
            Window::closed_box(&[(q(0, 1), q(1, 1)), (q(0, 1), q(3, 5))]),
            Window::closed_box(&[(q(0, 1), q(1, 1)), (q(2, 5), q(1, 1))]),
            &a1,
            &a2,
        );
        let report = verify_pushout(&g, &cover, Budget::for_grid(&g)).unwrap();
        assert!(report.isomorphic() && report.exact());
        let ad = report.pairs.iter().find(|p| p.from == at(0, 0) && p.to == at(5, 5)).unwrap();
        assert_eq!(ad.direct, 2);
    }

    #[test]
    fn overlap_generators_are_merged() {
        let g = annulus();
        let cover = vertical_split(&g);
        let pieces = cover.pieces(&g);
        let (t1, t2, t0) = piece_tables(&pieces, &cover.a1, &cover.a2, Budget::for_grid(&g)).unwrap();
        let pres = pushout_presentation(&t1, &t2, &t0).unwrap();
        assert_eq!(pres.generators.len(), 8);
        let quiver: Vec<_> = pres.quiver().into_iter().map(|i| (pres.generators[i].from, pres.generators[i].to)).collect();
        assert_eq!(quiver.len(), 5);
    }

    #[test]
    fn pushout_category_matches_direct_table() {
        let g = annulus();
        let cover = vertical_split(&g);
        let report = verify_pushout(&g, &cover, Budget::for_grid(&g)).unwrap();
        let p = pushout_category(&report.presentation, 12).unwrap();
        assert!(p.category.is_valid());
        let direct = full_subcategory(&g, &cover.a(), Budget::for_grid(&g)).unwrap();
        let (c, _) = FiniteCategory::from_table(&direct).unwrap();
        assert_eq!(p.category.arrows.len(), c.arrows.len());
    }

    fn annulus_future_steps(g: &GridComplex, cover: &Cover) -> Vec<VertexId> {
        let pieces = cover.pieces(g);
        let mut f: Vec<VertexId> = g.vertices().filter(|v| g.vertex_point(*v).iter().all(|c| *c <= q(1, 3))).collect();
        f.extend([&pieces.x1, &pieces.x2, &pieces.x0].into_iter().flat_map(extremal_set));
        f.push(at(g, (1, 1), (1, 1)));
        sorted(&f)
    }

    #[test]
    fn glued_future_retract_equals_global_one() {
        let g = annulus();
        let cover = Cover::new(vertical_split(&g).x1, vertical_split(&g).x2, &[], &[]);
        let f = annulus_future_steps(&g, &cover);
        let budget = Budget::for_grid(&g);
        let [c1, c2, c0] = restricted_chains(&g, &cover, &[(Direction::Future, f.clone())], budget).unwrap().unwrap();
        let glued = pushout_retract(&g, &cover, &c1.steps[0], &c2.steps[0], &c0.steps[0], budget).unwrap();
        assert!(glued.report.passed() && glued.adjunction);
        let all = full_subcategory(&g, &g.vertices().collect::<Vec<_>>(), budget).unwrap();
        let global = crate::retract::find_retract(&all, &f, Direction::Future).unwrap().unwrap();
        for (x, asg) in &global.assignment {
            let mine = &glued.data.assignment[x];
            assert_eq!(mine.target, asg.target);
            assert_eq!(all.arrow_of(&mine.witness), all.arrow_of(&asg.witness));
        }
    }

    #[test]
    fn mismatched_overlap_is_incompatible() {
        let g = annulus();
        let cover = Cover::new(vertical_split(&g).x1, vertical_split(&g).x2, &[], &[]);
        let f = annulus_future_steps(&g, &cover);
        let budget = Budget::for_grid(&g);
        let [c1, mut c2, c0] = restricted_chains(&g, &cover, &[(Direction::Future, f)], budget).unwrap().unwrap();
        let pieces = cover.pieces(&g);
        let t2 = full_subcategory(&pieces.x2, &c2.steps[0].domain, budget).unwrap();
        let data2 = &mut c2.steps[0];
        let (x, alt) = c0.steps[0]
            .domain
            .iter()
            .find_map(|&x| {
                let current = data2.assignment[&x].target;
                data2.codomain.iter().find(|&&a| a != current && t2.hom_count(x, a) > 0).map(|&a| (x, a))
            })
            .unwrap();
        let witness = t2.hom(x, alt)[0].canonical.clone();
        data2.assignment.insert(x, crate::retract::Assignment { target: alt, witness });
        let err = pushout_retract(&g, &cover, &c1.steps[0], &c2.steps[0], &c0.steps[0], budget).unwrap_err();
        assert!(matches!(err, Error::IncompatibleRetracts(_)));
    }

    #[test]
    fn glued_annulus_model() {
        let g = annulus();
        let cover = Cover::new(vertical_split(&g).x1, vertical_split(&g).x2, &[], &[]);
        let f = annulus_future_steps(&g, &cover);
        let pieces = cover.pieces(&g);
        let mut a: Vec<VertexId> = [&pieces.x1, &pieces.x2, &pieces.x0].into_iter().flat_map(extremal_set).collect();
        a.extend(extremal_set(&g));
        let budget = Budget::for_grid(&g);
        let steps = [(Direction::Future, f), (Direction::Past, sorted(&a))];
        let [c1, c2, c0] = restricted_chains(&g, &cover, &steps, budget).unwrap().unwrap();
        let report = pushout_extremal_model(&g, &cover, &c1, &c2, &c0, budget).unwrap();
        assert!(report.piece_reports.iter().all(ChainReport::passed));
        assert!(report.passed());
        assert_eq!(report.chain.final_objects().len(), 4);
    }
}

//! Future and past retracts, their induced functors and adjunctions.
//!
//! A future retract of `B` onto `A ⊆ B` sends each `x` to `x⁺ ∈ A` with a
//! class `γ_x: x → x⁺` such that every class `x → a` (`a ∈ A`) factors
//! uniquely through `γ_x`. Past retracts are the dual notion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::category::{Arrow, HomTable};
use crate::dipath::LatticePath;
use crate::error::{Error, Result};
use crate::grid::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Future,
    Past,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Future => "future",
            Direction::Past => "past",
        })
    }
}

/// `x ↦ (target, witness)`; the witness runs `x → target` for future
/// retracts and `target → x` for past ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub target: VertexId,
    pub witness: LatticePath,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractData {
    pub direction: Direction,
    pub domain: Vec<VertexId>,
    pub codomain: Vec<VertexId>,
    pub assignment: BTreeMap<VertexId, Assignment>,
}

impl RetractData {
    /// The retract of `objects` onto itself.
    pub fn identity(objects: &[VertexId], direction: Direction) -> Self {
        let objects = sorted(objects);
        let assignment = objects
            .iter()
            .map(|&x| (x, Assignment { target: x, witness: LatticePath::constant(x) }))
            .collect();
        RetractData { direction, domain: objects.clone(), codomain: objects, assignment }
    }

    pub fn target(&self, x: VertexId) -> Option<VertexId> {
        self.assignment.get(&x).map(|a| a.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractFailure {
    pub x: VertexId,
    pub a: Option<VertexId>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RetractReport {
    pub failures: Vec<RetractFailure>,
    /// Largest path length covered when the table was truncated.
    pub checked_up_to: Option<usize>,
}

impl RetractReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sorted(v: &[VertexId]) -> Vec<VertexId> {
    v.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Checks the unique-factorization property. Refuses truncated tables.
pub fn verify_retract(table: &HomTable, data: &RetractData) -> Result<RetractReport> {
    check_shape(table, data)?;
    require_exact(table, &data.domain, &data.codomain, data.direction)?;
    Ok(verify_within(table, data, None))
}

/// Like [`verify_retract`], but on a truncated table compares hom-sets grade
/// by grade (path length) up to the table's step bound instead of refusing.
pub fn verify_retract_bounded(table: &HomTable, data: &RetractData) -> Result<RetractReport> {
    check_shape(table, data)?;
    let bound = (!table.all_exact()).then(|| table.max_steps());
    Ok(verify_within(table, data, bound))
}

fn check_shape(table: &HomTable, data: &RetractData) -> Result<()> {
    if sorted(&data.domain) != table.objects() {
        return Err(Error::MalformedRetract("domain differs from the table's objects".into()));
    }
    if let Some(a) = data.codomain.iter().find(|a| !table.contains(**a)) {
        return Err(Error::MalformedRetract(format!("codomain object {a} is not in the domain")));
    }
    Ok(())
}

fn require_exact(table: &HomTable, domain: &[VertexId], codomain: &[VertexId], dir: Direction) -> Result<()> {
    for &x in domain {
        for &a in codomain {
            let (from, to) = match dir {
                Direction::Future => (x, a),
                Direction::Past => (a, x),
            };
            if !table.is_exact(from, to) {
                return Err(Error::InexactHomSet { from, to });
            }
        }
    }
    Ok(())
}

fn verify_within(table: &HomTable, data: &RetractData, bound: Option<usize>) -> RetractReport {
    let codomain = sorted(&data.codomain);
    let mut failures = Vec::new();
    for &x in table.objects() {
        let fail = |a: Option<VertexId>, reason: String| RetractFailure { x, a, reason };
        let Some(asg) = data.assignment.get(&x) else {
            failures.push(fail(None, "no assignment".into()));
            continue;
        };
        if codomain.binary_search(&asg.target).is_err() {
            failures.push(fail(None, format!("target {} is not in A", asg.target)));
            continue;
        }
        let Some(gamma) = resolve_witness(table, data.direction, x, asg) else {
            failures.push(fail(None, "witness is not a path between x and its target".into()));
            continue;
        };
        if codomain.binary_search(&x).is_ok() && !(asg.target == x && table.is_identity(gamma)) {
            failures.push(fail(Some(x), "points of A must be assigned their identity".into()));
            continue;
        }
        for &a in &codomain {
            if let Some(reason) = factorization_failure(table, data.direction, gamma, a, bound) {
                failures.push(fail(Some(a), reason));
            }
        }
    }
    RetractReport { failures, checked_up_to: bound }
}

fn resolve_witness(table: &HomTable, dir: Direction, x: VertexId, asg: &Assignment) -> Option<Arrow> {
    let f = table.arrow_of(&asg.witness)?;
    let ok = match dir {
        Direction::Future => f.from == x && f.to == asg.target,
        Direction::Past => f.from == asg.target && f.to == x,
    };
    ok.then_some(f)
}

/// Whether precomposition (future) or postcomposition (past) with `gamma`
/// is a bijection onto the classes between `x` and `a`.
fn factorization_failure(table: &HomTable, dir: Direction, gamma: Arrow, a: VertexId, bound: Option<usize>) -> Option<String> {
    let glen = table.representative(gamma).len();
    let max = bound.unwrap_or(usize::MAX);
    let (sources, targets): (Vec<Arrow>, Vec<Arrow>) = match dir {
        Direction::Future => (table.arrows(gamma.to, a).collect(), table.arrows(gamma.from, a).collect()),
        Direction::Past => (table.arrows(a, gamma.from).collect(), table.arrows(a, gamma.to).collect()),
    };
    let mut image = BTreeSet::new();
    for g in sources {
        if table.representative(g).len().saturating_add(glen) > max {
            continue;
        }
        let h = match dir {
            Direction::Future => table.compose(gamma, g),
            Direction::Past => table.compose(g, gamma),
        };
        let Some(h) = h else {
            return Some("a composite with the witness exceeds the step bound".into());
        };
        if !image.insert(h) {
            return Some(format!("two classes become equal after composing with the witness (class {})", h.index));
        }
    }
    let missed = targets.iter().find(|t| table.representative(**t).len() <= max && !image.contains(t));
    missed.map(|t| format!("class {} does not factor through the witness", t.index))
}

/// Searches an assignment onto `codomain` by trying, for every `x`,
/// candidates `(a₀, g₀)` in canonical order. Refuses truncated tables.
pub fn find_retract(table: &HomTable, codomain: &[VertexId], direction: Direction) -> Result<Option<RetractData>> {
    require_exact(table, table.objects(), codomain, direction)?;
    find_within(table, codomain, direction, None)
}

/// Grade-wise variant of [`find_retract`] for truncated tables.
pub fn find_retract_bounded(table: &HomTable, codomain: &[VertexId], direction: Direction) -> Result<Option<RetractData>> {
    let bound = (!table.all_exact()).then(|| table.max_steps());
    find_within(table, codomain, direction, bound)
}

fn find_within(table: &HomTable, codomain: &[VertexId], direction: Direction, bound: Option<usize>) -> Result<Option<RetractData>> {
    let codomain = sorted(codomain);
    if let Some(a) = codomain.iter().find(|a| !table.contains(**a)) {
        return Err(Error::MalformedRetract(format!("codomain object {a} is not in the domain")));
    }
    let mut assignment = BTreeMap::new();
    for &x in table.objects() {
        if codomain.binary_search(&x).is_ok() {
            assignment.insert(x, Assignment { target: x, witness: LatticePath::constant(x) });
            continue;
        }
        let found = codomain.iter().find_map(|&a0| {
            let candidates: Vec<Arrow> = match direction {
                Direction::Future => table.arrows(x, a0).collect(),
                Direction::Past => table.arrows(a0, x).collect(),
            };
            candidates
                .into_iter()
                .find(|&g0| codomain.iter().all(|&a| factorization_failure(table, direction, g0, a, bound).is_none()))
                .map(|g0| Assignment { target: a0, witness: table.representative(g0).clone() })
        });
        match found {
            Some(asg) => {
                assignment.insert(x, asg);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(RetractData { direction, domain: table.objects().to_vec(), codomain, assignment }))
}

/// The functor `P: τ₁(X,B) → τ₁(X,A)` determined by an assignment, with
/// unit (future) or counit (past) components `γ_x`. Entries are `None`
/// where no unique fill-in exists, which happens only for invalid data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedFunctor {
    pub direction: Direction,
    pub codomain: Vec<VertexId>,
    pub object_map: BTreeMap<VertexId, VertexId>,
    pub arrow_map: BTreeMap<Arrow, Option<Arrow>>,
    pub unit: BTreeMap<VertexId, Option<Arrow>>,
}

impl InducedFunctor {
    pub fn is_total(&self) -> bool {
        self.arrow_map.values().all(Option::is_some) && self.unit.values().all(Option::is_some)
    }

    pub fn map_arrow(&self, f: Arrow) -> Option<Arrow> {
        self.arrow_map.get(&f).copied().flatten()
    }
}

/// For `f: x → y`, `P(f)` is the unique `x⁺ → y⁺` with
/// `γ_x · P(f) = f · γ_y` (dually for past retracts).
pub fn induced_functor(data: &RetractData, table: &HomTable) -> InducedFunctor {
    let object_map: BTreeMap<VertexId, VertexId> = data.assignment.iter().map(|(x, a)| (*x, a.target)).collect();
    let unit: BTreeMap<VertexId, Option<Arrow>> = table
        .objects()
        .iter()
        .map(|&x| (x, data.assignment.get(&x).and_then(|asg| resolve_witness(table, data.direction, x, asg))))
        .collect();
    let mut arrow_map = BTreeMap::new();
    for f in table.all_arrows() {
        let image = (|| {
            let gx = unit.get(&f.from).copied().flatten()?;
            let gy = unit.get(&f.to).copied().flatten()?;
            let (px, py) = (object_map[&f.from], object_map[&f.to]);
            let mut fills = table.arrows(px, py).filter(|&h| match data.direction {
                Direction::Future => table.compose(f, gy).is_some_and(|r| table.compose(gx, h) == Some(r)),
                Direction::Past => table.compose(gx, f).is_some_and(|r| table.compose(h, gy) == Some(r)),
            });
            let h = fills.next()?;
            fills.next().is_none().then_some(h)
        })();
        arrow_map.insert(f, image);
    }
    InducedFunctor { direction: data.direction, codomain: sorted(&data.codomain), object_map, arrow_map, unit }
}

/// Checks that `P` is a functor, `P ∘ ι = Id`, the unit (counit) `γ` is
/// natural, `P(γ_x) = id` and `γ_a = id` on `A`. These are the triangle
/// identities of an adjunction whose other (co)unit is the identity.
pub fn check_adjunction(functor: &InducedFunctor, table: &HomTable) -> bool {
    if !functor.is_total() {
        return false;
    }
    let p = |f: Arrow| functor.map_arrow(f).expect("total");
    let in_a = |v: VertexId| functor.codomain.binary_search(&v).is_ok();
    let arrows = table.all_arrows();
    for &x in table.objects() {
        if p(table.identity(x)) != table.identity(functor.object_map[&x]) {
            return false;
        }
        let gx = functor.unit[&x].expect("total");
        let px = functor.object_map[&x];
        if p(gx) != table.identity(px) {
            return false;
        }
        if in_a(x) && (px != x || gx != table.identity(x)) {
            return false;
        }
    }
    for &f in &arrows {
        let pf = p(f);
        if pf.from != functor.object_map[&f.from] || pf.to != functor.object_map[&f.to] {
            return false;
        }
        if in_a(f.from) && in_a(f.to) && pf != f {
            return false;
        }
        let gx = functor.unit[&f.from].expect("total");
        let gy = functor.unit[&f.to].expect("total");
        let natural = match functor.direction {
            Direction::Future => table.compose(gx, pf) == table.compose(f, gy),
            Direction::Past => table.compose(pf, gy) == table.compose(gx, f),
        };
        if !natural {
            return false;
        }
        for g in table.objects().iter().flat_map(|&c| table.arrows(f.to, c)) {
            if let Some(gf) = table.compose(f, g) {
                if table.compose(pf, p(g)) != Some(p(gf)) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::full_subcategory;
    use crate::dipath::Budget;
    use crate::grid::{compactify, GridComplex};
    use crate::scene::{q, CubicalScene};

    fn annulus() -> GridComplex {
        compactify(&CubicalScene::new(2).with_box(&[(q(1, 3), q(2, 3)), (q(1, 3), q(2, 3))])).unwrap()
    }

    fn at(g: &GridComplex, x: (i64, i64), y: (i64, i64)) -> VertexId {
        g.vertex_at(&[q(x.0, x.1), q(y.0, y.1)]).unwrap()
    }

    fn full_table(g: &GridComplex) -> HomTable {
        full_subcategory(g, &g.vertices().collect::<Vec<_>>(), Budget::for_grid(g)).unwrap()
    }

    #[test]
    fn identity_retract_passes() {
        let g = annulus();
        let t = full_table(&g);
        let data = RetractData::identity(t.objects(), Direction::Future);
        assert!(verify_retract(&t, &data).unwrap().passed());
        let f = induced_functor(&data, &t);
        assert!(f.arrow_map.iter().all(|(k, v)| *v == Some(*k)));
        assert!(check_adjunction(&f, &t));
    }

    #[test]
    fn annulus_future_retract_pushes_forward() {
        let g = annulus();
        let t = full_table(&g);
        let p = at(&g, (1, 3), (1, 3));
        let b = at(&g, (1, 1), (1, 1));
        let data = find_retract(&t, &[p, b], Direction::Future).unwrap().expect("retract exists");
        for x in g.vertices() {
            let pt = g.vertex_point(x);
            let lower_left = pt.iter().all(|c| *c <= q(1, 3));
            assert_eq!(data.target(x), Some(if lower_left { p } else { b }), "{}", g.vertex_label(x));
        }
        assert!(verify_retract(&t, &data).unwrap().passed());
        assert!(check_adjunction(&induced_functor(&data, &t), &t));
    }

    #[test]
    fn constant_assignment_fails_at_a() {
        let g = annulus();
        let t = full_table(&g);
        let a = at(&g, (0, 1), (0, 1));
        let b = at(&g, (1, 1), (1, 1));
        let sub = t.subtable(&[a, b]).unwrap();
        let witness = t.representative(t.arrows(a, b).next().unwrap()).clone();
        let mut data = RetractData::identity(&[a, b], Direction::Future);
        data.codomain = vec![b];
        data.assignment.insert(a, Assignment { target: b, witness });
        let report = verify_retract(&sub, &data).unwrap();
        assert!(report.failures.iter().any(|f| f.x == a));
        assert!(!check_adjunction(&induced_functor(&data, &sub), &sub));
    }

    #[test]
    fn swiss_flag_deadlock_is_not_a_retract() {
        let g = compactify(
            &CubicalScene::new(2)
                .with_box(&[(q(1, 5), q(4, 5)), (q(2, 5), q(3, 5))])
                .with_box(&[(q(2, 5), q(3, 5)), (q(1, 5), q(4, 5))]),
        )
        .unwrap();
        let t = full_table(&g);
        let b = at(&g, (2, 5), (2, 5));
        assert_eq!(find_retract(&t, &[b], Direction::Future).unwrap(), None);
    }

    #[test]
    fn truncated_tables_are_refused() {
        let g = compactify(&CubicalScene::new(1).with_identification(0, q(0, 1), q(1, 1))).unwrap();
        let t = full_subcategory(&g, &[VertexId(0)], Budget::new(100, 3)).unwrap();
        let data = RetractData::identity(t.objects(), Direction::Future);
        assert!(matches!(verify_retract(&t, &data), Err(Error::InexactHomSet { .. })));
        let report = verify_retract_bounded(&t, &data).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked_up_to, Some(3));
    }
}

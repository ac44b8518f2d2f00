//! Chains of retracts and extremal models.

use std::collections::BTreeSet;

use crate::category::{bipartite_graph, extremal_set, has_directed_cycle, HomTable};
use crate::error::{Error, Result};
use crate::grid::{GridComplex, VertexId};
use crate::retract::{find_retract, find_retract_bounded, verify_retract, verify_retract_bounded, Direction, RetractData, RetractReport};

/// Largest number of optional objects [`is_minimal`] will enumerate
/// subsets of.
pub const SUBSET_LIMIT: usize = 16;

/// `B = X₀ ⊇ X₁ ⊇ … ⊇ Xₙ = A`, each step a future or past retract.
#[derive(Debug, Clone)]
pub struct RetractChain {
    pub base: HomTable,
    pub steps: Vec<RetractData>,
}

impl RetractChain {
    pub fn new(base: HomTable) -> Self {
        RetractChain { base, steps: Vec::new() }
    }

    pub fn final_objects(&self) -> Vec<VertexId> {
        self.steps.last().map(|s| s.codomain.clone()).unwrap_or_else(|| self.base.objects().to_vec())
    }

    pub fn final_table(&self) -> Result<HomTable> {
        self.base.subtable(&self.final_objects())
    }

    /// Object set of the domain of step `k`.
    pub fn domain_objects(&self, k: usize) -> Vec<VertexId> {
        if k == 0 {
            self.base.objects().to_vec()
        } else {
            self.steps[k - 1].codomain.clone()
        }
    }

    /// Appends a step found by search onto `codomain`; `None` if no retract
    /// exists.
    pub fn push_found(&mut self, direction: Direction, codomain: &[VertexId]) -> Result<Option<&RetractData>> {
        let table = self.base.subtable(&self.final_objects())?;
        let found = if table.all_exact() {
            find_retract(&table, codomain, direction)?
        } else {
            find_retract_bounded(&table, codomain, direction)?
        };
        Ok(found.map(|data| {
            self.steps.push(data);
            self.steps.last().expect("just pushed")
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub steps: Vec<RetractReport>,
    /// Steps whose domain is not the previous codomain.
    pub broken_links: Vec<usize>,
    /// Extremal points missing from the final object set.
    pub missing_extremal: Vec<VertexId>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.broken_links.is_empty() && self.missing_extremal.is_empty() && self.steps.iter().all(RetractReport::passed)
    }
}

/// Verifies every step and `Ext(X) ⊆ A`. Refuses truncated tables.
pub fn verify_extremal_model(grid: &GridComplex, chain: &RetractChain) -> Result<ChainReport> {
    verify_chain(grid, chain, false)
}

/// Like [`verify_extremal_model`], comparing truncated hom-sets grade by
/// grade.
pub fn verify_extremal_model_bounded(grid: &GridComplex, chain: &RetractChain) -> Result<ChainReport> {
    verify_chain(grid, chain, true)
}

fn verify_chain(grid: &GridComplex, chain: &RetractChain, bounded: bool) -> Result<ChainReport> {
    let mut steps = Vec::new();
    let mut broken_links = Vec::new();
    for (k, step) in chain.steps.iter().enumerate() {
        let objects = chain.domain_objects(k);
        let domain: BTreeSet<_> = step.domain.iter().copied().collect();
        if domain != objects.iter().copied().collect() {
            broken_links.push(k);
            continue;
        }
        let table = chain.base.subtable(&objects)?;
        steps.push(if bounded { verify_retract_bounded(&table, step)? } else { verify_retract(&table, step)? });
    }
    let finals: BTreeSet<_> = chain.final_objects().into_iter().collect();
    let missing_extremal = extremal_set(grid).into_iter().filter(|e| !finals.contains(e)).collect();
    Ok(ChainReport { steps, broken_links, missing_extremal })
}

/// Every retract from the final table onto a proper subset that still
/// contains the extremal points.
pub fn further_retracts(grid: &GridComplex, chain: &RetractChain) -> Result<Vec<(Direction, Vec<VertexId>)>> {
    let table = chain.final_table()?;
    let ext: BTreeSet<_> = extremal_set(grid).into_iter().collect();
    let finals = table.objects().to_vec();
    let required: Vec<VertexId> = finals.iter().copied().filter(|v| ext.contains(v)).collect();
    let optional: Vec<VertexId> = finals.iter().copied().filter(|v| !ext.contains(v)).collect();
    if optional.len() > SUBSET_LIMIT {
        return Err(Error::SubsetBudgetExceeded { size: optional.len(), limit: SUBSET_LIMIT });
    }
    let mut found = Vec::new();
    for mask in 0u32..(1 << optional.len()) - 1 {
        let mut subset = required.clone();
        subset.extend(optional.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v));
        subset.sort();
        for dir in [Direction::Future, Direction::Past] {
            if find_retract(&table, &subset, dir)?.is_some() {
                found.push((dir, subset.clone()));
            }
        }
    }
    Ok(found)
}

/// True iff no further nontrivial future or past retract exists.
pub fn is_minimal(grid: &GridComplex, chain: &RetractChain) -> Result<bool> {
    Ok(further_retracts(grid, chain)?.is_empty())
}

/// `Ext(τ₁(X))` sits inside the extremal objects of the final table, with
/// the same classes between extremal points.
pub fn check_bipartite_injection(grid: &GridComplex, chain: &RetractChain) -> Result<bool> {
    let table = chain.final_table()?;
    let ext = extremal_set(grid);
    if !ext.iter().all(|e| table.contains(*e)) {
        return Ok(false);
    }
    let (mins, maxs) = table.extremal_objects();
    let table_ext: BTreeSet<_> = mins.into_iter().chain(maxs).collect();
    if !ext.iter().all(|e| table_ext.contains(e)) {
        return Ok(false);
    }
    let direct = bipartite_graph(grid, chain.base.budget())?;
    Ok(same_classes(&direct, &table, &ext))
}

/// For loop-free grids: the extremal objects of the final table are exactly
/// `Ext(X)` and the two bipartite graphs agree.
pub fn check_bipartite_iso(grid: &GridComplex, chain: &RetractChain) -> Result<bool> {
    if has_directed_cycle(grid) {
        return Err(Error::NotAPospace);
    }
    let table = chain.final_table()?;
    let (mins, maxs) = table.extremal_objects();
    let table_ext: Vec<VertexId> = mins.into_iter().chain(maxs).collect::<BTreeSet<_>>().into_iter().collect();
    let ext = extremal_set(grid);
    if table_ext != ext {
        return Ok(false);
    }
    let direct = bipartite_graph(grid, chain.base.budget())?;
    Ok(same_classes(&direct, &table, &ext))
}

fn same_classes(x: &HomTable, y: &HomTable, objects: &[VertexId]) -> bool {
    objects.iter().all(|&a| {
        objects.iter().all(|&b| {
            let lhs: Vec<_> = x.hom(a, b).iter().map(|c| &c.canonical).collect();
            let rhs: Vec<_> = y.hom(a, b).iter().map(|c| &c.canonical).collect();
            lhs == rhs
        })
    })
}

/// Builds an extremal model by repeatedly retracting one non-extremal
/// object away, future retracts first, until none can be removed.
pub fn greedy_extremal_model(grid: &GridComplex, base: HomTable) -> Result<RetractChain> {
    let ext: BTreeSet<_> = extremal_set(grid).into_iter().collect();
    let mut chain = RetractChain::new(base);
    'outer: loop {
        let current = chain.final_objects();
        for dir in [Direction::Future, Direction::Past] {
            for &v in current.iter().filter(|v| !ext.contains(v)) {
                let rest: Vec<VertexId> = current.iter().copied().filter(|w| *w != v).collect();
                if chain.push_found(dir, &rest)?.is_some() {
                    continue 'outer;
                }
            }
        }
        return Ok(chain);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::full_subcategory;
    use crate::dipath::Budget;
    use crate::grid::compactify;
    use crate::scene::{q, CubicalScene};

    fn annulus() -> GridComplex {
        compactify(&CubicalScene::new(2).with_box(&[(q(1, 3), q(2, 3)), (q(1, 3), q(2, 3))])).unwrap()
    }

    fn at(g: &GridComplex, x: (i64, i64), y: (i64, i64)) -> VertexId {
        g.vertex_at(&[q(x.0, x.1), q(y.0, y.1)]).unwrap()
    }

    fn all(g: &GridComplex) -> HomTable {
        full_subcategory(g, &g.vertices().collect::<Vec<_>>(), Budget::for_grid(g)).unwrap()
    }

    #[test]
    fn annulus_chain_to_two_points() {
        let g = annulus();
        let a = at(&g, (0, 1), (0, 1));
        let b = at(&g, (1, 1), (1, 1));
        let lower_left: Vec<VertexId> = g.vertices().filter(|v| g.vertex_point(*v).iter().all(|c| *c <= q(1, 3))).collect();
        let mut chain = RetractChain::new(all(&g));
        let mut first = lower_left.clone();
        first.push(b);
        assert!(chain.push_found(Direction::Future, &first).unwrap().is_some());
        assert!(chain.push_found(Direction::Past, &[a, b]).unwrap().is_some());
        assert!(verify_extremal_model(&g, &chain).unwrap().passed());
        assert_eq!(chain.final_table().unwrap().hom_count(a, b), 2);
        assert!(is_minimal(&g, &chain).unwrap());
        assert!(check_bipartite_injection(&g, &chain).unwrap());
        assert!(check_bipartite_iso(&g, &chain).unwrap());
    }

    #[test]
    fn stopping_early_is_not_minimal() {
        let g = annulus();
        let a = at(&g, (0, 1), (0, 1));
        let p = at(&g, (1, 3), (1, 3));
        let b = at(&g, (1, 1), (1, 1));
        let mut chain = RetractChain::new(all(&g));
        let lower_left: Vec<VertexId> = g.vertices().filter(|v| g.vertex_point(*v).iter().all(|c| *c <= q(1, 3))).collect();
        let mut first = lower_left;
        first.push(b);
        chain.push_found(Direction::Future, &first).unwrap().unwrap();
        chain.push_found(Direction::Past, &[a, p, b]).unwrap().unwrap();
        assert!(verify_extremal_model(&g, &chain).unwrap().passed());
        let more = further_retracts(&g, &chain).unwrap();
        assert!(more.contains(&(Direction::Past, vec![a, b])));
        assert!(!is_minimal(&g, &chain).unwrap());
    }

    #[test]
    fn greedy_model_reaches_the_extremal_points() {
        let g = annulus();
        let chain = greedy_extremal_model(&g, all(&g)).unwrap();
        assert_eq!(chain.final_objects(), extremal_set(&g));
        assert!(verify_extremal_model(&g, &chain).unwrap().passed());
    }

    #[test]
    fn directed_circle_chain() {
        let g = compactify(&CubicalScene::new(1).with_identification(0, q(0, 1), q(1, 1))).unwrap();
        let chain = RetractChain::new(full_subcategory(&g, &[VertexId(0)], Budget::new(100, 3)).unwrap());
        assert!(check_bipartite_injection(&g, &chain).unwrap());
        assert_eq!(check_bipartite_iso(&g, &chain), Err(Error::NotAPospace));
        assert!(verify_extremal_model_bounded(&g, &chain).unwrap().passed());
    }
}

//! Explicit finite categories and exhaustive functor enumeration.

use std::collections::BTreeMap;

use crate::category::{Arrow, HomTable};
use crate::error::{Error, Result};

/// Objects are `0..objects`; arrows carry their source and target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    pub objects: usize,
    pub arrows: Vec<(usize, usize)>,
    pub identities: Vec<usize>,
    /// `(f, g) ↦ g ∘ f` for every composable pair, `f` first.
    pub compose: BTreeMap<(usize, usize), usize>,
}

impl FiniteCategory {
    pub fn hom(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&f| self.arrows[f] == (a, b))
    }

    /// Identity, closure, unit and associativity laws.
    pub fn is_valid(&self) -> bool {
        let n = self.arrows.len();
        if self.identities.len() != self.objects || self.arrows.iter().any(|&(a, b)| a >= self.objects || b >= self.objects) {
            return false;
        }
        if self.identities.iter().enumerate().any(|(a, &i)| i >= n || self.arrows[i] != (a, a)) {
            return false;
        }
        for f in 0..n {
            for g in 0..n {
                let composable = self.arrows[f].1 == self.arrows[g].0;
                match self.compose.get(&(f, g)) {
                    None if composable => return false,
                    Some(_) if !composable => return false,
                    Some(&h) if self.arrows[h] != (self.arrows[f].0, self.arrows[g].1) => return false,
                    _ => {}
                }
            }
        }
        for f in 0..n {
            let (a, b) = self.arrows[f];
            if self.compose[&(self.identities[a], f)] != f || self.compose[&(f, self.identities[b])] != f {
                return false;
            }
        }
        for (&(f, g), &fg) in &self.compose {
            for h in self.hom_from(self.arrows[g].1) {
                if self.compose[&(fg, h)] != self.compose[&(f, self.compose[&(g, h)])] {
                    return false;
                }
            }
        }
        true
    }

    fn hom_from(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&f| self.arrows[f].0 == a)
    }

    /// The category of an exact hom-table, with the arrow numbering.
    pub fn from_table(table: &HomTable) -> Result<(FiniteCategory, BTreeMap<Arrow, usize>)> {
        let objects = table.objects();
        let pos: BTreeMap<_, _> = objects.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut arrows = Vec::new();
        let mut number = BTreeMap::new();
        for &a in objects {
            for &b in objects {
                if !table.is_exact(a, b) {
                    return Err(Error::InexactHomSet { from: a, to: b });
                }
                for f in table.arrows(a, b) {
                    number.insert(f, arrows.len());
                    arrows.push((pos[&a], pos[&b]));
                }
            }
        }
        let identities = objects.iter().map(|&a| number[&table.identity(a)]).collect();
        let mut compose = BTreeMap::new();
        for (&f, &i) in &number {
            for (&g, &j) in number.range(Arrow { from: f.to, to: f.to, index: 0 }..) {
                if g.from != f.to {
                    break;
                }
                let h = table.compose(f, g).ok_or(Error::InexactHomSet { from: f.from, to: g.to })?;
                compose.insert((i, j), number[&h]);
            }
        }
        Ok((FiniteCategory { objects: objects.len(), arrows, identities, compose }, number))
    }
}

/// A functor as object and arrow images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Functor {
    pub objects: Vec<usize>,
    pub arrows: Vec<usize>,
}

/// Every functor `src → tgt`, by backtracking over arrow images with each
/// composition law checked as soon as its three arrows are assigned.
pub fn functors(src: &FiniteCategory, tgt: &FiniteCategory) -> Vec<Functor> {
    let n = src.arrows.len();
    let mut order: Vec<usize> = src.identities.clone();
    order.extend((0..n).filter(|f| !src.identities.contains(f)));
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (i, f) in order.iter().enumerate() {
            r[*f] = i;
        }
        r
    };
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for (&(f, g), &h) in &src.compose {
        let last = rank[f].max(rank[g]).max(rank[h]);
        checks[last].push((f, g, h));
    }
    let mut out = Vec::new();
    let mut objects = vec![0; src.objects];
    loop {
        let mut arrows = vec![usize::MAX; n];
        extend(src, tgt, &order, &checks, &objects, 0, &mut arrows, &mut out);
        let mut k = 0;
        while k < objects.len() {
            objects[k] += 1;
            if objects[k] < tgt.objects {
                break;
            }
            objects[k] = 0;
            k += 1;
        }
        if k == objects.len() || tgt.objects == 0 {
            return out;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    src: &FiniteCategory,
    tgt: &FiniteCategory,
    order: &[usize],
    checks: &[Vec<(usize, usize, usize)>],
    objects: &[usize],
    depth: usize,
    arrows: &mut Vec<usize>,
    out: &mut Vec<Functor>,
) {
    if depth == order.len() {
        out.push(Functor { objects: objects.to_vec(), arrows: arrows.clone() });
        return;
    }
    let f = order[depth];
    let (a, b) = src.arrows[f];
    let candidates: Vec<usize> = if depth < src.objects {
        vec![tgt.identities[objects[a]]]
    } else {
        tgt.hom(objects[a], objects[b]).collect()
    };
    for c in candidates {
        arrows[f] = c;
        if checks[depth].iter().all(|&(f, g, h)| tgt.compose[&(arrows[f], arrows[g])] == arrows[h]) {
            extend(src, tgt, order, checks, objects, depth + 1, arrows, out);
        }
    }
    arrows[f] = usize::MAX;
}

/// `G ∘ F` given as images: the arrow map of `F` followed by that of `G`.
pub fn compose_functors(f: &Functor, g: &Functor) -> Functor {
    Functor {
        objects: f.objects.iter().map(|o| g.objects[*o]).collect(),
        arrows: f.arrows.iter().map(|a| g.arrows[*a]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monoid(n: usize) -> FiniteCategory {
        let mut compose = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                compose.insert((i, j), (i + j) % n);
            }
        }
        FiniteCategory { objects: 1, arrows: vec![(0, 0); n], identities: vec![0], compose }
    }

    #[test]
    fn cyclic_group_endomorphisms() {
        for n in 1..6 {
            let c = monoid(n);
            assert!(c.is_valid());
            assert_eq!(functors(&c, &c).len(), n);
        }
    }

    #[test]
    fn broken_associativity_is_detected() {
        let mut c = monoid(3);
        c.compose.insert((1, 1), 0);
        assert!(!c.is_valid());
    }
}

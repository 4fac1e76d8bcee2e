//! Finite-poset-indexed diagrams of finite sets and their colimits.
//!
//! A finite set of size `k` is the range `0..k`; a function between two such
//! sets is a lookup table. A diagram assigns a set to every object of a finite
//! poset and a function to every cover. Functoriality (all cover paths with
//! equal endpoints compose to the same function) is checked on construction.

use std::collections::HashMap;
use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

/// A finite poset presented by its covering pairs `(lower, upper)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    covers: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

/// A functor from a [`FinitePoset`] to finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDiagram {
    index: FinitePoset,
    sizes: Vec<usize>,
    maps: Vec<Vec<usize>>,
}

/// The colimit of a [`SetDiagram`]: classes of the disjoint union of all
/// values under the equivalence generated by the cover maps.
///
/// Classes are numbered by their least `(object, element)` member, which is
/// also the class representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColimitResult {
    offsets: Vec<usize>,
    class_of: Vec<usize>,
    representatives: Vec<(usize, usize)>,
}

impl FinitePoset {
    pub fn new(names: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self> {
        let n = names.len();
        let mut outgoing = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        let mut seen = std::collections::HashSet::new();
        for (c, &(lo, hi)) in covers.iter().enumerate() {
            if lo >= n || hi >= n {
                return Err(Error::NotAPoset(format!("cover ({lo},{hi}) out of range")));
            }
            if lo == hi {
                return Err(Error::NotAPoset(format!("self cover at {}", names[lo])));
            }
            if !seen.insert((lo, hi)) {
                return Err(Error::NotAPoset(format!("duplicate cover ({lo},{hi})")));
            }
            outgoing[lo].push(c);
            indegree[hi] += 1;
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(i) = ready.pop() {
            topo.push(i);
            for &c in &outgoing[i] {
                let hi = covers[c].1;
                indegree[hi] -= 1;
                if indegree[hi] == 0 {
                    ready.push(hi);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::NotAPoset("the covering relation has a cycle".into()));
        }
        Ok(FinitePoset { names, covers, outgoing, topo })
    }

    pub fn discrete(count: usize) -> Self {
        let names = (0..count).map(|i| i.to_string()).collect();
        FinitePoset::new(names, Vec::new()).expect("discrete poset")
    }

    /// `0 < 1 < ... < count-1`.
    pub fn chain(count: usize) -> Self {
        let names = (0..count).map(|i| i.to_string()).collect();
        let covers = (1..count).map(|i| (i - 1, i)).collect();
        FinitePoset::new(names, covers).expect("chain poset")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, object: usize) -> &str {
        &self.names[object]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_index(&self, lower: usize, upper: usize) -> Option<usize> {
        self.outgoing[lower].iter().copied().find(|&c| self.covers[c].1 == upper)
    }

    /// Objects in an order compatible with the covers.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Whether `lower <= upper` in the transitive closure.
    pub fn leq(&self, lower: usize, upper: usize) -> bool {
        let mut stack = vec![lower];
        let mut seen = vec![false; self.len()];
        while let Some(i) = stack.pop() {
            if i == upper {
                return true;
            }
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            stack.extend(self.outgoing[i].iter().map(|&c| self.covers[c].1));
        }
        false
    }
}

impl SetDiagram {
    /// Builds a diagram, checking map shapes and functoriality.
    pub fn new(index: FinitePoset, sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if sizes.len() != index.len() {
            return Err(Error::NotFunctorial(format!(
                "{} values for {} objects",
                sizes.len(),
                index.len()
            )));
        }
        if maps.len() != index.covers.len() {
            return Err(Error::NotFunctorial(format!(
                "{} maps for {} covers",
                maps.len(),
                index.covers.len()
            )));
        }
        for (c, (&(lo, hi), map)) in index.covers.iter().zip(&maps).enumerate() {
            if map.len() != sizes[lo] {
                return Err(Error::NotFunctorial(format!(
                    "map {c} ({} -> {}) has domain {} but the value has {} elements",
                    index.names[lo],
                    index.names[hi],
                    map.len(),
                    sizes[lo]
                )));
            }
            if let Some(&bad) = map.iter().find(|&&y| y >= sizes[hi]) {
                return Err(Error::NotFunctorial(format!(
                    "map {} -> {} sends into {bad}, outside a set of size {}",
                    index.names[lo], index.names[hi], sizes[hi]
                )));
            }
        }
        let diagram = SetDiagram { index, sizes, maps };
        diagram.check_functorial()?;
        Ok(diagram)
    }

    /// Every pair of cover paths with equal endpoints must compose to the
    /// same function. Composites from each source are propagated in
    /// topological order, comparing each new route against the first one.
    fn check_functorial(&self) -> Result<()> {
        let poset = &self.index;
        for &source in &poset.topo {
            let mut composite: HashMap<usize, Vec<usize>> = HashMap::new();
            composite.insert(source, (0..self.sizes[source]).collect());
            for &k in &poset.topo {
                let Some(from_source) = composite.get(&k).cloned() else {
                    continue;
                };
                for &c in &poset.outgoing[k] {
                    let target = poset.covers[c].1;
                    let routed: Vec<usize> = from_source.iter().map(|&x| self.maps[c][x]).collect();
                    match composite.get(&target) {
                        Some(existing) if *existing != routed => {
                            let at = existing.iter().zip(&routed).position(|(a, b)| a != b).unwrap_or(0);
                            return Err(Error::NotFunctorial(format!(
                                "two routes {} -> {} disagree on element {at}",
                                poset.names[source], poset.names[target]
                            )));
                        }
                        Some(_) => {}
                        None => {
                            composite.insert(target, routed);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn index(&self) -> &FinitePoset {
        &self.index
    }

    pub fn size(&self, object: usize) -> usize {
        self.sizes[object]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn map(&self, cover: usize) -> &[usize] {
        &self.maps[cover]
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Disjoint union of all values modulo the identifications
    /// `(i, x) ~ (j, f(x))` for every cover `f: i -> j`.
    pub fn colimit(&self) -> ColimitResult {
        let mut offsets = Vec::with_capacity(self.sizes.len() + 1);
        let mut total = 0;
        for &s in &self.sizes {
            offsets.push(total);
            total += s;
        }
        offsets.push(total);
        let mut uf = UnionFind::<usize>::new(total);
        for (&(lo, hi), map) in self.index.covers.iter().zip(&self.maps) {
            for (x, &y) in map.iter().enumerate() {
                uf.union(offsets[lo] + x, offsets[hi] + y);
            }
        }
        let mut class_of_root = HashMap::new();
        let mut class_of = Vec::with_capacity(total);
        let mut representatives = Vec::new();
        let mut object = 0;
        for g in 0..total {
            while offsets[object + 1] <= g {
                object += 1;
            }
            let root = uf.find_mut(g);
            let class = *class_of_root.entry(root).or_insert_with(|| {
                representatives.push((object, g - offsets[object]));
                representatives.len() - 1
            });
            class_of.push(class);
        }
        ColimitResult { offsets, class_of, representatives }
    }

    /// The unique map `h` out of the colimit with `h(inject(i, x)) = legs[i][x]`.
    pub fn cocone_factorization(&self, legs: &[Vec<usize>], target_size: usize) -> Result<Vec<usize>> {
        if legs.len() != self.sizes.len() {
            return Err(Error::NotACocone(format!(
                "{} legs for {} objects",
                legs.len(),
                self.sizes.len()
            )));
        }
        for (i, leg) in legs.iter().enumerate() {
            if leg.len() != self.sizes[i] || leg.iter().any(|&y| y >= target_size) {
                return Err(Error::NotACocone(format!("leg {} is not a function into the target", self.index.names[i])));
            }
        }
        for (&(lo, hi), map) in self.index.covers.iter().zip(&self.maps) {
            if let Some(x) = (0..map.len()).find(|&x| legs[lo][x] != legs[hi][map[x]]) {
                return Err(Error::NotACocone(format!(
                    "legs at {} and {} disagree on element {x}",
                    self.index.names[lo], self.index.names[hi]
                )));
            }
        }
        let colim = self.colimit();
        Ok(colim
            .representatives
            .iter()
            .map(|&(i, x)| legs[i][x])
            .collect())
    }
}

impl ColimitResult {
    pub fn apex_size(&self) -> usize {
        self.representatives.len()
    }

    pub fn inject(&self, object: usize, element: usize) -> usize {
        self.class_of[self.offsets[object] + element]
    }

    /// Classes of the elements of one object, indexed by element.
    pub fn injection(&self, object: usize) -> &[usize] {
        &self.class_of[self.offsets[object]..self.offsets[object + 1]]
    }

    pub fn representative(&self, class: usize) -> (usize, usize) {
        self.representatives[class]
    }

    pub fn representatives(&self) -> &[(usize, usize)] {
        &self.representatives
    }

    /// Every `(object, element)` pair, grouped by class.
    pub fn members(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.apex_size()];
        for object in 0..self.offsets.len() - 1 {
            for (x, &c) in self.injection(object).iter().enumerate() {
                out[c].push((object, x));
            }
        }
        out
    }
}

/// The diagram over the disjoint sum of the index posets. Component `k`
/// occupies a contiguous block of objects, in order.
pub fn sum_diagrams(ds: &[SetDiagram]) -> SetDiagram {
    let mut names = Vec::new();
    let mut covers = Vec::new();
    let mut sizes = Vec::new();
    let mut maps = Vec::new();
    for (k, d) in ds.iter().enumerate() {
        let base = names.len();
        names.extend(d.index.names.iter().map(|n| format!("{k}:{n}")));
        covers.extend(d.index.covers.iter().map(|&(a, b)| (base + a, base + b)));
        sizes.extend_from_slice(&d.sizes);
        maps.extend(d.maps.iter().cloned());
    }
    let index = FinitePoset::new(names, covers).expect("a sum of posets is a poset");
    SetDiagram::new(index, sizes, maps).expect("a sum of functors is a functor")
}

/// Object offsets of each summand inside [`sum_diagrams`]'s output.
pub fn sum_offsets(ds: &[SetDiagram]) -> Vec<usize> {
    let mut acc = 0;
    ds.iter()
        .map(|d| {
            let at = acc;
            acc += d.index.len();
            at
        })
        .collect()
}

/// The pointwise product over `I x J`: object `(i, j)` has index
/// `i * |J| + j` and element `(x, y)` is encoded as `x * |b(j)| + y`.
pub fn product_diagram(a: &SetDiagram, b: &SetDiagram) -> SetDiagram {
    let (ni, nj) = (a.index.len(), b.index.len());
    let obj = |i: usize, j: usize| i * nj + j;
    let mut names = Vec::with_capacity(ni * nj);
    let mut sizes = Vec::with_capacity(ni * nj);
    for i in 0..ni {
        for j in 0..nj {
            names.push(format!("({},{})", a.index.names[i], b.index.names[j]));
            sizes.push(a.sizes[i] * b.sizes[j]);
        }
    }
    let mut covers = Vec::new();
    let mut maps = Vec::new();
    for (c, &(lo, hi)) in a.index.covers.iter().enumerate() {
        for j in 0..nj {
            let bj = b.sizes[j];
            covers.push((obj(lo, j), obj(hi, j)));
            maps.push(
                (0..a.sizes[lo] * bj)
                    .map(|e| a.maps[c][e / bj] * bj + e % bj)
                    .collect(),
            );
        }
    }
    for (c, &(lo, hi)) in b.index.covers.iter().enumerate() {
        for i in 0..ni {
            let (blo, bhi) = (b.sizes[lo], b.sizes[hi]);
            covers.push((obj(i, lo), obj(i, hi)));
            maps.push(
                (0..a.sizes[i] * blo)
                    .map(|e| (e / blo) * bhi + b.maps[c][e % blo])
                    .collect(),
            );
        }
    }
    let index = FinitePoset::new(names, covers).expect("a product of posets is a poset");
    SetDiagram::new(index, sizes, maps).expect("a product of functors is a functor")
}

/// The canonical comparison `colim(a x b) -> colim(a) x colim(b)`, as a table
/// from product classes to pairs of classes.
pub fn product_comparison(a: &SetDiagram, b: &SetDiagram) -> Vec<(usize, usize)> {
    let (ca, cb) = (a.colimit(), b.colimit());
    let p = product_diagram(a, b);
    let cp = p.colimit();
    let nj = b.index.len();
    cp.representatives()
        .iter()
        .map(|&(o, e)| {
            let (i, j) = (o / nj, o % nj);
            let bj = b.sizes[j];
            (ca.inject(i, e / bj), cb.inject(j, e % bj))
        })
        .collect()
}

impl fmt::Display for ColimitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "colimit with {} classes", self.apex_size())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span() -> SetDiagram {
        let index = FinitePoset::new(vec!["a".into(), "b".into(), "c".into()], vec![(0, 1), (0, 2)]).unwrap();
        SetDiagram::new(index, vec![1, 1, 1], vec![vec![0], vec![0]]).unwrap()
    }

    #[test]
    fn coproduct_of_discrete_objects() {
        let d = SetDiagram::new(FinitePoset::discrete(2), vec![2, 1], vec![]).unwrap();
        assert_eq!(d.colimit().apex_size(), 3);
    }

    #[test]
    fn constant_map_collapses_to_one_class() {
        let d = SetDiagram::new(FinitePoset::chain(2), vec![2, 1], vec![vec![0, 0]]).unwrap();
        let c = d.colimit();
        assert_eq!(c.apex_size(), 1);
        assert_eq!(c.inject(0, 0), c.inject(0, 1));
        assert_eq!(c.inject(0, 1), c.inject(1, 0));
    }

    #[test]
    fn pushout_of_points() {
        assert_eq!(span().colimit().apex_size(), 1);
    }

    #[test]
    fn representatives_are_least_pairs() {
        let d = SetDiagram::new(FinitePoset::chain(2), vec![2, 3], vec![vec![2, 0]]).unwrap();
        let c = d.colimit();
        // classes: {(0,0),(1,2)}, {(0,1),(1,0)}, {(1,1)}
        assert_eq!(c.representatives(), &[(0, 0), (0, 1), (1, 1)]);
        assert_eq!(c.inject(1, 2), 0);
        assert_eq!(c.inject(1, 0), 1);
    }

    #[test]
    fn non_commuting_square_is_rejected() {
        let names = vec!["bot".into(), "l".into(), "r".into(), "top".into()];
        let index = FinitePoset::new(names, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let maps = vec![vec![0], vec![0], vec![0], vec![1]];
        let err = SetDiagram::new(index, vec![1, 1, 1, 2], maps).unwrap_err();
        assert!(matches!(err, Error::NotFunctorial(_)));
    }

    #[test]
    fn malformed_maps_are_rejected() {
        let e = SetDiagram::new(FinitePoset::chain(2), vec![2, 1], vec![vec![0, 1]]).unwrap_err();
        assert!(matches!(e, Error::NotFunctorial(_)));
        let e = SetDiagram::new(FinitePoset::chain(2), vec![2, 1], vec![vec![0]]).unwrap_err();
        assert!(matches!(e, Error::NotFunctorial(_)));
    }

    #[test]
    fn cyclic_index_is_rejected() {
        let names = vec!["x".into(), "y".into()];
        assert!(FinitePoset::new(names, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn constant_cocone_factors_through_constant() {
        let d = span();
        let legs = vec![vec![4], vec![4], vec![4]];
        assert_eq!(d.cocone_factorization(&legs, 5).unwrap(), vec![4]);
    }

    #[test]
    fn injections_factor_as_identity() {
        let d = SetDiagram::new(FinitePoset::chain(3), vec![3, 2, 2], vec![vec![0, 1, 1], vec![1, 0]]).unwrap();
        let c = d.colimit();
        let legs: Vec<Vec<usize>> = (0..3).map(|i| c.injection(i).to_vec()).collect();
        let h = d.cocone_factorization(&legs, c.apex_size()).unwrap();
        assert_eq!(h, (0..c.apex_size()).collect::<Vec<_>>());
    }

    #[test]
    fn non_cocone_is_rejected() {
        let d = span();
        let legs = vec![vec![0], vec![1], vec![0]];
        assert!(matches!(d.cocone_factorization(&legs, 2), Err(Error::NotACocone(_))));
    }

    #[test]
    fn sums_add_colimit_sizes() {
        let a = SetDiagram::new(FinitePoset::discrete(1), vec![2], vec![]).unwrap();
        let b = SetDiagram::new(FinitePoset::discrete(1), vec![3], vec![]).unwrap();
        assert_eq!(sum_diagrams(&[a.clone(), b]).colimit().apex_size(), 5);
        let single = sum_diagrams(std::slice::from_ref(&a));
        assert_eq!(single.sizes(), a.sizes());
        assert_eq!(single.colimit().apex_size(), 2);
    }

    #[test]
    fn product_with_point_is_unit() {
        let a = SetDiagram::new(FinitePoset::chain(3), vec![3, 2, 2], vec![vec![0, 1, 1], vec![1, 0]]).unwrap();
        let point = SetDiagram::new(FinitePoset::discrete(1), vec![1], vec![]).unwrap();
        let p = product_diagram(&a, &point);
        assert_eq!(p.sizes(), a.sizes());
        assert_eq!(p.maps(), a.maps());
    }

    #[test]
    fn product_of_discrete_diagrams() {
        let a = SetDiagram::new(FinitePoset::discrete(2), vec![2, 1], vec![]).unwrap();
        let b = SetDiagram::new(FinitePoset::discrete(2), vec![1, 2], vec![]).unwrap();
        assert_eq!(product_diagram(&a, &b).colimit().apex_size(), 9);
        let cmp = product_comparison(&a, &b);
        let distinct: std::collections::HashSet<_> = cmp.iter().collect();
        assert_eq!(distinct.len(), 9);
    }
}

//! Finite flows: small semicategories whose path sets are finite.
//!
//! States and paths are addressed by dense indices; every path carries a
//! unique identifier used in files and reports. Composition is an explicit
//! table that must be defined on every composable pair (unless the flow is a
//! truncated approximation) and associative wherever both sides exist.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::diagram::{FinitePoset, SetDiagram};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathInfo {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteFlow {
    states: Vec<String>,
    paths: Vec<PathInfo>,
    compose: HashMap<(usize, usize), usize>,
    truncated: bool,
}

/// A morphism of flows as two lookup tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowMap {
    pub state_map: Vec<usize>,
    pub path_map: Vec<usize>,
}

/// The data of a square `Glob(boundary) -> A`, `Glob(boundary) -> Glob(cells)`.
///
/// Neither `attach` nor `incl` has to be one-to-one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobAttachment {
    pub g0: usize,
    pub g1: usize,
    pub boundary: Vec<String>,
    pub cells: Vec<String>,
    /// boundary element -> path of `A` from `g0` to `g1`
    pub attach: Vec<usize>,
    /// boundary element -> cell
    pub incl: Vec<usize>,
}

/// The set-pushout `T` of `attach` along `incl`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachedCellSet {
    pub labels: Vec<String>,
    /// the paths of `A` from `g0` to `g1`, in index order
    pub base_paths: Vec<usize>,
    /// path index of `A` -> class, for paths from `g0` to `g1`
    pub from_path: BTreeMap<usize, usize>,
    /// cell -> class
    pub from_cell: Vec<usize>,
}

impl DiscreteFlow {
    /// Builds a flow, validating the composition table.
    pub fn new(states: Vec<String>, paths: Vec<PathInfo>, compose: Vec<(usize, usize, usize)>) -> Result<Self> {
        Self::build(states, paths, compose, false)
    }

    /// Builds a flow whose composition may be undefined on composable pairs
    /// whose composite fell outside a bounded word universe.
    pub fn new_truncated(
        states: Vec<String>,
        paths: Vec<PathInfo>,
        compose: Vec<(usize, usize, usize)>,
    ) -> Result<Self> {
        Self::build(states, paths, compose, true)
    }

    fn build(
        states: Vec<String>,
        paths: Vec<PathInfo>,
        compose: Vec<(usize, usize, usize)>,
        truncated: bool,
    ) -> Result<Self> {
        let mut labels = HashSet::new();
        for s in &states {
            if !labels.insert(s.as_str()) {
                return Err(Error::InvalidFlow(format!("duplicate state {s:?}")));
            }
        }
        let mut ids = HashSet::new();
        for p in &paths {
            if !ids.insert(p.id.as_str()) {
                return Err(Error::InvalidFlow(format!("duplicate path id {:?}", p.id)));
            }
            if p.src >= states.len() || p.tgt >= states.len() {
                return Err(Error::InvalidFlow(format!("path {:?} has an unknown endpoint", p.id)));
            }
        }
        let mut table = HashMap::new();
        for &(p, q, r) in &compose {
            let n = paths.len();
            if p >= n || q >= n || r >= n {
                return Err(Error::InvalidFlow(format!("compose entry ({p},{q},{r}) out of range")));
            }
            let (pp, qq, rr) = (&paths[p], &paths[q], &paths[r]);
            if pp.tgt != qq.src {
                return Err(Error::InvalidFlow(format!(
                    "compose entry [{}, {}] is not composable",
                    pp.id, qq.id
                )));
            }
            if rr.src != pp.src || rr.tgt != qq.tgt {
                return Err(Error::InvalidFlow(format!(
                    "{} * {} = {} has the wrong endpoints",
                    pp.id, qq.id, rr.id
                )));
            }
            if table.insert((p, q), r).is_some() {
                return Err(Error::InvalidFlow(format!("{} * {} defined twice", pp.id, qq.id)));
            }
        }
        let flow = DiscreteFlow { states, paths, compose: table, truncated };
        if !truncated {
            for (p, q) in flow.composable_pairs() {
                if !flow.compose.contains_key(&(p, q)) {
                    return Err(Error::InvalidFlow(format!(
                        "composition is not total: {} * {} is missing",
                        flow.paths[p].id, flow.paths[q].id
                    )));
                }
            }
        }
        if let Some((p, q, r)) = flow.associativity_witness() {
            return Err(Error::InvalidFlow(format!(
                "composition is not associative at ({}, {}, {})",
                flow.paths[p].id, flow.paths[q].id, flow.paths[r].id
            )));
        }
        Ok(flow)
    }

    /// A composable triple on which both bracketings exist and differ.
    pub fn associativity_witness(&self) -> Option<(usize, usize, usize)> {
        for (p, q, pq) in self.compose_table() {
            for r in self.paths_from(self.paths[q].tgt) {
                let left = self.compose.get(&(pq, r));
                let right = self.compose.get(&(q, r)).and_then(|&qr| self.compose.get(&(p, qr)));
                match (left, right) {
                    (Some(a), Some(b)) if a != b => return Some((p, q, r)),
                    (Some(_), None) | (None, Some(_)) if !self.truncated => return Some((p, q, r)),
                    _ => {}
                }
            }
        }
        None
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_label(&self, state: usize) -> &str {
        &self.states[state]
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn paths(&self) -> &[PathInfo] {
        &self.paths
    }

    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn path(&self, p: usize) -> &PathInfo {
        &self.paths[p]
    }

    pub fn path_index(&self, id: &str) -> Option<usize> {
        self.paths.iter().position(|p| p.id == id)
    }

    pub fn paths_between(&self, src: usize, tgt: usize) -> Vec<usize> {
        (0..self.paths.len())
            .filter(|&p| self.paths[p].src == src && self.paths[p].tgt == tgt)
            .collect()
    }

    pub fn paths_from(&self, src: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.paths.len()).filter(move |&p| self.paths[p].src == src)
    }

    pub fn compose(&self, p: usize, q: usize) -> Option<usize> {
        self.compose.get(&(p, q)).copied()
    }

    /// Composition entries `(p, q, p*q)`, sorted.
    pub fn compose_table(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<_> = self.compose.iter().map(|(&(p, q), &r)| (p, q, r)).collect();
        out.sort_unstable();
        out
    }

    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.paths.len() {
            for q in self.paths_from(self.paths[p].tgt) {
                out.push((p, q));
            }
        }
        out
    }

    /// True for approximations built under a word-length cap.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// A fresh label not used by any state.
    pub(crate) fn fresh_state_label(&self, stem: &str) -> String {
        (0..)
            .map(|k| format!("{stem}{k}"))
            .find(|l| self.state_index(l).is_none())
            .expect("unbounded supply")
    }
}

impl FlowMap {
    pub fn identity(flow: &DiscreteFlow) -> Self {
        FlowMap {
            state_map: (0..flow.state_count()).collect(),
            path_map: (0..flow.path_count()).collect(),
        }
    }

    pub fn then(&self, next: &FlowMap) -> FlowMap {
        FlowMap {
            state_map: self.state_map.iter().map(|&s| next.state_map[s]).collect(),
            path_map: self.path_map.iter().map(|&p| next.path_map[p]).collect(),
        }
    }

    pub fn is_injective_on_paths(&self) -> bool {
        let distinct: HashSet<_> = self.path_map.iter().collect();
        distinct.len() == self.path_map.len()
    }
}

/// Checks that `f` preserves sources, targets and composition pointwise.
pub fn verify_flow_map(src: &DiscreteFlow, dst: &DiscreteFlow, f: &FlowMap) -> bool {
    flow_map_violation(src, dst, f).is_none()
}

/// The first violated preservation equation, if any.
pub fn flow_map_violation(src: &DiscreteFlow, dst: &DiscreteFlow, f: &FlowMap) -> Option<String> {
    if f.state_map.len() != src.state_count() || f.path_map.len() != src.path_count() {
        return Some("table sizes do not match the source flow".into());
    }
    if f.state_map.iter().any(|&s| s >= dst.state_count()) || f.path_map.iter().any(|&p| p >= dst.path_count()) {
        return Some("table entries fall outside the target flow".into());
    }
    for (p, info) in src.paths.iter().enumerate() {
        let image = &dst.paths[f.path_map[p]];
        if image.src != f.state_map[info.src] || image.tgt != f.state_map[info.tgt] {
            return Some(format!("endpoints of {} are not preserved", info.id));
        }
    }
    for (&(p, q), &r) in &src.compose {
        match dst.compose(f.path_map[p], f.path_map[q]) {
            Some(image) if image == f.path_map[r] => {}
            None if dst.truncated => {}
            _ => {
                return Some(format!(
                    "f({} * {}) != f({}) * f({})",
                    src.paths[p].id, src.paths[q].id, src.paths[p].id, src.paths[q].id
                ))
            }
        }
    }
    None
}

/// The globe on a set of cells: two states `0` and `1`, one path `0 -> 1`
/// per cell and no composition.
pub fn make_glob(cells: &[String]) -> DiscreteFlow {
    let paths = cells
        .iter()
        .map(|c| PathInfo { id: c.clone(), src: 0, tgt: 1 })
        .collect();
    DiscreteFlow::new(vec!["0".into(), "1".into()], paths, Vec::new()).expect("globes are flows")
}

impl GlobAttachment {
    /// Checks the attachment against its base flow.
    pub fn validate(&self, base: &DiscreteFlow) -> Result<()> {
        if self.g0 >= base.state_count() || self.g1 >= base.state_count() {
            return Err(Error::InvalidAttachment("g0 or g1 is not a state".into()));
        }
        if self.attach.len() != self.boundary.len() || self.incl.len() != self.boundary.len() {
            return Err(Error::InvalidAttachment("attach and incl must cover the boundary".into()));
        }
        for (b, (&p, &z)) in self.attach.iter().zip(&self.incl).enumerate() {
            if p >= base.path_count() {
                return Err(Error::InvalidAttachment(format!("{} attaches to no path", self.boundary[b])));
            }
            let info = base.path(p);
            if (info.src, info.tgt) != (self.g0, self.g1) {
                return Err(Error::InvalidAttachment(format!(
                    "{} attaches to {}, which does not run from g0 to g1",
                    self.boundary[b], info.id
                )));
            }
            if z >= self.cells.len() {
                return Err(Error::InvalidAttachment(format!("{} includes into no cell", self.boundary[b])));
            }
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.cells.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::InvalidAttachment(format!("duplicate cell {dup:?}")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.boundary.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::InvalidAttachment(format!("duplicate boundary element {dup:?}")));
        }
        Ok(())
    }

    /// The attachment with `boundary = cells = P_{g0,g1}A` and both maps the
    /// identity; its pushout is `A` itself.
    pub fn identity(base: &DiscreteFlow, g0: usize, g1: usize) -> Self {
        let hom = base.paths_between(g0, g1);
        let ids: Vec<String> = hom.iter().map(|&p| base.path(p).id.clone()).collect();
        GlobAttachment {
            g0,
            g1,
            boundary: ids.clone(),
            cells: ids,
            attach: hom,
            incl: (0..base.paths_between(g0, g1).len()).collect(),
        }
    }

    /// The globe `Glob(cells)`.
    pub fn cell_globe(&self) -> DiscreteFlow {
        make_glob(&self.cells)
    }

    /// The set-pushout `T` of `attach` along `incl`, computed as the colimit
    /// of the span `hom(g0,g1) <- boundary -> cells`.
    pub fn attached_cells(&self, base: &DiscreteFlow) -> AttachedCellSet {
        let hom = base.paths_between(self.g0, self.g1);
        let position: HashMap<usize, usize> = hom.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let index = FinitePoset::new(
            vec!["boundary".into(), "paths".into(), "cells".into()],
            vec![(0, 1), (0, 2)],
        )
        .expect("span");
        let diagram = SetDiagram::new(
            index,
            vec![self.boundary.len(), hom.len(), self.cells.len()],
            vec![self.attach.iter().map(|p| position[p]).collect(), self.incl.clone()],
        )
        .expect("spans are functorial");
        let colim = diagram.colimit();
        // Boundary elements always meet a path or a cell, so classes are
        // relabelled by their least path (else least cell).
        let members = colim.members();
        let mut order: Vec<usize> = (0..colim.apex_size()).collect();
        let key = |c: usize| {
            let path = members[c].iter().filter(|m| m.0 == 1).map(|m| m.1).min();
            let cell = members[c].iter().filter(|m| m.0 == 2).map(|m| m.1).min();
            (path.is_none(), path.or(cell))
        };
        order.sort_by_key(|&c| key(c));
        let mut relabel = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let mut labels: Vec<String> = Vec::with_capacity(order.len());
        for &c in &order {
            let mut label = match key(c) {
                (false, Some(p)) => base.path(hom[p]).id.clone(),
                (_, Some(z)) => self.cells[z].clone(),
                _ => unreachable!("boundary-only classes cannot occur"),
            };
            // a cell may share its name with an unrelated path
            while labels.contains(&label) {
                label.push('\'');
            }
            labels.push(label);
        }
        AttachedCellSet {
            labels,
            base_paths: hom.clone(),
            from_path: hom
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, relabel[colim.inject(1, i)]))
                .collect(),
            from_cell: (0..self.cells.len()).map(|z| relabel[colim.inject(2, z)]).collect(),
        }
    }
}

impl AttachedCellSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Whether the state digraph (an edge for every nonempty path set, plus
/// `g0 -> g1` when there are cells) is acyclic.
pub fn is_loop_free(base: &DiscreteFlow, att: &GlobAttachment) -> bool {
    let mut edges: Vec<(usize, usize)> = base.paths.iter().map(|p| (p.src, p.tgt)).collect();
    if !att.cells.is_empty() {
        edges.push((att.g0, att.g1));
    }
    is_acyclic(base.state_count(), &edges)
}

pub(crate) fn is_acyclic(nodes: usize, edges: &[(usize, usize)]) -> bool {
    longest_chain(nodes, edges).is_some()
}

/// Number of edges on a longest path, or `None` when there is a cycle.
pub(crate) fn longest_chain(nodes: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let mut out = vec![Vec::new(); nodes];
    let mut indegree = vec![0usize; nodes];
    for &(a, b) in edges {
        out[a].push(b);
        indegree[b] += 1;
    }
    let mut ready: Vec<usize> = (0..nodes).filter(|&i| indegree[i] == 0).collect();
    let mut depth = vec![0usize; nodes];
    let mut visited = 0;
    while let Some(a) = ready.pop() {
        visited += 1;
        for &b in &out[a] {
            depth[b] = depth[b].max(depth[a] + 1);
            indegree[b] -= 1;
            if indegree[b] == 0 {
                ready.push(b);
            }
        }
    }
    (visited == nodes).then(|| depth.into_iter().max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn path(id: &str, src: usize, tgt: usize) -> PathInfo {
        PathInfo { id: id.into(), src, tgt }
    }

    fn three_state() -> DiscreteFlow {
        DiscreteFlow::new(
            strings(&["0", "1", "2"]),
            vec![path("p", 0, 1), path("q", 1, 2), path("r", 0, 2)],
            vec![(0, 1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn glob_shapes() {
        let empty = make_glob(&[]);
        assert_eq!(empty.state_count(), 2);
        assert_eq!(empty.path_count(), 0);
        let one = make_glob(&strings(&["c"]));
        assert_eq!(one.paths_between(0, 1), vec![0]);
        let three = make_glob(&strings(&["x", "y", "z"]));
        assert_eq!(three.paths_between(0, 1).len(), 3);
        assert!(three.composable_pairs().is_empty());
    }

    #[test]
    fn missing_composite_is_rejected() {
        let err = DiscreteFlow::new(
            strings(&["0", "1", "2"]),
            vec![path("p", 0, 1), path("q", 1, 2), path("r", 0, 2)],
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not total"));
    }

    #[test]
    fn non_associative_table_reports_witness() {
        // a: 0->0 with a*a = b, b*a = a, a*b = b: (a*a)*a = b*a = a but a*(a*a) = a*b = b
        let err = DiscreteFlow::new(
            strings(&["0"]),
            vec![path("a", 0, 0), path("b", 0, 0)],
            vec![(0, 0, 1), (1, 0, 0), (0, 1, 1), (1, 1, 1)],
        )
        .unwrap_err();
        let Error::InvalidFlow(msg) = err else { panic!("wrong error") };
        assert!(msg.contains("not associative at (a, a, a)"), "{msg}");
    }

    #[test]
    fn wrong_endpoints_are_rejected() {
        let err = DiscreteFlow::new(
            strings(&["0", "1", "2"]),
            vec![path("p", 0, 1), path("q", 1, 2), path("r", 0, 1)],
            vec![(0, 1, 2)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidFlow(_)));
    }

    #[test]
    fn flow_map_checks() {
        let a = three_state();
        assert!(verify_flow_map(&a, &a, &FlowMap::identity(&a)));
        // r' is parallel to r but not the composite
        let b = DiscreteFlow::new(
            strings(&["0", "1", "2"]),
            vec![path("p", 0, 1), path("q", 1, 2), path("r", 0, 2), path("r2", 0, 2)],
            vec![(0, 1, 2)],
        )
        .unwrap();
        let broken = FlowMap { state_map: vec![0, 1, 2], path_map: vec![0, 1, 3] };
        assert!(!verify_flow_map(&a, &b, &broken));
        let good = FlowMap { state_map: vec![0, 1, 2], path_map: vec![0, 1, 2] };
        assert!(verify_flow_map(&a, &b, &good));
    }

    #[test]
    fn loop_freeness() {
        let glob = make_glob(&strings(&["c"]));
        let att = GlobAttachment {
            g0: 0,
            g1: 1,
            boundary: vec![],
            cells: strings(&["z"]),
            attach: vec![],
            incl: vec![],
        };
        assert!(is_loop_free(&glob, &att));

        let cyclic = DiscreteFlow::new(
            strings(&["0", "1"]),
            vec![path("p", 0, 1), path("q", 1, 0), path("pq", 0, 0), path("qp", 1, 1)],
            vec![(0, 1, 2), (1, 0, 3), (2, 0, 0), (3, 1, 1), (0, 3, 0), (1, 2, 1), (2, 2, 2), (3, 3, 3)],
        )
        .unwrap();
        let none = GlobAttachment { g0: 0, g1: 1, boundary: vec![], cells: vec![], attach: vec![], incl: vec![] };
        assert!(!is_loop_free(&cyclic, &none));

        let linear = DiscreteFlow::new(
            strings(&["0", "1", "2", "3"]),
            vec![path("a", 0, 1), path("b", 1, 2), path("c", 2, 3), path("ab", 0, 2), path("bc", 1, 3), path("abc", 0, 3)],
            vec![(0, 1, 3), (1, 2, 4), (3, 2, 5), (0, 4, 5)],
        )
        .unwrap();
        let att = GlobAttachment { g0: 1, g1: 2, boundary: vec![], cells: strings(&["z"]), attach: vec![], incl: vec![] };
        assert!(is_loop_free(&linear, &att));
        let back = GlobAttachment { g0: 2, g1: 1, ..att };
        assert!(!is_loop_free(&linear, &back));
    }

    #[test]
    fn attached_cells_pushout() {
        let a = three_state();
        let att = GlobAttachment {
            g0: 1,
            g1: 2,
            boundary: strings(&["s"]),
            cells: strings(&["s", "z"]),
            attach: vec![1],
            incl: vec![0],
        };
        att.validate(&a).unwrap();
        let t = att.attached_cells(&a);
        assert_eq!(t.labels, strings(&["q", "z"]));
        assert_eq!(t.from_path[&1], t.from_cell[0]);
        assert_ne!(t.from_cell[0], t.from_cell[1]);
    }

    #[test]
    fn non_injective_inclusion_identifies_paths() {
        let a = DiscreteFlow::new(strings(&["0", "1"]), vec![path("p", 0, 1), path("q", 0, 1)], vec![]).unwrap();
        let att = GlobAttachment {
            g0: 0,
            g1: 1,
            boundary: strings(&["s", "t"]),
            cells: strings(&["z"]),
            attach: vec![0, 1],
            incl: vec![0, 0],
        };
        let t = att.attached_cells(&a);
        assert_eq!(t.len(), 1);
        assert_eq!(t.from_path[&0], t.from_path[&1]);
    }

    #[test]
    fn attachment_validation() {
        let a = three_state();
        let bad = GlobAttachment { g0: 0, g1: 2, boundary: strings(&["s"]), cells: strings(&["z"]), attach: vec![0], incl: vec![0] };
        assert!(matches!(bad.validate(&a), Err(Error::InvalidAttachment(_))));
    }
}

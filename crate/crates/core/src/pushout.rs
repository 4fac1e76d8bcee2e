//! Pushouts of flows along the generating shapes, computed from
//! presentations: old paths and new cells as letters, the composition of the
//! base flow and the cell identifications as relations.

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::flow::{flow_map_violation, DiscreteFlow, FlowMap, GlobAttachment, PathInfo};
use crate::words::{WordQuotient, WordSystem};

/// A globe attachment pushout with its presentation kept for comparisons.
#[derive(Debug, Clone)]
pub struct GlobPushout {
    pub flow: DiscreteFlow,
    /// canonical map `A -> X`
    pub from_base: FlowMap,
    /// canonical map `Glob(Z) -> X`
    pub from_cells: FlowMap,
    pub system: WordSystem,
    pub quotient: WordQuotient,
}

/// Result of identifying two states.
#[derive(Debug, Clone)]
pub struct MergePushout {
    pub flow: DiscreteFlow,
    pub map: FlowMap,
    /// paths not in the image of the old ones
    pub new_paths: Vec<usize>,
}

/// Letter of the glob presentation: old paths first, then cell classes.
pub fn old_path_letter(path: usize) -> usize {
    path
}

pub fn new_cell_letter(base: &DiscreteFlow, class: usize) -> usize {
    base.path_count() + class
}

/// The pushout of `A <- Glob(boundary) -> Glob(cells)`.
pub fn pushout_glob_oracle(base: &DiscreteFlow, att: &GlobAttachment, cap: Option<usize>) -> Result<GlobPushout> {
    att.validate(base)?;
    let cells = att.attached_cells(base);
    let mut system = WordSystem::new(base.states().to_vec());
    for p in base.paths() {
        system.add_letter(p.id.clone(), p.src, p.tgt);
    }
    for label in &cells.labels {
        system.add_letter(format!("[{label}]"), att.g0, att.g1);
    }
    for (p, q, r) in base.compose_table() {
        system.add_product(p, q, r);
    }
    for (&q, &class) in &cells.from_path {
        system.add_equation(new_cell_letter(base, class), old_path_letter(q));
    }
    let quotient = system.quotient(cap)?;
    let flow = quotient.to_flow(&system)?;
    let from_base = FlowMap {
        state_map: (0..base.state_count()).collect(),
        path_map: (0..base.path_count())
            .map(|p| quotient.class_of_word(&[old_path_letter(p)]).expect("letters are words"))
            .collect(),
    };
    let glob = att.cell_globe();
    let from_cells = FlowMap {
        state_map: vec![att.g0, att.g1],
        path_map: cells
            .from_cell
            .iter()
            .map(|&c| quotient.class_of_word(&[new_cell_letter(base, c)]).expect("letters are words"))
            .collect(),
    };
    check_map(base, &flow, &from_base)?;
    check_map(&glob, &flow, &from_cells)?;
    Ok(GlobPushout { flow, from_base, from_cells, system, quotient })
}

/// Adds one isolated state; the path data is unchanged.
pub fn pushout_add_state(base: &DiscreteFlow) -> (DiscreteFlow, FlowMap) {
    let mut states = base.states().to_vec();
    states.push(base.fresh_state_label("new"));
    let flow = DiscreteFlow::new(states, base.paths().to_vec(), base.compose_table()).expect("same table");
    let map = FlowMap::identity(base);
    (flow, map)
}

/// Identifies the states `s` and `t`, freely adding the composites that pass
/// through the merged state.
pub fn pushout_merge_states(base: &DiscreteFlow, s: usize, t: usize, cap: Option<usize>) -> Result<MergePushout> {
    if s >= base.state_count() || t >= base.state_count() {
        return Err(Error::InvalidFlow("merged states must exist".into()));
    }
    if s == t {
        return Ok(MergePushout { flow: base.clone(), map: FlowMap::identity(base), new_paths: Vec::new() });
    }
    let state_map: Vec<usize> = (0..base.state_count())
        .map(|x| {
            let x = if x == t { s } else { x };
            if x > t {
                x - 1
            } else {
                x
            }
        })
        .collect();
    let states: Vec<String> = (0..base.state_count())
        .filter(|&x| x != t)
        .map(|x| base.state_label(x).to_string())
        .collect();
    let mut system = WordSystem::new(states);
    for p in base.paths() {
        system.add_letter(p.id.clone(), state_map[p.src], state_map[p.tgt]);
    }
    for (p, q, r) in base.compose_table() {
        system.add_product(p, q, r);
    }
    let quotient = system.quotient(cap)?;
    let flow = quotient.to_flow(&system)?;
    let path_map: Vec<usize> = (0..base.path_count())
        .map(|p| quotient.class_of_word(&[p]).expect("letters are words"))
        .collect();
    let map = FlowMap { state_map, path_map };
    check_map(base, &flow, &map)?;
    let new_paths = (0..flow.path_count()).filter(|x| !map.path_map.contains(x)).collect();
    Ok(MergePushout { flow, map, new_paths })
}

/// The colimit of `X_0 -> X_1 -> ... -> X_k` in flows, with the legs
/// `X_i -> colim`.
pub fn chain_colimit(
    base: &DiscreteFlow,
    steps: &[(DiscreteFlow, FlowMap)],
    cap: Option<usize>,
) -> Result<(DiscreteFlow, Vec<FlowMap>)> {
    let flows: Vec<&DiscreteFlow> = std::iter::once(base).chain(steps.iter().map(|(f, _)| f)).collect();
    for (i, (flow, map)) in steps.iter().enumerate() {
        if let Some(why) = flow_map_violation(flows[i], flow, map) {
            return Err(Error::InvalidFlowMap(format!("step {}: {why}", i + 1)));
        }
    }
    let mut state_offset = vec![0];
    let mut path_offset = vec![0];
    for f in &flows {
        state_offset.push(state_offset.last().unwrap() + f.state_count());
        path_offset.push(path_offset.last().unwrap() + f.path_count());
    }
    let mut uf = UnionFind::<usize>::new(*state_offset.last().unwrap());
    for (i, (_, map)) in steps.iter().enumerate() {
        for (x, &y) in map.state_map.iter().enumerate() {
            uf.union(state_offset[i] + x, state_offset[i + 1] + y);
        }
    }
    let mut state_class = vec![usize::MAX; *state_offset.last().unwrap()];
    let mut labels = Vec::new();
    let mut root_class = std::collections::HashMap::new();
    for (i, f) in flows.iter().enumerate() {
        for x in 0..f.state_count() {
            let root = uf.find(state_offset[i] + x);
            let class = *root_class.entry(root).or_insert_with(|| {
                labels.push(format!("{i}:{}", f.state_label(x)));
                labels.len() - 1
            });
            state_class[state_offset[i] + x] = class;
        }
    }
    let mut system = WordSystem::new(labels);
    for (i, f) in flows.iter().enumerate() {
        for p in f.paths() {
            system.add_letter(
                format!("{i}:{}", p.id),
                state_class[state_offset[i] + p.src],
                state_class[state_offset[i] + p.tgt],
            );
        }
        for (p, q, r) in f.compose_table() {
            system.add_product(path_offset[i] + p, path_offset[i] + q, path_offset[i] + r);
        }
    }
    for (i, (_, map)) in steps.iter().enumerate() {
        for (p, &q) in map.path_map.iter().enumerate() {
            system.add_equation(path_offset[i] + p, path_offset[i + 1] + q);
        }
    }
    let quotient = system.quotient(cap)?;
    let colim = quotient.to_flow(&system)?;
    let legs = flows
        .iter()
        .enumerate()
        .map(|(i, f)| FlowMap {
            state_map: (0..f.state_count()).map(|x| state_class[state_offset[i] + x]).collect(),
            path_map: (0..f.path_count())
                .map(|p| quotient.class_of_word(&[path_offset[i] + p]).expect("letters are words"))
                .collect(),
        })
        .collect();
    Ok((colim, legs))
}

fn check_map(src: &DiscreteFlow, dst: &DiscreteFlow, f: &FlowMap) -> Result<()> {
    match flow_map_violation(src, dst, f) {
        None => Ok(()),
        Some(why) => Err(Error::InvalidFlowMap(why)),
    }
}

/// Renders the paths of a flow as `id: src -> tgt` lines.
pub fn describe_paths(flow: &DiscreteFlow) -> Vec<String> {
    flow.paths()
        .iter()
        .map(|PathInfo { id, src, tgt }| format!("{id}: {} -> {}", flow.state_label(*src), flow.state_label(*tgt)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::make_glob;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn path(id: &str, src: usize, tgt: usize) -> PathInfo {
        PathInfo { id: id.into(), src, tgt }
    }

    fn ids_between(flow: &DiscreteFlow, a: usize, b: usize) -> Vec<String> {
        flow.paths_between(a, b).into_iter().map(|p| flow.path(p).id.clone()).collect()
    }

    #[test]
    fn fresh_cell_on_single_path() {
        let a = DiscreteFlow::new(strings(&["0", "1"]), vec![path("p", 0, 1)], vec![]).unwrap();
        let att = GlobAttachment { g0: 0, g1: 1, boundary: vec![], cells: strings(&["z"]), attach: vec![], incl: vec![] };
        let x = pushout_glob_oracle(&a, &att, None).unwrap();
        assert_eq!(ids_between(&x.flow, 0, 1), ["p", "[z]"]);
    }

    #[test]
    fn three_state_attachment() {
        let a = DiscreteFlow::new(
            strings(&["0", "1", "2"]),
            vec![path("p", 0, 1), path("q", 1, 2), path("r", 0, 2)],
            vec![(0, 1, 2)],
        )
        .unwrap();
        let att = GlobAttachment {
            g0: 1,
            g1: 2,
            boundary: strings(&["s"]),
            cells: strings(&["s", "z"]),
            attach: vec![1],
            incl: vec![0],
        };
        let x = pushout_glob_oracle(&a, &att, None).unwrap();
        assert_eq!(ids_between(&x.flow, 0, 2), ["r", "p·[z]"]);
        assert_eq!(ids_between(&x.flow, 1, 2), ["q", "[z]"]);
        x.quotient.check_congruence(&x.system).unwrap();
        // the square commutes
        assert_eq!(x.from_base.path_map[1], x.from_cells.path_map[0]);
    }

    #[test]
    fn identity_attachment_reproduces_base() {
        let a = DiscreteFlow::new(
            strings(&["0", "1", "2"]),
            vec![path("p", 0, 1), path("q", 1, 2), path("r", 0, 2), path("r2", 0, 2)],
            vec![(0, 1, 2)],
        )
        .unwrap();
        let att = GlobAttachment::identity(&a, 0, 2);
        let x = pushout_glob_oracle(&a, &att, None).unwrap();
        assert_eq!(x.flow.path_count(), a.path_count());
        assert!(x.from_base.is_injective_on_paths());
    }

    #[test]
    fn cyclic_instance_needs_cap() {
        let a = DiscreteFlow::new(strings(&["0"]), vec![], vec![]).unwrap();
        let att = GlobAttachment { g0: 0, g1: 0, boundary: vec![], cells: strings(&["z"]), attach: vec![], incl: vec![] };
        assert_eq!(pushout_glob_oracle(&a, &att, None).unwrap_err(), Error::NotLoopFreeAndNoCap);
        let x = pushout_glob_oracle(&a, &att, Some(2)).unwrap();
        assert_eq!(x.flow.path_count(), 2);
    }

    #[test]
    fn add_state_examples() {
        let glob = make_glob(&strings(&["c"]));
        let (once, map) = pushout_add_state(&glob);
        assert_eq!(once.state_count(), 3);
        assert_eq!(once.path_count(), 1);
        assert_eq!(map.path_map, vec![0]);
        let (twice, _) = pushout_add_state(&once);
        assert_eq!(twice.state_count(), 4);
        assert_eq!(twice.paths(), glob.paths());
    }

    #[test]
    fn merge_endpoints_of_a_globe() {
        let glob = make_glob(&strings(&["c"]));
        assert_eq!(pushout_merge_states(&glob, 0, 1, None).unwrap_err(), Error::NotLoopFreeAndNoCap);
        let merged = pushout_merge_states(&glob, 0, 1, Some(3)).unwrap();
        let ids: Vec<_> = merged.flow.paths().iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["c", "c·c", "c·c·c"]);
        assert_eq!(merged.new_paths, vec![1, 2]);
    }

    #[test]
    fn merge_joins_two_paths() {
        let a = DiscreteFlow::new(strings(&["0", "1", "2", "3"]), vec![path("p", 0, 1), path("q", 2, 3)], vec![])
            .unwrap();
        let merged = pushout_merge_states(&a, 1, 2, None).unwrap();
        let ids: Vec<_> = merged.flow.paths().iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["p", "q", "p·q"]);
        assert_eq!(merged.new_paths, vec![2]);
        assert_eq!(merged.flow.state_count(), 3);
    }

    #[test]
    fn merge_with_itself_is_identity() {
        let a = make_glob(&strings(&["c"]));
        let merged = pushout_merge_states(&a, 1, 1, None).unwrap();
        assert_eq!(merged.flow, a);
        assert!(merged.new_paths.is_empty());
    }

    #[test]
    fn chain_colimit_of_added_states() {
        let glob = make_glob(&strings(&["c"]));
        let (x1, f1) = pushout_add_state(&glob);
        let (x2, f2) = pushout_add_state(&x1);
        let (colim, legs) = chain_colimit(&glob, &[(x1, f1), (x2, f2)], None).unwrap();
        assert_eq!(colim.state_count(), 4);
        assert_eq!(colim.path_count(), 1);
        assert_eq!(legs.len(), 3);
    }
}

//! Seeded random instances: loop-free flows with globe attachments, chains
//! of pushouts, finite set diagrams and rational piecewise-linear data.
//!
//! Every generator draws from its own `ChaCha8Rng`, so instance `k` of a
//! seed is the same no matter how the corpus is split across threads.

use std::collections::{BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{FinitePoset, SetDiagram};
use crate::flow::{DiscreteFlow, FlowMap, GlobAttachment, PathInfo};
use crate::moore::{rat, PLPath, PLReparam, Rational};
use crate::pushout::{pushout_add_state, pushout_glob_oracle, pushout_merge_states};

/// Size bounds of random flow instances.
#[derive(Debug, Clone, Copy)]
pub struct InstanceLimits {
    pub max_states: usize,
    pub max_paths: usize,
    pub max_cells: usize,
    pub max_boundary: usize,
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits { max_states: 5, max_paths: 20, max_cells: 4, max_boundary: 2 }
    }
}

/// The generator for item `index` of stream `stream` under `seed`.
pub fn item_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) << 20);
    // decorrelate neighbouring indices
    ChaCha8Rng::seed_from_u64(rng.gen())
}

/// A random loop-free flow: the free semicategory on a random acyclic set of
/// generators modulo a random congruence, with states shuffled.
pub fn random_flow(rng: &mut impl Rng, max_states: usize, max_paths: usize) -> DiscreteFlow {
    let n = rng.gen_range(2..=max_states.max(2));
    let mut generators = rng.gen_range(n - 1..=(2 * n + 2).min(10));
    loop {
        if let Some(flow) = try_random_flow(rng, n, generators, max_paths) {
            return flow;
        }
        generators -= 1;
    }
}

fn try_random_flow(rng: &mut impl Rng, n: usize, generators: usize, max_paths: usize) -> Option<DiscreteFlow> {
    let edges: Vec<(usize, usize)> = (0..generators)
        .map(|_| {
            let a = rng.gen_range(0..n - 1);
            let b = rng.gen_range(a + 1..n);
            (a, b)
        })
        .collect();
    // every composable word; topological indices keep lengths below n
    let mut words: Vec<Vec<usize>> = (0..edges.len()).map(|g| vec![g]).collect();
    let mut frontier = words.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            let end = edges[*w.last().expect("nonempty")].1;
            for (g, e) in edges.iter().enumerate() {
                if e.0 == end {
                    let mut longer = w.clone();
                    longer.push(g);
                    next.push(longer);
                }
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    if words.len() > 400 {
        return None;
    }
    let index: HashMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let ends = |w: &[usize]| (edges[w[0]].0, edges[*w.last().expect("nonempty")].1);

    let mut uf = UnionFind::<usize>::new(words.len());
    let relations = rng.gen_range(0..=3);
    for _ in 0..relations {
        let a = rng.gen_range(0..words.len().max(1));
        if words.is_empty() {
            break;
        }
        let parallel: Vec<usize> = (0..words.len()).filter(|&b| ends(&words[b]) == ends(&words[a])).collect();
        let b = *parallel.choose(rng).expect("a is parallel to itself");
        uf.union(a, b);
    }
    // congruence closure under one-letter extensions on either side
    loop {
        let mut changed = false;
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                if !uf.equiv(i, j) {
                    continue;
                }
                for g in 0..edges.len() {
                    let mut right_i = words[i].clone();
                    right_i.push(g);
                    let mut right_j = words[j].clone();
                    right_j.push(g);
                    if let (Some(&x), Some(&y)) = (index.get(&right_i), index.get(&right_j)) {
                        changed |= uf.union(x, y);
                    }
                    let mut left_i = vec![g];
                    left_i.extend(&words[i]);
                    let mut left_j = vec![g];
                    left_j.extend(&words[j]);
                    if let (Some(&x), Some(&y)) = (index.get(&left_i), index.get(&left_j)) {
                        changed |= uf.union(x, y);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut class_of_root = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(words.len());
    for i in 0..words.len() {
        let class = *class_of_root.entry(uf.find(i)).or_insert_with(|| {
            reps.push(i);
            reps.len() - 1
        });
        class_of.push(class);
    }
    if reps.len() > max_paths {
        return None;
    }

    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(rng);
    let mut states = vec![String::new(); n];
    for (old, &new) in relabel.iter().enumerate() {
        states[new] = format!("s{old}");
    }
    let paths: Vec<PathInfo> = reps
        .iter()
        .map(|&w| {
            let (a, b) = ends(&words[w]);
            let id = words[w].iter().map(|g| format!("g{g}")).collect::<String>();
            PathInfo { id, src: relabel[a], tgt: relabel[b] }
        })
        .collect();
    let mut compose = Vec::new();
    for x in 0..reps.len() {
        for y in 0..reps.len() {
            if paths[x].tgt != paths[y].src {
                continue;
            }
            let mut w = words[reps[x]].clone();
            w.extend(&words[reps[y]]);
            compose.push((x, y, class_of[index[&w]]));
        }
    }
    Some(DiscreteFlow::new(states, paths, compose).expect("congruence quotients are flows"))
}

/// Whether some path runs from `a` to `b`, possibly through several states.
pub fn reachable(flow: &DiscreteFlow, a: usize, b: usize) -> bool {
    let mut seen = vec![false; flow.state_count()];
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        for p in flow.paths_from(x) {
            let y = flow.path(p).tgt;
            if y == b {
                return true;
            }
            if !std::mem::replace(&mut seen[y], true) {
                stack.push(y);
            }
        }
    }
    false
}

/// A random attachment keeping the instance loop-free.
pub fn random_attachment(rng: &mut impl Rng, base: &DiscreteFlow, limits: InstanceLimits, injective: bool) -> GlobAttachment {
    let candidates: Vec<(usize, usize)> = (0..base.state_count())
        .flat_map(|a| (0..base.state_count()).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && !reachable(base, b, a))
        .collect();
    let inhabited: Vec<(usize, usize)> =
        candidates.iter().copied().filter(|&(a, b)| !base.paths_between(a, b).is_empty()).collect();
    let pool = if !inhabited.is_empty() && rng.gen_bool(0.75) { &inhabited } else { &candidates };
    let &(g0, g1) = pool.choose(rng).expect("at least two states and no cycles");
    let hom = base.paths_between(g0, g1);
    let cells_count = rng.gen_range(0..=limits.max_cells);
    let cells: Vec<String> = (0..cells_count).map(|k| format!("z{k}")).collect();
    let mut boundary_count = if hom.is_empty() || cells.is_empty() { 0 } else { rng.gen_range(0..=limits.max_boundary) };
    if injective {
        boundary_count = boundary_count.min(cells_count);
    }
    let boundary: Vec<String> = (0..boundary_count).map(|k| format!("b{k}")).collect();
    let attach = (0..boundary_count).map(|_| *hom.choose(rng).expect("nonempty")).collect();
    let incl = if injective {
        let mut slots: Vec<usize> = (0..cells_count).collect();
        slots.shuffle(rng);
        slots.truncate(boundary_count);
        slots
    } else {
        (0..boundary_count).map(|_| rng.gen_range(0..cells_count)).collect()
    };
    GlobAttachment { g0, g1, boundary, cells, attach, incl }
}

/// Instance `index` of the main corpus.
pub fn random_instance(seed: u64, index: u64, limits: InstanceLimits) -> (DiscreteFlow, GlobAttachment) {
    let mut rng = item_rng(seed, 1, index);
    let base = random_flow(&mut rng, limits.max_states, limits.max_paths);
    let att = random_attachment(&mut rng, &base, limits, false);
    (base, att)
}

/// A chain of up to `max_steps` injective pushouts along added states,
/// merged incomparable states and globe attachments with injective `incl`.
pub fn random_chain(seed: u64, index: u64, max_steps: usize) -> (DiscreteFlow, Vec<(DiscreteFlow, FlowMap)>) {
    let mut rng = item_rng(seed, 2, index);
    let base = random_flow(&mut rng, 4, 12);
    let steps_wanted = rng.gen_range(1..=max_steps);
    let mut steps: Vec<(DiscreteFlow, FlowMap)> = Vec::new();
    let mut current = base.clone();
    let mut attempts = 0;
    while steps.len() < steps_wanted && attempts < 50 {
        attempts += 1;
        let next = match rng.gen_range(0..3) {
            0 => Some(pushout_add_state(&current)),
            1 => {
                let pairs: Vec<(usize, usize)> = (0..current.state_count())
                    .flat_map(|a| (a + 1..current.state_count()).map(move |b| (a, b)))
                    .filter(|&(a, b)| !reachable(&current, a, b) && !reachable(&current, b, a))
                    .collect();
                pairs
                    .choose(&mut rng)
                    .and_then(|&(a, b)| pushout_merge_states(&current, a, b, None).ok())
                    .map(|m| (m.flow, m.map))
            }
            _ => {
                if current.state_count() < 2 {
                    None
                } else {
                    let mut att = random_attachment(&mut rng, &current, InstanceLimits::default(), true);
                    for c in att.cells.iter_mut() {
                        *c = format!("c{}_{c}", steps.len());
                    }
                    pushout_glob_oracle(&current, &att, None).ok().map(|x| (x.flow, x.from_base))
                }
            }
        };
        if let Some((flow, map)) = next {
            if map.is_injective_on_paths() && flow.path_count() <= 40 {
                current = flow.clone();
                steps.push((flow, map));
            }
        }
    }
    (base, steps)
}

/// Random functorial diagram with at most `max_objects` objects and sets of
/// at most `max_size` elements.
pub fn random_diagram(rng: &mut impl Rng, max_objects: usize, max_size: usize) -> SetDiagram {
    let n = rng.gen_range(1..=max_objects);
    match rng.gen_range(0..3) {
        0 => forest_diagram(rng, n, max_size),
        1 => retraction_diagram(rng, n, max_size),
        _ => (0..20)
            .find_map(|_| free_diagram(rng, n, max_size))
            .unwrap_or_else(|| forest_diagram(rng, n, max_size)),
    }
}

fn random_dag(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut covers = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(p) {
                covers.push((i, j));
            }
        }
    }
    covers
}

fn named(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("o{i}")).collect()
}

/// At most one cover into each object, so every map table is allowed.
fn forest_diagram(rng: &mut impl Rng, n: usize, max_size: usize) -> SetDiagram {
    let mut covers = Vec::new();
    for j in 1..n {
        if rng.gen_bool(0.7) {
            covers.push((rng.gen_range(0..j), j));
        }
    }
    let mut sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_size)).collect();
    for &(i, j) in &covers {
        if sizes[i] > 0 && sizes[j] == 0 {
            sizes[j] = 1;
        }
    }
    let maps = covers
        .iter()
        .map(|&(i, j)| (0..sizes[i]).map(|_| rng.gen_range(0..sizes[j])).collect())
        .collect();
    SetDiagram::new(FinitePoset::new(named(n), covers).expect("forest"), sizes, maps).expect("trees are functorial")
}

/// Every map factors through a fixed set `H` that each value retracts onto,
/// so all routes agree.
fn retraction_diagram(rng: &mut impl Rng, n: usize, max_size: usize) -> SetDiagram {
    let covers = random_dag(rng, n, 0.4);
    let h = rng.gen_range(1..=3.min(max_size.max(1)));
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(h..=max_size.max(h))).collect();
    let retract: Vec<Vec<usize>> = sizes
        .iter()
        .map(|&s| (0..s).map(|x| if x < h { x } else { rng.gen_range(0..h) }).collect())
        .collect();
    let maps = covers.iter().map(|&(i, _)| retract[i].clone()).collect();
    SetDiagram::new(FinitePoset::new(named(n), covers).expect("dag"), sizes, maps).expect("retractions commute")
}

/// Unconstrained random tables, kept only when they happen to commute.
fn free_diagram(rng: &mut impl Rng, n: usize, max_size: usize) -> Option<SetDiagram> {
    let covers = random_dag(rng, n, 0.35);
    let mut sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_size)).collect();
    for &(i, j) in &covers {
        if sizes[i] > 0 && sizes[j] == 0 {
            sizes[j] = 1;
        }
    }
    let maps = covers
        .iter()
        .map(|&(i, j)| (0..sizes[i]).map(|_| rng.gen_range(0..sizes[j])).collect())
        .collect();
    SetDiagram::new(FinitePoset::new(named(n), covers).ok()?, sizes, maps).ok()
}

fn small_rational(rng: &mut impl Rng, range: i64) -> Rational {
    rat(rng.gen_range(-range..=range), rng.gen_range(1..=4))
}

/// Sorted distinct rationals strictly inside `(0, 1)`.
fn interior_points(rng: &mut impl Rng, count: usize) -> Vec<Rational> {
    let set: BTreeSet<Rational> = (0..count)
        .map(|_| {
            let d = rng.gen_range(2..=12);
            rat(rng.gen_range(1..d), d)
        })
        .collect();
    set.into_iter().collect()
}

/// A random path starting at `start`; of duration 1 when `unit`.
pub fn random_path(rng: &mut impl Rng, start: Rational, unit: bool) -> PLPath {
    let duration = if unit { rat(1, 1) } else { rat(rng.gen_range(1..=6), rng.gen_range(1..=3)) };
    let count = rng.gen_range(0..=3);
    let mut points = vec![(rat(0, 1), start)];
    for t in interior_points(rng, count) {
        points.push((t * &duration, small_rational(rng, 6)));
    }
    points.push((duration, small_rational(rng, 6)));
    PLPath::new(points).expect("increasing times")
}

/// Three random composable paths.
pub fn random_triple(rng: &mut impl Rng, unit: bool) -> (PLPath, PLPath, PLPath) {
    let start = small_rational(rng, 6);
    let a = random_path(rng, start, unit);
    let b = random_path(rng, a.end().clone(), unit);
    let c = random_path(rng, b.end().clone(), unit);
    (a, b, c)
}

pub fn random_reparam(rng: &mut impl Rng) -> PLReparam {
    let count = rng.gen_range(0..=3);
    let xs = interior_points(rng, count);
    let mut ys = interior_points(rng, xs.len() + 2);
    ys.truncate(xs.len());
    let mut points = vec![(rat(0, 1), rat(0, 1))];
    points.extend(xs.into_iter().zip(ys));
    points.push((rat(1, 1), rat(1, 1)));
    PLReparam::new(points).unwrap_or_else(|_| PLReparam::identity())
}

/// A weight in `[0, 1]`.
pub fn random_weight(rng: &mut impl Rng) -> Rational {
    let d = rng.gen_range(1..=8);
    rat(rng.gen_range(0..=d), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::is_loop_free;

    #[test]
    fn instances_are_reproducible_and_bounded() {
        for k in 0..30 {
            let (a, att) = random_instance(11, k, InstanceLimits::default());
            let (b, att2) = random_instance(11, k, InstanceLimits::default());
            assert_eq!(a, b);
            assert_eq!(att, att2);
            assert!(a.state_count() <= 5 && a.path_count() <= 20);
            assert!(att.cells.len() <= 4 && att.boundary.len() <= 2);
            assert!(is_loop_free(&a, &att));
            att.validate(&a).unwrap();
        }
    }

    #[test]
    fn chains_are_injective() {
        for k in 0..10 {
            let (_, steps) = random_chain(5, k, 6);
            assert!(steps.len() <= 6);
            assert!(steps.iter().all(|(_, m)| m.is_injective_on_paths()));
        }
    }

    #[test]
    fn random_diagrams_respect_bounds() {
        let mut rng = item_rng(3, 0, 0);
        for _ in 0..50 {
            let d = random_diagram(&mut rng, 6, 5);
            assert!(d.index().len() <= 6);
            assert!(d.sizes().iter().all(|&s| s <= 5));
        }
    }

    #[test]
    fn random_reparams_are_valid() {
        let mut rng = item_rng(3, 0, 1);
        for _ in 0..50 {
            let phi = random_reparam(&mut rng);
            assert!(phi.points().len() >= 2);
        }
    }
}

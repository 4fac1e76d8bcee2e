//! Brute-force oracles that recompute each construction without going
//! through the code it checks.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::Rng;
use rayon::prelude::*;

use crate::diagram::{product_comparison, sum_diagrams, sum_offsets, SetDiagram};
use crate::flow::{DiscreteFlow, FlowMap, PathInfo};
use crate::reedy::{apply_unchecked, GeneratorArrow, GeneratorKind, ObjectPoset, PosetContext};

/// Cases seen and the first failure, in the order cases were merged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub cases: u64,
    pub failures: u64,
    pub witness: Option<String>,
}

impl Tally {
    pub fn pass() -> Self {
        Tally { cases: 1, failures: 0, witness: None }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Tally { cases: 1, failures: 1, witness: Some(witness.into()) }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.witness = self.witness.map(|w| format!("{prefix}: {w}"));
        self
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// Named tallies in a fixed order.
pub type Checks = Vec<(&'static str, Tally)>;

fn merge_checks(into: &mut Checks, more: Checks) {
    for (name, t) in more {
        match into.iter_mut().find(|(n, _)| *n == name) {
            Some((_, acc)) => acc.merge(t),
            None => into.push((name, t)),
        }
    }
}

pub const POSET_CHECKS: [&str; 8] = [
    "order_axioms",
    "bfs_agreement",
    "relation_groups",
    "degree_monotonicity",
    "unique_factorization",
    "factorization_words",
    "simplify_confluence",
    "latch_base_minimum",
];

fn context_label(ctx: &PosetContext) -> String {
    format!("S={{{}}} u={} v={}", ctx.labels().join(","), ctx.label(ctx.u()), ctx.label(ctx.v()))
}

/// Contexts with at most `max_states` states, one per pair `(u, v)` up to
/// relabelling: `u = v` and `u != v`.
pub fn poset_contexts(max_states: usize) -> Vec<PosetContext> {
    let mut out = Vec::new();
    let names: Vec<String> = (0..max_states).map(state_name).collect();
    for k in 1..=max_states {
        out.push(PosetContext::new(&names[..k], &names[0], &names[0]).expect("valid"));
        if k > 1 {
            out.push(PosetContext::new(&names[..k], &names[0], &names[1]).expect("valid"));
        }
    }
    out
}

fn state_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("s{i}")
    }
}

/// Every poset law on every context up to `max_states` states, each
/// truncated at `max_degree`.
pub fn poset_suite(max_states: usize, max_degree: usize) -> Checks {
    let mut checks: Checks = POSET_CHECKS.iter().map(|&n| (n, Tally::default())).collect();
    for ctx in poset_contexts(max_states) {
        merge_checks(&mut checks, poset_context_checks(&ctx, max_degree));
    }
    checks
}

struct Truncation<'a> {
    ctx: &'a PosetContext,
    poset: ObjectPoset,
    out: Vec<Vec<(usize, GeneratorArrow)>>,
    block_of: Vec<usize>,
    pos_in_block: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl<'a> Truncation<'a> {
    fn new(ctx: &'a PosetContext, max_degree: usize) -> Self {
        let poset = ctx.enumerate_up_to(max_degree);
        let mut out = vec![Vec::new(); poset.len()];
        for &(a, b, g) in &poset.arrows {
            out[a].push((b, g));
        }
        let mut block_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(poset.len());
        let mut pos_in_block = Vec::with_capacity(poset.len());
        for (i, o) in poset.objects.iter().enumerate() {
            let b = *block_ids.entry(o.endpoints()).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            block_of.push(b);
            pos_in_block.push(blocks[b].len());
            blocks[b].push(i);
        }
        Truncation { ctx, poset, out, block_of, pos_in_block, blocks }
    }

    fn show(&self, i: usize) -> String {
        self.ctx.display(&self.poset.objects[i])
    }

    fn block_bits(&self, i: usize) -> Vec<u64> {
        vec![0; self.blocks[self.block_of[i]].len().div_ceil(64)]
    }
}

fn set_bit(bits: &mut [u64], k: usize) {
    bits[k / 64] |= 1 << (k % 64);
}

fn get_bit(bits: &[u64], k: usize) -> bool {
    bits[k / 64] & (1 << (k % 64)) != 0
}

/// Everything reachable from `m` by raw generator applications, paired with
/// the object reached by the composition letters alone. Composition letters
/// act on both coordinates and inclusions only on the first, which is
/// exactly the rewriting that moves every composition before every
/// inclusion.
struct Reach {
    up: Vec<u64>,
    out_of_block: Option<usize>,
    middles: Vec<(usize, BTreeSet<usize>)>,
}

fn reach(t: &Truncation, m: usize) -> Reach {
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut queue = VecDeque::from([(m, m)]);
    seen.insert((m, m));
    let mut middles: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    let mut up = t.block_bits(m);
    let mut out_of_block = None;
    while let Some((x, y)) = queue.pop_front() {
        middles.entry(x).or_default().insert(y);
        if t.block_of[x] == t.block_of[m] {
            set_bit(&mut up, t.pos_in_block[x]);
        } else {
            out_of_block.get_or_insert(x);
        }
        for &(x2, g) in &t.out[x] {
            let y2 = match g.kind {
                GeneratorKind::Compose => t.poset.index[&apply_unchecked(&t.poset.objects[y], g)],
                GeneratorKind::Include => y,
            };
            if seen.insert((x2, y2)) {
                queue.push_back((x2, y2));
            }
        }
    }
    let mut middles: Vec<(usize, BTreeSet<usize>)> = middles.into_iter().collect();
    middles.sort_unstable_by_key(|(x, _)| *x);
    Reach { up, out_of_block, middles }
}

fn minus_closure_sinks(t: &Truncation, x: usize) -> BTreeSet<usize> {
    let mut seen = HashSet::from([x]);
    let mut stack = vec![x];
    let mut sinks = BTreeSet::new();
    while let Some(a) = stack.pop() {
        let mut any = false;
        for &(b, g) in &t.out[a] {
            if g.kind == GeneratorKind::Compose {
                any = true;
                if seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        if !any {
            sinks.insert(a);
        }
    }
    sinks
}

fn relation_instances(len: usize) -> Vec<(&'static str, [GeneratorArrow; 2], [GeneratorArrow; 2])> {
    use GeneratorArrow as G;
    let mut out = Vec::new();
    for i in 1..=len {
        for j in 1..=len {
            if i < j {
                out.push(("A", [G::compose(i), G::compose(j)], [G::compose(j - 1), G::compose(i)]));
            }
            if i != j {
                out.push(("B", [G::include(i), G::include(j)], [G::include(j), G::include(i)]));
            }
            if j >= i + 2 {
                out.push(("C", [G::compose(i), G::include(j)], [G::include(j - 1), G::compose(i)]));
            }
            if j < i {
                out.push(("C", [G::compose(i), G::include(j)], [G::include(j), G::compose(i)]));
            }
        }
    }
    out
}

fn word_text(word: &[GeneratorArrow]) -> String {
    word.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(".")
}

/// Per-object findings, merged in object order afterwards.
#[derive(Default)]
struct ObjectReport {
    checks: Vec<Tally>,
}

pub fn poset_context_checks(ctx: &PosetContext, max_degree: usize) -> Checks {
    let t = Truncation::new(ctx, max_degree);
    let n = t.poset.len();
    let label = context_label(ctx);

    let reaches: Vec<Reach> = (0..n).into_par_iter().map(|m| reach(&t, m)).collect();
    let leq_bits: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut bits = t.block_bits(m);
            for (k, &other) in t.blocks[t.block_of[m]].iter().enumerate() {
                if ctx.leq(&t.poset.objects[m], &t.poset.objects[other]).expect("same context") {
                    set_bit(&mut bits, k);
                }
            }
            bits
        })
        .collect();

    let reports: Vec<ObjectReport> = (0..n)
        .into_par_iter()
        .map(|m| {
            let obj = &t.poset.objects[m];
            let block = &t.blocks[t.block_of[m]];
            let mut axioms = Tally::default();
            let mut agree = Tally::default();
            let mut relations = Tally::default();
            let mut degree = Tally::default();
            let mut unique = Tally::default();
            let mut words = Tally::default();
            let mut confluence = Tally::default();
            let mut latch = Tally::default();
            let mine = &leq_bits[m];

            // order axioms on the decided relation
            axioms.record(get_bit(mine, t.pos_in_block[m]), || format!("{} is not below itself", t.show(m)));
            for (k, &other) in block.iter().enumerate() {
                if !get_bit(mine, k) || other == m {
                    continue;
                }
                let theirs = &leq_bits[other];
                axioms.record(!get_bit(theirs, t.pos_in_block[m]), || {
                    format!("{} and {} are below each other", t.show(m), t.show(other))
                });
                let contained = theirs.iter().zip(mine).all(|(a, b)| a & !b == 0);
                axioms.record(contained, || {
                    format!("{} <= {} but something above the latter is not above the former", t.show(m), t.show(other))
                });
            }

            // agreement with raw generator reachability
            let r = &reaches[m];
            agree.record(r.out_of_block.is_none(), || {
                format!("{} reaches {} across endpoints", t.show(m), t.show(r.out_of_block.unwrap_or(m)))
            });
            for (k, &other) in block.iter().enumerate() {
                let decided = get_bit(mine, k);
                agree.record(decided == get_bit(&r.up, k), || {
                    format!("leq({}, {}) = {decided} disagrees with generator reachability", t.show(m), t.show(other))
                });
            }
            // pairs across endpoint blocks: one probe per foreign block
            for (b, members) in t.blocks.iter().enumerate() {
                if b != t.block_of[m] {
                    let other = members[0];
                    let decided = ctx.leq(obj, &t.poset.objects[other]).expect("same context");
                    agree.record(!decided, || format!("leq({}, {}) holds across endpoints", t.show(m), t.show(other)));
                }
            }

            for (kind, lhs, rhs) in relation_instances(obj.len()) {
                let a = ctx.apply_composite(obj, &lhs).ok();
                let b = ctx.apply_composite(obj, &rhs).ok();
                if a.is_none() && b.is_none() {
                    continue;
                }
                relations.record(a == b, || {
                    format!("group {kind}: {} and {} differ on {}", word_text(&lhs), word_text(&rhs), t.show(m))
                });
            }

            for &(b, g) in &t.out[m] {
                let expected = match g.kind {
                    GeneratorKind::Compose => obj.degree() - 1,
                    GeneratorKind::Include => obj.degree() + 1,
                };
                degree.record(t.poset.objects[b].degree() == expected, || {
                    format!("{g} changes the degree of {} by more than one", t.show(m))
                });
            }

            for (x, ys) in &r.middles {
                let target = &t.poset.objects[*x];
                match ctx.factorize(obj, target) {
                    Err(e) => unique.record(false, || format!("factorize({}, {}) failed: {e}", t.show(m), t.show(*x))),
                    Ok(f) => {
                        let single = ys.len() == 1 && ys.contains(&t.poset.index[&f.middle]);
                        unique.record(single, || {
                            let found: Vec<String> = ys.iter().map(|&y| t.show(y)).collect();
                            format!(
                                "arrows {} -> {} pass through the middles {}; factorize gives {}",
                                t.show(m),
                                t.show(*x),
                                found.join(" and "),
                                ctx.display(&f.middle)
                            )
                        });
                        let increasing = f.minus_word.windows(2).all(|w| w[0].position < w[1].position);
                        let down = ctx.apply_composite(obj, &f.minus_word);
                        let up = ctx.apply_composite(&f.middle, &f.plus_word);
                        words.record(increasing && down.as_ref() == Ok(&f.middle) && up.as_ref() == Ok(target), || {
                            format!("the words of factorize({}, {}) do not reconstruct it", t.show(m), t.show(*x))
                        });
                    }
                }
            }

            let s = ctx.simplify(obj);
            let sinks = minus_closure_sinks(&t, m);
            let no_double_zero = s.flags().windows(2).all(|w| w[0] || w[1]);
            let sink_ok = sinks.len() == 1 && t.poset.index.get(&s) == sinks.first();
            confluence.record(sink_ok && no_double_zero && ctx.simplify(&s) == s, || {
                let found: Vec<String> = sinks.iter().map(|&k| t.show(k)).collect();
                format!("{} merges down to {{{}}} but simplify gives {}", t.show(m), found.join(", "), ctx.display(&s))
            });
            let matching = ctx.matching_category(obj);
            let terminal_ok = if matching.is_empty() {
                !obj.is_simplifiable() && s == *obj
            } else {
                matching.objects.contains(&s)
                    && matching.objects.iter().all(|k| ctx.leq(k, &s).expect("same context"))
            };
            confluence.record(terminal_ok, || format!("simplify({}) is not terminal in its matching category", t.show(m)));

            let base = ctx.latch_base(obj);
            let below = ctx.leq(&base, obj).expect("same context");
            let fixed = (base == *obj) == (obj.height() == 0);
            let minimum = ctx
                .latching_category(obj)
                .objects
                .iter()
                .all(|k| ctx.leq(&base, k).expect("same context"));
            latch.record(below && fixed && minimum, || format!("latch_base({}) is not the least flag-lowering", t.show(m)));

            ObjectReport { checks: vec![axioms, agree, relations, degree, unique, words, confluence, latch] }
        })
        .collect();

    let mut totals: Vec<Tally> = vec![Tally::default(); POSET_CHECKS.len()];
    for rep in reports {
        for (acc, t) in totals.iter_mut().zip(rep.checks) {
            acc.merge(t);
        }
    }
    POSET_CHECKS
        .iter()
        .zip(totals)
        .map(|(&name, t)| (name, t.prefixed(&label)))
        .collect()
}

/// Connected components of the element graph of `d`, numbered by first
/// appearance, as the class of every `(object, element)`.
pub fn element_components(d: &SetDiagram) -> Vec<Vec<usize>> {
    let n = d.index().len();
    let mut adjacency: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (c, &(lo, hi)) in d.index().covers().iter().enumerate() {
        for (x, &y) in d.map(c).iter().enumerate() {
            adjacency.entry((lo, x)).or_default().push((hi, y));
            adjacency.entry((hi, y)).or_default().push((lo, x));
        }
    }
    let mut comp: Vec<Vec<usize>> = (0..n).map(|i| vec![usize::MAX; d.size(i)]).collect();
    let mut next = 0;
    for i in 0..n {
        for x in 0..d.size(i) {
            if comp[i][x] != usize::MAX {
                continue;
            }
            comp[i][x] = next;
            let mut stack = vec![(i, x)];
            while let Some(v) = stack.pop() {
                for &(j, y) in adjacency.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                    if comp[j][y] == usize::MAX {
                        comp[j][y] = next;
                        stack.push((j, y));
                    }
                }
            }
            next += 1;
        }
    }
    comp
}

/// Whether the colimit identifies exactly the connected elements.
pub fn colimit_matches_components(d: &SetDiagram) -> Option<String> {
    let colim = d.colimit();
    let comp = element_components(d);
    let count = comp.iter().flatten().max().map_or(0, |m| m + 1);
    if colim.apex_size() != count {
        return Some(format!("{} classes but {count} connected components", colim.apex_size()));
    }
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (i, row) in comp.iter().enumerate() {
        for (x, &c) in row.iter().enumerate() {
            let class = colim.inject(i, x);
            if *seen.entry(c).or_insert(class) != class {
                return Some(format!("element {x} of {} is sent to the wrong class", d.index().name(i)));
            }
        }
    }
    None
}

fn is_cocone(d: &SetDiagram, legs: &[Vec<usize>]) -> bool {
    d.index()
        .covers()
        .iter()
        .enumerate()
        .all(|(c, &(lo, hi))| d.map(c).iter().enumerate().all(|(x, &y)| legs[lo][x] == legs[hi][y]))
}

/// The universal property against `trials` random cocones: the factorization
/// exists, is unique and reproduces the legs; non-cocones are refused.
pub fn universal_property(d: &SetDiagram, rng: &mut impl Rng, trials: usize) -> Tally {
    let colim = d.colimit();
    let mut tally = Tally::default();
    for _ in 0..trials {
        let target = rng.gen_range(1..=6);
        let h: Vec<usize> = (0..colim.apex_size()).map(|_| rng.gen_range(0..target)).collect();
        let legs: Vec<Vec<usize>> = (0..d.index().len())
            .map(|i| colim.injection(i).iter().map(|&c| h[c]).collect())
            .collect();
        match d.cocone_factorization(&legs, target) {
            Ok(u) => tally.record(u == h, || format!("factorization {u:?} differs from the map {h:?} it came from")),
            Err(e) => tally.record(false, || format!("valid cocone refused: {e}")),
        }

        let legs: Vec<Vec<usize>> = (0..d.index().len())
            .map(|i| (0..d.size(i)).map(|_| rng.gen_range(0..target)).collect())
            .collect();
        let valid = is_cocone(d, &legs);
        match d.cocone_factorization(&legs, target) {
            Ok(u) => {
                let reproduces = (0..d.index().len())
                    .all(|i| colim.injection(i).iter().zip(&legs[i]).all(|(&c, &y)| u[c] == y));
                tally.record(valid && reproduces, || format!("random legs {legs:?} factor as {u:?}"))
            }
            Err(_) => tally.record(!valid, || format!("cocone {legs:?} refused")),
        }
    }
    tally
}

/// The classes of a sum are the disjoint union of the summands' classes.
pub fn sum_decomposition(ds: &[SetDiagram]) -> Option<String> {
    let sum = sum_diagrams(ds);
    let colim = sum.colimit();
    let offsets = sum_offsets(ds);
    let parts: Vec<_> = ds.iter().map(SetDiagram::colimit).collect();
    let expected: usize = parts.iter().map(|c| c.apex_size()).sum();
    if colim.apex_size() != expected {
        return Some(format!("{} classes for summands with {expected}", colim.apex_size()));
    }
    let mut image: HashMap<usize, (usize, usize)> = HashMap::new();
    for (k, d) in ds.iter().enumerate() {
        for i in 0..d.index().len() {
            for x in 0..d.size(i) {
                let pair = (k, parts[k].inject(i, x));
                if *image.entry(colim.inject(offsets[k] + i, x)).or_insert(pair) != pair {
                    return Some(format!("summand {k} object {i} element {x} lands in a foreign class"));
                }
            }
        }
    }
    let distinct: HashSet<&(usize, usize)> = image.values().collect();
    (distinct.len() != expected).then(|| "sum classes collapse summand classes".to_string())
}

/// The comparison `colim(a x b) -> colim a x colim b` is a bijection.
pub fn product_bijection(a: &SetDiagram, b: &SetDiagram) -> Option<String> {
    let table = product_comparison(a, b);
    let (na, nb) = (a.colimit().apex_size(), b.colimit().apex_size());
    let distinct: HashSet<&(usize, usize)> = table.iter().collect();
    if table.len() != na * nb || distinct.len() != table.len() {
        return Some(format!("{} product classes against {na} x {nb}", table.len()));
    }
    None
}

/// A flow with one state and one idempotent loop: the terminal flow.
pub fn terminal_flow() -> DiscreteFlow {
    DiscreteFlow::new(
        vec!["*".into()],
        vec![PathInfo { id: "*".into(), src: 0, tgt: 0 }],
        vec![(0, 0, 0)],
    )
    .expect("terminal flow")
}

/// Two disjoint copies and the inclusion of the second copy.
pub fn doubled(flow: &DiscreteFlow) -> (DiscreteFlow, FlowMap) {
    let (s, p) = (flow.state_count(), flow.path_count());
    let mut states: Vec<String> = flow.states().iter().map(|x| format!("{x}.0")).collect();
    states.extend(flow.states().iter().map(|x| format!("{x}.1")));
    let mut paths: Vec<PathInfo> = flow.paths().iter().map(|q| PathInfo { id: format!("{}.0", q.id), ..q.clone() }).collect();
    paths.extend(flow.paths().iter().map(|q| PathInfo { id: format!("{}.1", q.id), src: q.src + s, tgt: q.tgt + s }));
    let table = flow.compose_table();
    let mut compose = table.clone();
    compose.extend(table.iter().map(|&(a, b, c)| (a + p, b + p, c + p)));
    let double = DiscreteFlow::new(states, paths, compose).expect("disjoint copies");
    let second = FlowMap { state_map: (s..2 * s).collect(), path_map: (p..2 * p).collect() };
    (double, second)
}

/// Flow maps `x -> y` over a fixed state map, with some path images fixed;
/// counts solutions up to `limit` by backtracking. `None` in `fixed` leaves
/// the image free; conflicting requirements are reported as zero solutions.
pub fn mediating_maps(
    x: &DiscreteFlow,
    y: &DiscreteFlow,
    state_map: &[usize],
    fixed: &[Option<usize>],
    limit: usize,
) -> Vec<Vec<usize>> {
    let n = x.path_count();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let info = x.path(p);
            let all = y.paths_between(state_map[info.src], state_map[info.tgt]);
            match fixed[p] {
                Some(q) => all.into_iter().filter(|&c| c == q).collect(),
                None => all,
            }
        })
        .collect();
    // each triple is checked once its largest path is assigned
    let mut triples_at: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for (a, b, c) in x.compose_table() {
        triples_at[a.max(b).max(c)].push((a, b, c));
    }
    let mut found = Vec::new();
    let mut image = vec![usize::MAX; n];
    fn go(
        k: usize,
        image: &mut Vec<usize>,
        candidates: &[Vec<usize>],
        triples_at: &[Vec<(usize, usize, usize)>],
        y: &DiscreteFlow,
        found: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if found.len() >= limit {
            return;
        }
        if k == candidates.len() {
            found.push(image.clone());
            return;
        }
        for &c in &candidates[k] {
            image[k] = c;
            if triples_at[k].iter().all(|&(a, b, r)| y.compose(image[a], image[b]) == Some(image[r])) {
                go(k + 1, image, candidates, triples_at, y, found, limit);
            }
        }
        image[k] = usize::MAX;
    }
    go(0, &mut image, &candidates, &triples_at, y, &mut found, limit);
    found
}

/// Requirements `h(from[i]) = to[i]` gathered into one table; `None` when two
/// requirements clash.
pub fn required_images(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Option<Vec<Option<usize>>> {
    let mut fixed = vec![None; size];
    for (p, q) in pairs {
        match fixed[p] {
            None => fixed[p] = Some(q),
            Some(prev) if prev != q => return None,
            Some(_) => {}
        }
    }
    Some(fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{item_rng, random_diagram};
    use crate::diagram::FinitePoset;

    #[test]
    fn small_contexts_pass_when_endpoints_differ() {
        let ctx = PosetContext::with_indices(2, 0, 1).unwrap();
        for (name, t) in poset_context_checks(&ctx, 5) {
            assert!(t.ok(), "{name}: {:?}", t.witness);
            assert!(t.cases > 0, "{name}");
        }
    }

    #[test]
    fn loops_break_middle_uniqueness() {
        let ctx = PosetContext::with_indices(1, 0, 0).unwrap();
        let checks = poset_context_checks(&ctx, 7);
        for (name, t) in &checks {
            if *name == "unique_factorization" {
                assert!(!t.ok());
                let w = t.witness.as_deref().unwrap();
                assert!(w.contains("pass through the middles"), "{w}");
            } else {
                assert!(t.ok(), "{name}: {:?}", t.witness);
            }
        }
    }

    #[test]
    fn components_agree_with_colimit_on_random_diagrams() {
        let mut rng = item_rng(9, 0, 0);
        for _ in 0..100 {
            let d = random_diagram(&mut rng, 6, 5);
            assert_eq!(colimit_matches_components(&d), None);
            assert!(universal_property(&d, &mut rng, 3).ok());
        }
    }

    #[test]
    fn span_components() {
        let span = FinitePoset::new(vec!["a".into(), "b".into(), "c".into()], vec![(0, 1), (0, 2)]).unwrap();
        let d = SetDiagram::new(span, vec![2, 2, 2], vec![vec![0, 1], vec![0, 0]]).unwrap();
        let comp = element_components(&d);
        assert_eq!(comp, vec![vec![0, 0], vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn terminal_flow_receives_exactly_one_map() {
        let (two, second) = doubled(&terminal_flow());
        assert_eq!(two.path_count(), 2);
        let maps = mediating_maps(&two, &terminal_flow(), &[0, 0], &[None, None], 5);
        assert_eq!(maps, vec![vec![0, 0]]);
        assert_eq!(second.path_map, vec![1]);
        assert_eq!(required_images(2, [(0, 1), (0, 0)]), None);
    }
}

//! The diagram `D^f` of cell chains over a globe attachment, its colimit as
//! the path set of the pushout, and latching objects computed directly and
//! through pushout-product cubes.

use std::collections::{BTreeMap, HashMap};

use crate::diagram::{ColimitResult, FinitePoset, SetDiagram};
use crate::error::{Error, Result};
use crate::flow::{is_loop_free, AttachedCellSet, DiscreteFlow, FlowMap, GlobAttachment, PathInfo};
use crate::pushout::{chain_colimit, new_cell_letter, old_path_letter, pushout_glob_oracle};
use crate::reedy::{GeneratorArrow, GeneratorKind, PosetContext, TupleObject};

/// `D^f` restricted to the objects with nonempty value.
///
/// An element of the value at a chain is a tuple with one entry per cell: a
/// path index of the base flow for flag 0, a class of `T` for flag 1.
#[derive(Debug, Clone)]
pub struct DfDiagram {
    pub context: PosetContext,
    pub base: DiscreteFlow,
    pub attachment: GlobAttachment,
    pub cells: AttachedCellSet,
    pub support: Vec<TupleObject>,
    pub values: Vec<Vec<Vec<usize>>>,
    pub diagram: SetDiagram,
    support_index: HashMap<TupleObject, usize>,
    value_index: Vec<HashMap<Vec<usize>, usize>>,
}

/// The colimit of `D^f` as a flow.
#[derive(Debug, Clone)]
pub struct ReedyPushout {
    pub df: DfDiagram,
    pub colimit: ColimitResult,
    pub flow: DiscreteFlow,
    pub from_base: FlowMap,
    pub from_cells: FlowMap,
}

/// Outcome of comparing the two pushout constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    /// path map from the colimit flow to the word flow; states correspond
    /// identically
    Isomorphism { path_map: Vec<usize> },
    Mismatch { reason: String },
}

/// A latching object with its comparison map into the value at `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Latching {
    pub size: usize,
    /// latching class -> element index of the value at `n`
    pub to_value: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatchingCase {
    /// all flags 0: the relative map is a bijection
    Bijection,
    /// some flag 1: the relative map is the latching comparison map of `D^f`
    LatchingMap,
    /// the expected property failed
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeLatching {
    pub case: LatchingCase,
    pub pushout_size: usize,
    /// pushout class -> element index of `D^f(n)`
    pub map: Vec<usize>,
}

impl DfDiagram {
    /// Builds `D^f` for a loop-free attachment.
    pub fn build(base: &DiscreteFlow, att: &GlobAttachment) -> Result<Self> {
        att.validate(base)?;
        if !is_loop_free(base, att) {
            return Err(Error::NotLoopFree);
        }
        let labels = base.states().to_vec();
        let (u, v) = (labels[att.g0].clone(), labels[att.g1].clone());
        let context = PosetContext::new(labels, &u, &v)?;
        let cells = att.attached_cells(base);
        let mut df = DfDiagram {
            context,
            base: base.clone(),
            attachment: att.clone(),
            cells,
            support: Vec::new(),
            values: Vec::new(),
            diagram: SetDiagram::new(FinitePoset::discrete(0), vec![], vec![])?,
            support_index: HashMap::new(),
            value_index: Vec::new(),
        };
        df.support = df.enumerate_support();
        df.support_index = df.support.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        df.values = df.support.iter().map(|o| df.value_elements(o)).collect();
        df.value_index = df
            .values
            .iter()
            .map(|vals| vals.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect())
            .collect();
        df.diagram = df.restricted_diagram(&df.support)?;
        Ok(df)
    }

    /// `D^{id_A}`: the same construction along the identity attachment on
    /// `(g0, g1)`.
    pub fn build_identity(base: &DiscreteFlow, g0: usize, g1: usize) -> Result<Self> {
        Self::build(base, &GlobAttachment::identity(base, g0, g1))
    }

    /// Chains of cells with nonempty factor sets, ordered by length, then
    /// states, then flags.
    fn enumerate_support(&self) -> Vec<TupleObject> {
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<usize>, Vec<bool>)> =
            (0..self.base.state_count()).map(|s| (vec![s], Vec::new())).collect();
        while let Some((states, flags)) = stack.pop() {
            let last = *states.last().expect("nonempty");
            for next in 0..self.base.state_count() {
                for flag in [false, true] {
                    if self.factor(last, flag, next).is_empty() {
                        continue;
                    }
                    let mut s = states.clone();
                    s.push(next);
                    let mut f = flags.clone();
                    f.push(flag);
                    out.push(TupleObject::from_parts(s.clone(), f.clone()).expect("well formed"));
                    stack.push((s, f));
                }
            }
        }
        out.sort_by(|a, b| (a.len(), a.states(), a.flags()).cmp(&(b.len(), b.states(), b.flags())));
        out
    }

    /// The factor set of one cell.
    pub fn factor(&self, src: usize, flag: bool, tgt: usize) -> Vec<usize> {
        if flag {
            if (src, tgt) == (self.attachment.g0, self.attachment.g1) {
                (0..self.cells.len()).collect()
            } else {
                Vec::new()
            }
        } else {
            self.base.paths_between(src, tgt)
        }
    }

    /// The value at any chain of the context, as a lexicographically ordered
    /// product; empty off the support.
    pub fn value_elements(&self, obj: &TupleObject) -> Vec<Vec<usize>> {
        let factors: Vec<Vec<usize>> = obj.cells().map(|c| self.factor(c.src, c.flag, c.tgt)).collect();
        cartesian(&factors)
    }

    /// The action of one generating arrow on an element.
    pub fn act(&self, gen: GeneratorArrow, element: &[usize]) -> Vec<usize> {
        let i = gen.position;
        let mut out = element.to_vec();
        match gen.kind {
            GeneratorKind::Compose => {
                let composite = self
                    .base
                    .compose(element[i - 1], element[i])
                    .expect("composition is total on composable pairs");
                out[i - 1] = composite;
                out.remove(i);
            }
            GeneratorKind::Include => out[i - 1] = self.cells.from_path[&element[i - 1]],
        }
        out
    }

    /// The diagram restricted to a list of chains (values computed for each).
    pub fn restricted_diagram(&self, objects: &[TupleObject]) -> Result<SetDiagram> {
        let index: HashMap<&TupleObject, usize> = objects.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let values: Vec<Vec<Vec<usize>>> = objects.iter().map(|o| self.value_elements(o)).collect();
        let lookup: Vec<HashMap<&Vec<usize>, usize>> = values
            .iter()
            .map(|vals| vals.iter().enumerate().map(|(i, e)| (e, i)).collect())
            .collect();
        let mut covers: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, obj) in objects.iter().enumerate() {
            for g in self.context.generators(obj) {
                let target = self.context.apply(obj, g)?;
                let Some(&j) = index.get(&target) else { continue };
                let table: Vec<usize> = values[i].iter().map(|e| lookup[j][&self.act(g, e)]).collect();
                if let Some(existing) = covers.get(&(i, j)) {
                    if *existing != table {
                        return Err(Error::NotFunctorial(format!(
                            "two generators {} -> {} act differently",
                            self.context.display(obj),
                            self.context.display(&target)
                        )));
                    }
                } else {
                    covers.insert((i, j), table);
                }
            }
        }
        let names = objects.iter().map(|o| self.context.display(o)).collect();
        let (pairs, maps): (Vec<_>, Vec<_>) = covers.into_iter().unzip();
        let poset = FinitePoset::new(names, pairs)?;
        SetDiagram::new(poset, values.iter().map(Vec::len).collect(), maps)
    }

    pub fn support_position(&self, obj: &TupleObject) -> Option<usize> {
        self.support_index.get(obj).copied()
    }

    pub fn element_position(&self, object: usize, element: &[usize]) -> Option<usize> {
        self.value_index[object].get(element).copied()
    }

    /// Renders an element as its cells joined by `·`, raised cells in
    /// brackets.
    pub fn render(&self, object: usize, element: &[usize]) -> String {
        self.support[object]
            .flags()
            .iter()
            .zip(element)
            .map(|(&flag, &x)| {
                if flag {
                    format!("[{}]", self.cells.labels[x])
                } else {
                    self.base.path(x).id.clone()
                }
            })
            .collect::<Vec<_>>()
            .join("·")
    }

    /// Support objects grouped by endpoints.
    pub fn blocks(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, obj) in self.support.iter().enumerate() {
            out.entry(obj.endpoints()).or_default().push(i);
        }
        out
    }

    /// Whether the global colimit is the disjoint union of the colimits of
    /// the blocks `D^f_{α,β}`.
    pub fn block_decomposition_holds(&self) -> Result<bool> {
        let global = self.diagram.colimit();
        let mut seen_classes = 0;
        for objects in self.blocks().values() {
            let chains: Vec<TupleObject> = objects.iter().map(|&i| self.support[i].clone()).collect();
            let block = self.restricted_diagram(&chains)?.colimit();
            seen_classes += block.apex_size();
            // same partition on the block's elements
            let mut pairing: HashMap<usize, usize> = HashMap::new();
            let mut reverse: HashMap<usize, usize> = HashMap::new();
            for (k, &i) in objects.iter().enumerate() {
                for x in 0..self.values[i].len() {
                    let (b, g) = (block.inject(k, x), global.inject(i, x));
                    if *pairing.entry(b).or_insert(g) != g || *reverse.entry(g).or_insert(b) != b {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(seen_classes == global.apex_size())
    }

    /// Compares the colimit over the support with the colimit over every
    /// chain of degree at most `max_degree`, empty values included.
    pub fn unrestricted_colimit_agrees(&self, max_degree: usize) -> Result<bool> {
        if self.support.iter().any(|o| o.degree() > max_degree) {
            return Err(Error::InvalidContext(format!(
                "degree cap {max_degree} is below the support"
            )));
        }
        let all = self.context.enumerate_up_to(max_degree).objects;
        let full = self.restricted_diagram(&all)?.colimit();
        let restricted = self.diagram.colimit();
        let position: HashMap<&TupleObject, usize> = all.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let mut pairing: HashMap<usize, usize> = HashMap::new();
        let mut reverse: HashMap<usize, usize> = HashMap::new();
        for (i, obj) in self.support.iter().enumerate() {
            let j = position[obj];
            for x in 0..self.values[i].len() {
                let (a, b) = (restricted.inject(i, x), full.inject(j, x));
                if *pairing.entry(a).or_insert(b) != b || *reverse.entry(b).or_insert(a) != a {
                    return Ok(false);
                }
            }
        }
        Ok(full.apex_size() == restricted.apex_size())
    }
}

fn cartesian(factors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for prefix in &out {
            for &x in f {
                let mut e = prefix.clone();
                e.push(x);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

/// The colimit of `D^f` with the composition induced by concatenating
/// chains.
pub fn pathspace_via_reedy(base: &DiscreteFlow, att: &GlobAttachment) -> Result<ReedyPushout> {
    let df = DfDiagram::build(base, att)?;
    let colimit = df.diagram.colimit();
    let classes = colimit.apex_size();
    let members = colimit.members();

    let paths: Vec<PathInfo> = (0..classes)
        .map(|c| {
            let (obj, x) = colimit.representative(c);
            let (src, tgt) = df.support[obj].endpoints();
            PathInfo { id: df.render(obj, &df.values[obj][x]), src, tgt }
        })
        .collect();

    let class_of_concat = |(m, x): (usize, usize), (n, y): (usize, usize)| -> usize {
        let joined = df.support[m].concat(&df.support[n]).expect("composable chains");
        let obj = df.support_position(&joined).expect("support is closed under concatenation");
        let mut element = df.values[m][x].clone();
        element.extend_from_slice(&df.values[n][y]);
        colimit.inject(obj, df.element_position(obj, &element).expect("product element"))
    };

    let mut compose = Vec::new();
    for x in 0..classes {
        for y in 0..classes {
            if paths[x].tgt != paths[y].src {
                continue;
            }
            let z = class_of_concat(colimit.representative(x), colimit.representative(y));
            for &a in &members[x] {
                for &b in &members[y] {
                    if class_of_concat(a, b) != z {
                        return Err(Error::InvalidFlow(format!(
                            "concatenation is not well defined on classes {} and {}",
                            paths[x].id, paths[y].id
                        )));
                    }
                }
            }
            compose.push((x, y, z));
        }
    }
    let flow = DiscreteFlow::new(base.states().to_vec(), paths, compose)?;

    let class_of_cell = |flag: bool, src: usize, tgt: usize, x: usize| -> usize {
        let obj = TupleObject::from_parts(vec![src, tgt], vec![flag]).expect("one cell");
        let i = df.support_position(&obj).expect("nonempty value");
        colimit.inject(i, df.element_position(i, &[x]).expect("factor element"))
    };
    let from_base = FlowMap {
        state_map: (0..base.state_count()).collect(),
        path_map: base.paths().iter().enumerate().map(|(p, info)| class_of_cell(false, info.src, info.tgt, p)).collect(),
    };
    let from_cells = FlowMap {
        state_map: vec![att.g0, att.g1],
        path_map: df.cells.from_cell.iter().map(|&c| class_of_cell(true, att.g0, att.g1, c)).collect(),
    };
    Ok(ReedyPushout { df, colimit, flow, from_base, from_cells })
}

/// Builds both pushouts and looks for the isomorphism sending each chain
/// element to the class of its word.
pub fn compare_with_oracle(base: &DiscreteFlow, att: &GlobAttachment) -> Result<Comparison> {
    let reedy = pathspace_via_reedy(base, att)?;
    let oracle = pushout_glob_oracle(base, att, None)?;
    Ok(compare_constructions(&reedy, &oracle))
}

/// The comparison on already computed pushouts.
pub fn compare_constructions(reedy: &ReedyPushout, oracle: &crate::pushout::GlobPushout) -> Comparison {
    let df = &reedy.df;
    let mismatch = |reason: String| Comparison::Mismatch { reason };
    let mut path_map: Vec<Option<usize>> = vec![None; reedy.flow.path_count()];
    for (i, obj) in df.support.iter().enumerate() {
        for (x, element) in df.values[i].iter().enumerate() {
            let word: Vec<usize> = obj
                .flags()
                .iter()
                .zip(element)
                .map(|(&flag, &e)| if flag { new_cell_letter(&df.base, e) } else { old_path_letter(e) })
                .collect();
            let Some(target) = oracle.quotient.class_of_word(&word) else {
                return mismatch(format!("word of {} lies outside the word universe", df.render(i, element)));
            };
            let class = reedy.colimit.inject(i, x);
            match path_map[class] {
                None => path_map[class] = Some(target),
                Some(t) if t != target => {
                    return mismatch(format!(
                        "class {} meets word classes {} and {}",
                        reedy.flow.path(class).id,
                        oracle.flow.path(t).id,
                        oracle.flow.path(target).id
                    ))
                }
                Some(_) => {}
            }
        }
    }
    let path_map: Vec<usize> = path_map.into_iter().map(|t| t.expect("every class has members")).collect();
    let mut hit = vec![false; oracle.flow.path_count()];
    for &t in &path_map {
        if std::mem::replace(&mut hit[t], true) {
            return mismatch(format!("two classes map to {}", oracle.flow.path(t).id));
        }
    }
    if let Some(missed) = hit.iter().position(|h| !h) {
        return mismatch(format!("word class {} is not reached", oracle.flow.path(missed).id));
    }
    for (p, info) in reedy.flow.paths().iter().enumerate() {
        let image = oracle.flow.path(path_map[p]);
        if (image.src, image.tgt) != (info.src, info.tgt) {
            return mismatch(format!("{} and {} have different endpoints", info.id, image.id));
        }
    }
    for (x, y, z) in reedy.flow.compose_table() {
        if oracle.flow.compose(path_map[x], path_map[y]) != Some(path_map[z]) {
            return mismatch(format!(
                "composition {} * {} is not preserved",
                reedy.flow.path(x).id,
                reedy.flow.path(y).id
            ));
        }
    }
    if reedy.flow.compose_table().len() != oracle.flow.compose_table().len() {
        return mismatch("the composition tables have different sizes".into());
    }
    for (p, &c) in reedy.from_base.path_map.iter().enumerate() {
        if path_map[c] != oracle.from_base.path_map[p] {
            return mismatch(format!("the maps from the base disagree on {}", df.base.path(p).id));
        }
    }
    for (z, &c) in reedy.from_cells.path_map.iter().enumerate() {
        if path_map[c] != oracle.from_cells.path_map[z] {
            return mismatch(format!("the maps from the cells disagree on {}", df.attachment.cells[z]));
        }
    }
    Comparison::Isomorphism { path_map }
}

/// Colimit of `D^f` over the flag-lowerings of `n`, empty values included.
pub fn latching_object(df: &DfDiagram, n: &TupleObject) -> Result<Latching> {
    df.context.check(n)?;
    let lowerings = df.context.latching_category(n).objects;
    let diagram = df.restricted_diagram(&lowerings)?;
    let colim = diagram.colimit();
    let target = df.value_elements(n);
    let target_index: HashMap<&Vec<usize>, usize> = target.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let to_value = (0..colim.apex_size())
        .map(|c| {
            let (k, x) = colim.representative(c);
            let element = raise_to(df, &lowerings[k], n, &df.value_elements(&lowerings[k])[x]);
            target_index[&element]
        })
        .collect();
    Ok(Latching { size: colim.apex_size(), to_value })
}

/// Applies the inclusion at every cell raised in `n` but not in `obj`.
fn raise_to(df: &DfDiagram, obj: &TupleObject, n: &TupleObject, element: &[usize]) -> Vec<usize> {
    element
        .iter()
        .enumerate()
        .map(|(i, &x)| if n.flags()[i] && !obj.flags()[i] { df.cells.from_path[&x] } else { x })
        .collect()
}

/// The cube of one factor per cell: `∅ -> P_{u,v}A` for flag 0,
/// `P_{g0,g1}A -> T` for flag 1.
struct Cube<'a> {
    df: &'a DfDiagram,
    n: &'a TupleObject,
    colimit: ColimitResult,
    /// proper subsets in index order, with their element lists
    values: Vec<Vec<Vec<usize>>>,
}

impl<'a> Cube<'a> {
    fn new(df: &'a DfDiagram, n: &'a TupleObject) -> Result<Self> {
        let len = n.len();
        let full = (1usize << len) - 1;
        let factor = |i: usize, upper: bool| -> Vec<usize> {
            let c = n.cell(i + 1);
            match (c.flag, upper) {
                (false, false) => Vec::new(),
                (false, true) => df.base.paths_between(c.src, c.tgt),
                (true, false) => df.base.paths_between(df.attachment.g0, df.attachment.g1),
                (true, true) => (0..df.cells.len()).collect(),
            }
        };
        let values: Vec<Vec<Vec<usize>>> = (0..full)
            .map(|s| cartesian(&(0..len).map(|i| factor(i, s & (1 << i) != 0)).collect::<Vec<_>>()))
            .collect();
        let mut covers = Vec::new();
        let mut maps = Vec::new();
        for s in 0..full {
            for i in 0..len {
                let t = s | (1 << i);
                if t == s || t == full {
                    continue;
                }
                let index: HashMap<&Vec<usize>, usize> = values[t].iter().enumerate().map(|(k, e)| (e, k)).collect();
                let table = values[s]
                    .iter()
                    .map(|e| {
                        let mut image = e.clone();
                        image[i] = df.cells.from_path[&e[i]];
                        index[&image]
                    })
                    .collect();
                covers.push((s, t));
                maps.push(table);
            }
        }
        let names = (0..full).map(|s| format!("{s:0len$b}")).collect();
        let diagram = SetDiagram::new(FinitePoset::new(names, covers)?, values.iter().map(Vec::len).collect(), maps)?;
        Ok(Cube { df, n, colimit: diagram.colimit(), values })
    }

    fn to_full(&self, subset: usize, element: &[usize]) -> Vec<usize> {
        element
            .iter()
            .enumerate()
            .map(|(i, &x)| if subset & (1 << i) == 0 && self.n.flags()[i] { self.df.cells.from_path[&x] } else { x })
            .collect()
    }
}

/// The colimit of the pushout-product cube over proper subsets, with its
/// canonical map into the full product.
pub fn latching_via_cube(df: &DfDiagram, n: &TupleObject) -> Result<Latching> {
    df.context.check(n)?;
    let cube = Cube::new(df, n)?;
    let target = df.value_elements(n);
    let target_index: HashMap<&Vec<usize>, usize> = target.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let to_value = (0..cube.colimit.apex_size())
        .map(|c| {
            let (s, x) = cube.colimit.representative(c);
            target_index[&cube.to_full(s, &cube.values[s][x])]
        })
        .collect();
    Ok(Latching { size: cube.colimit.apex_size(), to_value })
}

/// Checks the canonical bijection between the two latching constructions:
/// a lowering `l` of `n` corresponds to the subset made of the flag-0 cells
/// of `n` and the cells raised in `l`. Returns a reason on failure.
pub fn latching_agreement(df: &DfDiagram, n: &TupleObject) -> Result<Option<String>> {
    df.context.check(n)?;
    let lowerings = df.context.latching_category(n).objects;
    let direct = df.restricted_diagram(&lowerings)?.colimit();
    let direct_map = latching_object(df, n)?;
    let cube = Cube::new(df, n)?;
    let cube_map = latching_via_cube(df, n)?;
    if direct.apex_size() != cube.colimit.apex_size() {
        return Ok(Some(format!("sizes {} and {} differ", direct.apex_size(), cube.colimit.apex_size())));
    }
    let mut image: Vec<Option<usize>> = vec![None; direct.apex_size()];
    for (k, l) in lowerings.iter().enumerate() {
        let subset = (0..n.len())
            .filter(|&i| !n.flags()[i] || l.flags()[i])
            .fold(0usize, |acc, i| acc | (1 << i));
        let index: HashMap<&Vec<usize>, usize> =
            cube.values[subset].iter().enumerate().map(|(i, e)| (e, i)).collect();
        for (x, element) in df.value_elements(l).iter().enumerate() {
            let Some(&y) = index.get(element) else {
                return Ok(Some(format!("element of {} has no cube counterpart", df.context.display(l))));
            };
            let (a, b) = (direct.inject(k, x), cube.colimit.inject(subset, y));
            match image[a] {
                None => image[a] = Some(b),
                Some(prev) if prev != b => return Ok(Some("correspondence is not well defined".into())),
                Some(_) => {}
            }
        }
    }
    let mut hit = vec![false; cube.colimit.apex_size()];
    for (a, b) in image.iter().enumerate() {
        let Some(b) = *b else { return Ok(Some(format!("latching class {a} is empty"))) };
        if std::mem::replace(&mut hit[b], true) {
            return Ok(Some("correspondence is not injective".into()));
        }
        if direct_map.to_value[a] != cube_map.to_value[b] {
            return Ok(Some("comparison maps do not commute".into()));
        }
    }
    Ok(None)
}

/// The map `L_n D^f ⊔_{L_n D^{id}} D^{id}(n) -> D^f(n)`, classified by
/// whether `n` has a raised cell.
pub fn relative_latching_map(df: &DfDiagram, df_id: &DfDiagram, n: &TupleObject) -> Result<RelativeLatching> {
    df.context.check(n)?;
    let lowerings = df.context.latching_category(n).objects;
    let lf = df.restricted_diagram(&lowerings)?.colimit();
    let li = df_id.restricted_diagram(&lowerings)?.colimit();
    let lf_map = latching_object(df, n)?;
    let li_map = latching_object(df_id, n)?;

    // the natural map D^{id} -> D^f is fromPath on raised cells
    let mut tau_cell = vec![usize::MAX; df_id.cells.len()];
    for (&p, &c) in &df_id.cells.from_path {
        tau_cell[c] = df.cells.from_path[&p];
    }
    let tau = |obj: &TupleObject, element: &[usize]| -> Vec<usize> {
        element
            .iter()
            .zip(obj.flags())
            .map(|(&x, &flag)| if flag { tau_cell[x] } else { x })
            .collect()
    };
    let li_to_lf: Vec<usize> = (0..li.apex_size())
        .map(|c| {
            let (k, x) = li.representative(c);
            let image = tau(&lowerings[k], &df_id.value_elements(&lowerings[k])[x]);
            let position = df.value_elements(&lowerings[k]).iter().position(|e| *e == image).expect("value element");
            lf.inject(k, position)
        })
        .collect();
    let id_values = df_id.value_elements(n);
    let f_values = df.value_elements(n);
    let f_index: HashMap<&Vec<usize>, usize> = f_values.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let tau_n: Vec<usize> = id_values.iter().map(|e| f_index[&tau(n, e)]).collect();

    let span = FinitePoset::new(vec!["L_id".into(), "L_f".into(), "D_id(n)".into()], vec![(0, 1), (0, 2)])?;
    let pushout = SetDiagram::new(
        span,
        vec![li.apex_size(), lf.apex_size(), id_values.len()],
        vec![li_to_lf, li_map.to_value.clone()],
    )?
    .colimit();

    let mut map: Vec<Option<usize>> = vec![None; pushout.apex_size()];
    let mut well_defined = true;
    for (c, members) in pushout.members().iter().enumerate() {
        for &(obj, x) in members {
            let image = match obj {
                0 => continue,
                1 => lf_map.to_value[x],
                _ => tau_n[x],
            };
            match map[c] {
                None => map[c] = Some(image),
                Some(prev) if prev != image => well_defined = false,
                Some(_) => {}
            }
        }
    }
    let map: Vec<usize> = map.into_iter().map(|m| m.unwrap_or(usize::MAX)).collect();

    let case = if !well_defined {
        LatchingCase::Unverified
    } else if n.height() == 0 {
        let mut sorted = map.clone();
        sorted.sort_unstable();
        if sorted == (0..f_values.len()).collect::<Vec<_>>() {
            LatchingCase::Bijection
        } else {
            LatchingCase::Unverified
        }
    } else {
        let from_lf: Vec<usize> = (0..lf.apex_size()).map(|x| pushout.inject(1, x)).collect();
        let mut sorted = from_lf.clone();
        sorted.sort_unstable();
        let bijective = sorted == (0..pushout.apex_size()).collect::<Vec<_>>();
        let commutes = (0..lf.apex_size()).all(|x| map[from_lf[x]] == lf_map.to_value[x]);
        if bijective && commutes {
            LatchingCase::LatchingMap
        } else {
            LatchingCase::Unverified
        }
    };
    Ok(RelativeLatching { case, pushout_size: pushout.apex_size(), map })
}

/// Compares the set colimit of the path sets of a chain of injective flow
/// maps with the path set of the colimit flow.
pub fn tower_pathspace_check(base: &DiscreteFlow, steps: &[(DiscreteFlow, FlowMap)]) -> Result<bool> {
    for (i, (_, map)) in steps.iter().enumerate() {
        if !map.is_injective_on_paths() {
            return Err(Error::NotInjective(format!("step {}", i + 1)));
        }
    }
    let flows: Vec<&DiscreteFlow> = std::iter::once(base).chain(steps.iter().map(|(f, _)| f)).collect();
    let sets = SetDiagram::new(
        FinitePoset::chain(flows.len()),
        flows.iter().map(|f| f.path_count()).collect(),
        steps.iter().map(|(_, m)| m.path_map.clone()).collect(),
    )?
    .colimit();
    let (colim, legs) = chain_colimit(base, steps, None)?;
    let mut image: Vec<Option<usize>> = vec![None; sets.apex_size()];
    for (c, members) in sets.members().iter().enumerate() {
        for &(i, p) in members {
            let target = legs[i].path_map[p];
            match image[c] {
                None => image[c] = Some(target),
                Some(prev) if prev != target => return Ok(false),
                Some(_) => {}
            }
        }
    }
    let mut hit = vec![false; colim.path_count()];
    for t in image.into_iter().flatten() {
        if std::mem::replace(&mut hit[t], true) {
            return Ok(false);
        }
    }
    Ok(hit.into_iter().all(|h| h))
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

    fn one_cell_glob() -> (DiscreteFlow, GlobAttachment) {
        let a = make_glob(&strings(&["c"]));
        let att = GlobAttachment { g0: 0, g1: 1, boundary: vec![], cells: strings(&["z"]), attach: vec![], incl: vec![] };
        (a, att)
    }

    fn three_state() -> (DiscreteFlow, GlobAttachment) {
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
        (a, att)
    }

    #[test]
    fn support_of_one_cell_glob() {
        let (a, att) = one_cell_glob();
        let df = DfDiagram::build(&a, &att).unwrap();
        let shown: Vec<_> = df.support.iter().map(|o| df.context.display(o)).collect();
        assert_eq!(shown, ["(0 0 1)", "(0 1 1)"]);
        assert_eq!(df.values[0].len(), 1);
        assert_eq!(df.values[1].len(), 2);
    }

    #[test]
    fn support_with_empty_base() {
        let a = DiscreteFlow::new(strings(&["0", "1"]), vec![], vec![]).unwrap();
        let att = GlobAttachment { g0: 0, g1: 1, boundary: vec![], cells: strings(&["z"]), attach: vec![], incl: vec![] };
        let df = DfDiagram::build(&a, &att).unwrap();
        assert_eq!(df.support.len(), 1);
        assert_eq!(df.context.display(&df.support[0]), "(0 1 1)");
    }

    #[test]
    fn support_of_three_state_example() {
        let (a, att) = three_state();
        let df = DfDiagram::build(&a, &att).unwrap();
        for text in ["(0 0 2)", "(0 0 1)(1 0 2)", "(0 0 1)(1 1 2)"] {
            let obj = df.context.parse_object(text).unwrap();
            assert!(df.support_position(&obj).is_some(), "{text}");
        }
    }

    #[test]
    fn colimit_of_one_cell_glob() {
        let (a, att) = one_cell_glob();
        let x = pathspace_via_reedy(&a, &att).unwrap();
        assert_eq!(x.colimit.apex_size(), 2);
        let ids: Vec<_> = x.flow.paths().iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["c", "[z]"]);
    }

    #[test]
    fn colimit_of_three_state_example() {
        let (a, att) = three_state();
        let x = pathspace_via_reedy(&a, &att).unwrap();
        let ids: Vec<_> = x.flow.paths_between(0, 2).into_iter().map(|p| x.flow.path(p).id.clone()).collect();
        assert_eq!(ids, ["r", "p·[z]"]);
        assert!(x.df.block_decomposition_holds().unwrap());
    }

    #[test]
    fn identity_attachment_gives_base() {
        let (a, _) = three_state();
        let att = GlobAttachment::identity(&a, 0, 2);
        let x = pathspace_via_reedy(&a, &att).unwrap();
        assert_eq!(x.flow.path_count(), a.path_count());
        assert!(matches!(compare_with_oracle(&a, &att).unwrap(), Comparison::Isomorphism { .. }));
    }

    #[test]
    fn comparisons_on_examples() {
        for (a, att) in [one_cell_glob(), three_state()] {
            let cmp = compare_with_oracle(&a, &att).unwrap();
            assert!(matches!(cmp, Comparison::Isomorphism { .. }), "{cmp:?}");
        }
        let a = DiscreteFlow::new(strings(&["0", "1"]), vec![], vec![]).unwrap();
        let att = GlobAttachment { g0: 0, g1: 1, boundary: vec![], cells: strings(&["y", "z"]), attach: vec![], incl: vec![] };
        let x = pathspace_via_reedy(&a, &att).unwrap();
        assert_eq!(x.flow.path_count(), 2);
        assert!(matches!(compare_with_oracle(&a, &att).unwrap(), Comparison::Isomorphism { .. }));
    }

    #[test]
    fn latching_examples() {
        let (a, att) = one_cell_glob();
        let df = DfDiagram::build(&a, &att).unwrap();
        let raised = df.context.parse_object("(0 1 1)").unwrap();
        let l = latching_object(&df, &raised).unwrap();
        assert_eq!(l.size, 1);
        // c goes to the class of c in T
        assert_eq!(l.to_value, vec![df.cells.from_path[&0]]);
        assert_eq!(latching_via_cube(&df, &raised).unwrap(), l);
        let flat = df.context.parse_object("(0 0 1)").unwrap();
        assert_eq!(latching_object(&df, &flat).unwrap().size, 0);
        assert_eq!(latching_via_cube(&df, &flat).unwrap().size, 0);

        let (a, att) = three_state();
        let df = DfDiagram::build(&a, &att).unwrap();
        let n = df.context.parse_object("(0 0 1)(1 1 2)").unwrap();
        assert_eq!(latching_object(&df, &n).unwrap().size, 1);
        assert_eq!(latching_via_cube(&df, &n).unwrap().size, 1);
        assert_eq!(latching_agreement(&df, &n).unwrap(), None);
    }

    #[test]
    fn relative_latching_examples() {
        let (a, att) = one_cell_glob();
        let df = DfDiagram::build(&a, &att).unwrap();
        let df_id = DfDiagram::build_identity(&a, 0, 1).unwrap();
        let flat = df.context.parse_object("(0 0 1)").unwrap();
        assert_eq!(relative_latching_map(&df, &df_id, &flat).unwrap().case, LatchingCase::Bijection);
        let raised = df.context.parse_object("(0 1 1)").unwrap();
        let rel = relative_latching_map(&df, &df_id, &raised).unwrap();
        assert_eq!(rel.case, LatchingCase::LatchingMap);
        assert_eq!(rel.map, vec![df.cells.from_path[&0]]);

        let (a, att) = three_state();
        let df = DfDiagram::build(&a, &att).unwrap();
        let df_id = DfDiagram::build_identity(&a, 1, 2).unwrap();
        let n = df.context.parse_object("(0 0 1)(1 1 2)").unwrap();
        let rel = relative_latching_map(&df, &df_id, &n).unwrap();
        assert_eq!(rel.case, LatchingCase::LatchingMap);
        assert_eq!(rel.pushout_size, 1);
    }

    #[test]
    fn latching_rejects_foreign_objects() {
        let (a, att) = one_cell_glob();
        let df = DfDiagram::build(&a, &att).unwrap();
        let foreign = TupleObject::from_parts(vec![0, 7], vec![false]).unwrap();
        assert!(matches!(latching_object(&df, &foreign), Err(Error::ObjectOutsideContext(_))));
    }

    #[test]
    fn cyclic_instances_are_rejected() {
        let a = DiscreteFlow::new(strings(&["0"]), vec![], vec![]).unwrap();
        let att = GlobAttachment { g0: 0, g1: 0, boundary: vec![], cells: strings(&["z"]), attach: vec![], incl: vec![] };
        assert_eq!(DfDiagram::build(&a, &att).unwrap_err(), Error::NotLoopFree);
    }

    #[test]
    fn truncation_to_support_is_harmless() {
        let (a, att) = three_state();
        let df = DfDiagram::build(&a, &att).unwrap();
        assert!(df.unrestricted_colimit_agrees(4).unwrap());
    }

    #[test]
    fn towers() {
        let glob = make_glob(&strings(&["c"]));
        assert!(tower_pathspace_check(&glob, &[(glob.clone(), FlowMap::identity(&glob))]).unwrap());
        let (x1, f1) = crate::pushout::pushout_add_state(&glob);
        let (x2, f2) = crate::pushout::pushout_add_state(&x1);
        assert!(tower_pathspace_check(&glob, &[(x1, f1), (x2, f2)]).unwrap());
        let collapse = DiscreteFlow::new(strings(&["0", "1"]), vec![path("c", 0, 1)], vec![]).unwrap();
        let two = make_glob(&strings(&["c", "d"]));
        let squash = FlowMap { state_map: vec![0, 1], path_map: vec![0, 0] };
        assert!(matches!(tower_pathspace_check(&two, &[(collapse, squash)]), Err(Error::NotInjective(_))));
    }
}

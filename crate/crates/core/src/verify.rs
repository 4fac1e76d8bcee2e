//! The property suites behind `verify`, run over the seeded corpus.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map};

use crate::corpus::{
    item_rng, random_chain, random_diagram, random_instance, random_reparam, random_triple, random_weight,
    InstanceLimits,
};
use crate::diagram::SetDiagram;
use crate::error::{Error, Result};
use crate::flow::{flow_map_violation, DiscreteFlow, FlowMap, GlobAttachment};
use crate::flow_io::{attachment_to_json, flow_to_json};
use crate::moore::{act, blend, compose_reparam, invert_reparam, moore_compose, normalized_associativity_fails,
    normalized_compose, rat, PLReparam, Rational};
use crate::oracle::{
    colimit_matches_components, doubled, mediating_maps, poset_suite, product_bijection, required_images,
    sum_decomposition, terminal_flow, universal_property, Checks, Tally,
};
use crate::pathspace::{
    compare_constructions, latching_agreement, latching_object, pathspace_via_reedy, relative_latching_map,
    tower_pathspace_check, Comparison, DfDiagram, LatchingCase,
};
use crate::pushout::pushout_glob_oracle;
use crate::report::{CheckReport, RunReport, SuiteReport};

/// Largest truncation of the poset suite.
pub const POSET_MAX_STATES: usize = 3;
pub const POSET_MAX_DEGREE: usize = 7;
/// Pushouts with more paths skip the mediating-map search.
pub const MEDIATING_SEARCH_LIMIT: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Poset,
    Diagrams,
    Pushout,
    Moore,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["poset", "diagrams", "pushout", "moore", "all"];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Poset, Suite::Diagrams, Suite::Pushout, Suite::Moore],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Poset => "poset",
            Suite::Diagrams => "diagrams",
            Suite::Pushout => "pushout",
            Suite::Moore => "moore",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poset" => Ok(Suite::Poset),
            "diagrams" => Ok(Suite::Diagrams),
            "pushout" => Ok(Suite::Pushout),
            "moore" => Ok(Suite::Moore),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!("unknown suite {other:?}"))),
        }
    }
}

/// Runs the chosen suites; the report depends only on the arguments.
pub fn run_verify(suite: Suite, seed: u64, count: usize) -> RunReport {
    let suites = suite
        .members()
        .into_iter()
        .map(|s| match s {
            Suite::Poset => poset_report(),
            Suite::Diagrams => diagrams_report(seed, count),
            Suite::Pushout => pushout_report(seed, count),
            Suite::Moore => moore_report(seed, count),
            Suite::All => unreachable!("expanded above"),
        })
        .collect();
    let mut parameters = Map::new();
    parameters.insert("suite".into(), json!(suite.to_string()));
    parameters.insert("seed".into(), json!(seed));
    parameters.insert("count".into(), json!(count));
    RunReport::new("verify", parameters, suites)
}

fn suite(name: &str, checks: Checks) -> SuiteReport {
    SuiteReport {
        name: name.into(),
        checks: checks.into_iter().map(|(n, t)| CheckReport::from_tally(n, t)).collect(),
    }
}

/// Runs `per_item` on items `0..count` in parallel and merges the tallies
/// in item order.
fn over_items<F>(names: &[&'static str], count: usize, per_item: F) -> Checks
where
    F: Fn(u64) -> Vec<Tally> + Sync + Send,
{
    let results: Vec<Vec<Tally>> = (0..count as u64).into_par_iter().map(per_item).collect();
    let mut totals: Vec<Tally> = vec![Tally::default(); names.len()];
    for item in results {
        for (acc, t) in totals.iter_mut().zip(item) {
            acc.merge(t);
        }
    }
    names.iter().copied().zip(totals).collect()
}

fn poset_report() -> SuiteReport {
    let mut report = suite("poset", poset_suite(POSET_MAX_STATES, POSET_MAX_DEGREE));
    report.checks[0] = report.checks[0]
        .clone()
        .with_note(format!("every context with at most {POSET_MAX_STATES} states, up to relabelling, truncated at degree {POSET_MAX_DEGREE}"));
    report
}

pub const DIAGRAM_CHECKS: [&str; 4] = ["colimit_components", "universal_property", "sum_decomposition", "product_bijection"];

fn diagrams_report(seed: u64, count: usize) -> SuiteReport {
    let checks = over_items(&DIAGRAM_CHECKS, count, |k| {
        let mut rng = item_rng(seed, 3, k);
        let d = random_diagram(&mut rng, 6, 5);
        let label = format!("diagram {k}");
        let one = |finding: Option<String>| match finding {
            None => Tally::pass(),
            Some(w) => Tally::fail(format!("{label}: {w}; {}", describe_diagram(&d))),
        };
        let components = one(colimit_matches_components(&d));
        let universal = universal_property(&d, &mut rng, 4).prefixed(&format!("{label}: {}", describe_diagram(&d)));
        let summands: Vec<SetDiagram> = (0..rng.gen_range(2..=3)).map(|_| random_diagram(&mut rng, 6, 5)).collect();
        let sum = match sum_decomposition(&summands) {
            None => Tally::pass(),
            Some(w) => Tally::fail(format!("{label}: {w}")),
        };
        let other = random_diagram(&mut rng, 6, 5);
        let product = match product_bijection(&d, &other) {
            None => Tally::pass(),
            Some(w) => Tally::fail(format!("{label}: {w}; with {}", describe_diagram(&other))),
        };
        vec![components, universal, sum, product]
    });
    suite("diagrams", checks)
}

/// A replayable description of a diagram.
pub fn describe_diagram(d: &SetDiagram) -> String {
    json!({
        "objects": d.index().names(),
        "covers": d.index().covers(),
        "sizes": d.sizes(),
        "maps": d.maps(),
    })
    .to_string()
}

pub const PUSHOUT_CHECKS: [&str; 8] = [
    "oracle_equivalence",
    "canonical_maps",
    "universal_property",
    "block_decomposition",
    "latching_cube",
    "latching_empty_at_height_zero",
    "relative_latching_dichotomy",
    "tower_commutation",
];

/// The corpus instance as replayable JSON.
pub fn describe_instance(seed: u64, k: u64, base: &DiscreteFlow, att: &GlobAttachment) -> String {
    json!({
        "seed": seed,
        "index": k,
        "flow": flow_to_json(base),
        "attachment": attachment_to_json(att, base),
    })
    .to_string()
}

fn pushout_report(seed: u64, count: usize) -> SuiteReport {
    let checks = over_items(&PUSHOUT_CHECKS, count, |k| {
        let (base, att) = random_instance(seed, k, InstanceLimits::default());
        let descriptor = describe_instance(seed, k, &base, &att);
        let mut tallies = pushout_instance_checks(&base, &att);
        let (chain_base, steps) = random_chain(seed, k, 6);
        let tower = match tower_pathspace_check(&chain_base, &steps) {
            Ok(true) => Tally::pass(),
            Ok(false) => Tally::fail(format!("chain {k} of {} steps: the path sets do not commute with the colimit", steps.len())),
            Err(e) => Tally::fail(format!("chain {k}: {e}")),
        };
        tallies = tallies.into_iter().map(|t| t.prefixed(&descriptor)).collect();
        tallies.push(tower);
        tallies
    });
    suite("pushout", checks)
}

/// Every per-instance pushout check, in the order of [`PUSHOUT_CHECKS`]
/// without the tower check.
pub fn pushout_instance_checks(base: &DiscreteFlow, att: &GlobAttachment) -> Vec<Tally> {
    let oracle = match pushout_glob_oracle(base, att, None) {
        Ok(o) => o,
        Err(e) => return vec![Tally::fail(format!("oracle failed: {e}")); 7],
    };
    let reedy = match pathspace_via_reedy(base, att) {
        Ok(r) => r,
        Err(e) => return vec![Tally::fail(format!("reedy construction failed: {e}")); 7],
    };
    let equivalence = match compare_constructions(&reedy, &oracle) {
        Comparison::Isomorphism { .. } => Tally::pass(),
        Comparison::Mismatch { reason } => Tally::fail(reason),
    };

    let glob = att.cell_globe();
    let mut maps = Tally::default();
    for (name, src, dst, f) in [
        ("oracle A -> X", base, &oracle.flow, &oracle.from_base),
        ("oracle Glob(Z) -> X", &glob, &oracle.flow, &oracle.from_cells),
        ("reedy A -> X", base, &reedy.flow, &reedy.from_base),
        ("reedy Glob(Z) -> X", &glob, &reedy.flow, &reedy.from_cells),
    ] {
        let violation = flow_map_violation(src, dst, f);
        maps.record(violation.is_none(), || format!("{name}: {}", violation.clone().unwrap_or_default()));
    }
    // the square commutes on the boundary
    for (b, (&p, &z)) in att.attach.iter().zip(&att.incl).enumerate() {
        maps.record(oracle.from_base.path_map[p] == oracle.from_cells.path_map[z], || {
            format!("the square does not commute on {}", att.boundary[b])
        });
    }

    let universal = pushout_universal_property(base, att, &oracle.flow, &oracle.from_base, &oracle.from_cells);

    let block = match reedy.df.block_decomposition_holds() {
        Ok(true) => Tally::pass(),
        Ok(false) => Tally::fail("the colimit does not split over endpoint blocks"),
        Err(e) => Tally::fail(e.to_string()),
    };

    let (cube, empty, dichotomy) = latching_checks(&reedy.df, base, att);
    vec![equivalence, maps, universal, block, cube, empty, dichotomy]
}

/// Searches every flow map out of the pushout into test cocones: the
/// terminal flow, two disjoint copies of the pushout, and the pushout along
/// a quotient of the cells. Each must receive exactly one mediating map.
pub fn pushout_universal_property(
    base: &DiscreteFlow,
    att: &GlobAttachment,
    x: &DiscreteFlow,
    from_base: &FlowMap,
    from_cells: &FlowMap,
) -> Tally {
    if x.path_count() > MEDIATING_SEARCH_LIMIT {
        return Tally::default();
    }
    let mut tally = Tally::default();
    let mut expect_one = |name: &str, y: &DiscreteFlow, state_map: Vec<usize>, f: &FlowMap, g: &FlowMap, expected: Option<&[usize]>| {
        let pairs = from_base
            .path_map
            .iter()
            .zip(&f.path_map)
            .chain(from_cells.path_map.iter().zip(&g.path_map))
            .map(|(&a, &b)| (a, b));
        let Some(fixed) = required_images(x.path_count(), pairs) else {
            tally.record(false, || format!("{name}: the cocone clashes on the pushout"));
            return;
        };
        let found = mediating_maps(x, y, &state_map, &fixed, 2);
        let ok = found.len() == 1 && expected.is_none_or(|e| found[0] == e);
        tally.record(ok, || format!("{name}: {} mediating maps", found.len()));
    };

    let terminal = terminal_flow();
    let to_point = |f: &FlowMap| FlowMap { state_map: vec![0; f.state_map.len()], path_map: vec![0; f.path_map.len()] };
    expect_one("terminal", &terminal, vec![0; x.state_count()], &to_point(from_base), &to_point(from_cells), None);

    let (two, second) = doubled(x);
    expect_one(
        "second copy",
        &two,
        second.state_map.clone(),
        &from_base.then(&second),
        &from_cells.then(&second),
        Some(&second.path_map),
    );

    if att.cells.len() >= 2 {
        let last = att.cells.len() - 1;
        let quotient: Vec<usize> = (0..att.cells.len()).map(|z| if z == last { 0 } else { z }).collect();
        let merged = GlobAttachment {
            cells: att.cells[..last].to_vec(),
            incl: att.incl.iter().map(|&z| quotient[z]).collect(),
            ..att.clone()
        };
        match pushout_glob_oracle(base, &merged, None) {
            Ok(y) => {
                let g = FlowMap {
                    state_map: y.from_cells.state_map.clone(),
                    path_map: quotient.iter().map(|&z| y.from_cells.path_map[z]).collect(),
                };
                expect_one("merged cells", &y.flow, (0..x.state_count()).collect(), &y.from_base, &g, None);
            }
            Err(e) => tally.record(false, || format!("merged cells: {e}")),
        }
    }
    tally
}

fn latching_checks(df: &DfDiagram, base: &DiscreteFlow, att: &GlobAttachment) -> (Tally, Tally, Tally) {
    let mut cube = Tally::default();
    let mut empty = Tally::default();
    let mut dichotomy = Tally::default();
    let df_id = match DfDiagram::build_identity(base, att.g0, att.g1) {
        Ok(d) => d,
        Err(e) => {
            let t = Tally::fail(format!("identity diagram: {e}"));
            return (t.clone(), t.clone(), t);
        }
    };
    for n in &df.support {
        let shown = df.context.display(n);
        match latching_agreement(df, n) {
            Ok(None) => cube.record(true, String::new),
            Ok(Some(reason)) => cube.record(false, || format!("at {shown}: {reason}")),
            Err(e) => cube.record(false, || format!("at {shown}: {e}")),
        }
        if n.height() == 0 {
            match latching_object(df, n) {
                Ok(l) => empty.record(l.size == 0, || format!("L at {shown} has {} elements", l.size)),
                Err(e) => empty.record(false, || format!("at {shown}: {e}")),
            }
        }
        match relative_latching_map(df, &df_id, n) {
            Ok(r) => {
                let expected = if n.height() == 0 { LatchingCase::Bijection } else { LatchingCase::LatchingMap };
                dichotomy.record(r.case == expected, || format!("at {shown}: classified as {:?}", r.case));
            }
            Err(e) => dichotomy.record(false, || format!("at {shown}: {e}")),
        }
    }
    (cube, empty, dichotomy)
}

pub const MOORE_CHECKS: [&str; 6] = [
    "moore_associativity",
    "normalized_nonassociativity",
    "associator_repair",
    "blend_closure",
    "group_axioms",
    "rescale_duration",
];

/// Equality of two piecewise-linear paths checked pointwise at every
/// breakpoint of either side, which decides equality of PL maps.
fn same_function(f: impl Fn(&Rational) -> Option<Rational>, g: impl Fn(&Rational) -> Option<Rational>, times: &[Rational]) -> bool {
    times.iter().all(|t| f(t).is_some() && f(t) == g(t))
}

fn breakpoints_and_midpoints(mut times: Vec<Rational>) -> Vec<Rational> {
    times.sort();
    times.dedup();
    let mids: Vec<Rational> = times.windows(2).map(|w| (&w[0] + &w[1]) / rat(2, 1)).collect();
    times.extend(mids);
    times
}

fn moore_report(seed: u64, count: usize) -> SuiteReport {
    let triples = 50.max(count / 4);
    let mut tallies: Vec<Tally> = vec![Tally::default(); MOORE_CHECKS.len()];
    let mut witness_note = None;

    let mut rng = item_rng(seed, 4, 0);
    for _ in 0..triples {
        let (a, b, c) = random_triple(&mut rng, false);
        let left = moore_compose(&moore_compose(&a, &b).expect("composable"), &c).expect("composable");
        let right = moore_compose(&a, &moore_compose(&b, &c).expect("composable")).expect("composable");
        tallies[0].record(left == right, || format!("{a} | {b} | {c}"));
    }

    let mut rng = item_rng(seed, 4, 1);
    let mut found = None;
    for _ in 0..triples {
        let (a, b, c) = random_triple(&mut rng, true);
        let left = normalized_compose(&normalized_compose(&a, &b).expect("unit"), &c).expect("unit");
        let right = normalized_compose(&a, &normalized_compose(&b, &c).expect("unit")).expect("unit");
        let times = breakpoints_and_midpoints(left.points().iter().chain(right.points()).map(|(t, _)| t.clone()).collect());
        let differs = !same_function(|t| left.value_at(t), |t| right.value_at(t), &times);
        if differs && found.is_none() {
            let flagged = normalized_associativity_fails(&a, &b, &c).unwrap_or(false);
            found = Some((a.clone(), b.clone(), c.clone(), flagged));
        }
        // the fixed associator: left = right ∘ φ at every breakpoint
        let phi = PLReparam::associator();
        let repaired = act(&right, &phi).expect("unit");
        let mut times: Vec<Rational> = left.points().iter().map(|(t, _)| t.clone()).collect();
        times.extend(phi.points().iter().map(|(t, _)| t.clone()));
        times.extend(repaired.points().iter().map(|(t, _)| t.clone()));
        let times = breakpoints_and_midpoints(times);
        let exact = same_function(|t| left.value_at(t), |t| right.value_at(&phi.eval(t)?), &times) && repaired == left;
        tallies[2].record(exact, || format!("{a} | {b} | {c}"));
    }
    match found {
        Some((a, b, c, true)) => {
            tallies[1].record(true, String::new);
            witness_note = Some(format!("(a *N b) *N c != a *N (b *N c) for a = {a}; b = {b}; c = {c}"));
        }
        Some((a, b, c, false)) => tallies[1].record(false, || format!("{a} | {b} | {c} differ but are reported equal")),
        None => tallies[1].record(false, || format!("no non-associative triple among {triples}")),
    }

    let mut rng = item_rng(seed, 4, 2);
    for _ in 0..100.max(count / 2) {
        let (phi, psi, s) = (random_reparam(&mut rng), random_reparam(&mut rng), random_weight(&mut rng));
        let ok = match blend(&phi, &psi, &s) {
            Ok(mix) => {
                let times = breakpoints_and_midpoints(phi.points().iter().chain(psi.points()).map(|(t, _)| t.clone()).collect());
                let one_minus = rat(1, 1) - &s;
                let increasing = mix.points().windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
                let ends = mix.points().first() == Some(&(rat(0, 1), rat(0, 1))) && mix.points().last() == Some(&(rat(1, 1), rat(1, 1)));
                increasing
                    && ends
                    && same_function(|t| mix.eval(t), |t| Some(&one_minus * phi.eval(t)? + &s * psi.eval(t)?), &times)
            }
            Err(_) => false,
        };
        tallies[3].record(ok, || format!("blend of {phi} and {psi} at {s}"));
    }

    let mut rng = item_rng(seed, 4, 3);
    for _ in 0..triples {
        let (f, g, h) = (random_reparam(&mut rng), random_reparam(&mut rng), random_reparam(&mut rng));
        let assoc = compose_reparam(&compose_reparam(&f, &g), &h) == compose_reparam(&f, &compose_reparam(&g, &h));
        let id = PLReparam::identity();
        let unit = compose_reparam(&f, &id) == f && compose_reparam(&id, &f) == f;
        let inv = invert_reparam(&f);
        let inverse = compose_reparam(&f, &inv) == id && compose_reparam(&inv, &f) == id;
        let times = breakpoints_and_midpoints(f.points().iter().chain(g.points()).map(|(t, _)| t.clone()).collect());
        let fg = compose_reparam(&f, &g);
        let pointwise = same_function(|t| fg.eval(t), |t| f.eval(&g.eval(t)?), &times);
        tallies[4].record(assoc && unit && inverse && pointwise, || format!("{f} | {g} | {h}"));
    }

    let mut rng = item_rng(seed, 4, 4);
    for _ in 0..triples {
        let (a, b, _) = random_triple(&mut rng, false);
        let composite = moore_compose(&a, &b).expect("composable");
        let expected: Rational = a.duration() + b.duration();
        let r = crate::moore::rescale(&composite);
        let ok = *composite.duration() == expected
            && *r.duration() == rat(1, 1)
            && same_function(|t| r.value_at(t), |t| composite.value_at(&(t * &expected)), &breakpoints_and_midpoints(r.points().iter().map(|(t, _)| t.clone()).collect()));
        tallies[5].record(ok, || format!("{a} | {b}"));
    }

    let mut report = suite("moore", MOORE_CHECKS.iter().copied().zip(tallies).collect());
    if let Some(note) = witness_note {
        report.checks[1] = report.checks[1].clone().with_note(note);
    }
    report
}

//! Graphviz output for truncations of the Reedy poset and for the support
//! of `D^f`.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::pathspace::DfDiagram;
use crate::reedy::{GeneratorKind, ObjectPoset, PosetContext, TupleObject};

fn quote(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The Hasse diagram: one edge per cover, pointing up the order.
pub fn hasse_dot(ctx: &PosetContext, poset: &ObjectPoset) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, obj) in poset.objects.iter().enumerate() {
        writeln!(out, "  n{i} [label={}];", quote(&ctx.display(obj))).expect("string");
    }
    for (a, b) in poset.covers() {
        writeln!(out, "  n{a} -> n{b};").expect("string");
    }
    out.push_str("}\n");
    out
}

/// The support of `D^f` with its generator arrows. Inclusion arrows, which
/// span the latching categories, are drawn in blue; when `focus` is given,
/// the objects of its latching category are filled.
pub fn support_dot(df: &DfDiagram, focus: Option<&TupleObject>) -> String {
    let poset = ObjectPoset::from_objects(&df.context, df.support.clone());
    let lowered: BTreeSet<&TupleObject> = match focus {
        Some(n) => df
            .context
            .latching_category(n)
            .objects
            .iter()
            .filter_map(|m| df.support.iter().find(|s| *s == m))
            .collect(),
        None => BTreeSet::new(),
    };
    let mut out = String::from("digraph support {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, obj) in df.support.iter().enumerate() {
        let label = format!("{}\\n|D| = {}", df.context.display(obj), df.values[i].len());
        let mut attrs = vec![format!("label=\"{}\"", label.replace('"', "\\\""))];
        if lowered.contains(obj) {
            attrs.push("style=filled, fillcolor=lightblue".into());
        }
        if focus == Some(obj) {
            attrs.push("penwidth=2".into());
        }
        writeln!(out, "  n{i} [{}];", attrs.join(", ")).expect("string");
    }
    let mut seen = BTreeSet::new();
    for &(a, b, g) in &poset.arrows {
        if !seen.insert((a, b)) {
            continue;
        }
        let style = match g.kind {
            GeneratorKind::Include => " [color=blue]",
            GeneratorKind::Compose => "",
        };
        writeln!(out, "  n{a} -> n{b}{style};").expect("string");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{DiscreteFlow, GlobAttachment, PathInfo};

    #[test]
    fn hasse_has_one_edge_per_cover() {
        let ctx = PosetContext::new(["a"], "a", "a").unwrap();
        let poset = ctx.enumerate_up_to(2);
        let dot = hasse_dot(&ctx, &poset);
        assert_eq!(dot.matches(" -> ").count(), poset.covers().len());
        assert_eq!(dot.matches("[label=").count(), 3);
        assert!(dot.starts_with("digraph hasse {"));
    }

    #[test]
    fn support_highlights_latching_category() {
        let base = DiscreteFlow::new(
            vec!["0".into(), "1".into()],
            vec![PathInfo { id: "p".into(), src: 0, tgt: 1 }],
            vec![],
        )
        .unwrap();
        let att = GlobAttachment { g0: 0, g1: 1, boundary: vec!["b".into()], cells: vec!["z".into()], attach: vec![0], incl: vec![0] };
        let df = DfDiagram::build(&base, &att).unwrap();
        let n = df.context.parse_object("(0 1 1)").unwrap();
        let dot = support_dot(&df, Some(&n));
        assert_eq!(dot.matches("fillcolor=lightblue").count(), 1);
        assert!(dot.contains("[color=blue]"));
    }
}

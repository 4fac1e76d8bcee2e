use proptest::prelude::*;

use flowspace::corpus::{item_rng, random_diagram, random_instance, random_reparam, random_triple, InstanceLimits};
use flowspace::diagram::sum_diagrams;
use flowspace::flow_io::{attachment_to_json, flow_to_json, parse_attachment, parse_flow};
use flowspace::moore::{compose_reparam, invert_reparam, moore_compose, PLReparam};
use flowspace::oracle::{colimit_matches_components, element_components};
use flowspace::reedy::{PosetContext, TupleObject};

/// Contexts on two or three states, with `u = v` or not.
fn context() -> impl Strategy<Value = PosetContext> {
    (2usize..=3, 0usize..3, 0usize..3)
        .prop_map(|(k, u, v)| PosetContext::with_indices(k, u % k, v % k).expect("in range"))
}

fn object_in(ctx: &PosetContext) -> impl Strategy<Value = TupleObject> {
    let (k, u, v) = (ctx.state_count(), ctx.u(), ctx.v());
    (1usize..=5)
        .prop_flat_map(move |n| (prop::collection::vec(0..k, n + 1), prop::collection::vec(any::<bool>(), n)))
        .prop_map(move |(states, raw)| {
            let flags = raw
                .iter()
                .enumerate()
                .map(|(i, &f)| f && states[i] == u && states[i + 1] == v)
                .collect();
            TupleObject::from_parts(states, flags).expect("well formed")
        })
}

fn context_and_objects(count: usize) -> impl Strategy<Value = (PosetContext, Vec<TupleObject>)> {
    context().prop_flat_map(move |ctx| {
        let objs = prop::collection::vec(object_in(&ctx), count);
        (Just(ctx), objs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn leq_is_a_partial_order((ctx, objs) in context_and_objects(3)) {
        let (a, b, c) = (&objs[0], &objs[1], &objs[2]);
        prop_assert!(ctx.leq(a, a).unwrap());
        if ctx.leq(a, b).unwrap() && ctx.leq(b, a).unwrap() {
            prop_assert_eq!(a, b);
        }
        if ctx.leq(a, b).unwrap() && ctx.leq(b, c).unwrap() {
            prop_assert!(ctx.leq(a, c).unwrap());
        }
    }

    #[test]
    fn arrows_factor_through_their_middle((ctx, objs) in context_and_objects(2)) {
        let (m, n) = (&objs[0], &objs[1]);
        match ctx.factorize(m, n) {
            Ok(f) => {
                prop_assert!(ctx.leq(m, n).unwrap());
                prop_assert!(ctx.leq(m, &f.middle).unwrap() && ctx.leq(&f.middle, n).unwrap());
                prop_assert_eq!(f.middle.len(), n.len());
                prop_assert_eq!(f.minus_word.len(), m.len() - n.len());
                prop_assert_eq!(f.plus_word.len(), n.height() - f.middle.height());
            }
            Err(_) => prop_assert!(!ctx.leq(m, n).unwrap()),
        }
    }

    #[test]
    fn simplify_is_an_idempotent_lowering((ctx, objs) in context_and_objects(1)) {
        let n = &objs[0];
        let s = ctx.simplify(n);
        prop_assert_eq!(&ctx.simplify(&s), &s);
        prop_assert!(!s.is_simplifiable());
        prop_assert!(ctx.leq(n, &s).unwrap());
        prop_assert!(ctx.leq(&ctx.latch_base(n), n).unwrap());
        prop_assert_eq!(s.height(), n.height());
    }

    #[test]
    fn moore_composition_is_associative(seed in any::<u64>()) {
        let (a, b, c) = random_triple(&mut item_rng(seed, 90, 0), false);
        let left = moore_compose(&moore_compose(&a, &b).unwrap(), &c).unwrap();
        let right = moore_compose(&a, &moore_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.duration(), &(a.duration() + b.duration() + c.duration()));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn reparametrizations_form_a_group(seed in any::<u64>()) {
        let mut rng = item_rng(seed, 91, 0);
        let (f, g, h) = (random_reparam(&mut rng), random_reparam(&mut rng), random_reparam(&mut rng));
        let id = PLReparam::identity();
        prop_assert_eq!(compose_reparam(&compose_reparam(&f, &g), &h), compose_reparam(&f, &compose_reparam(&g, &h)));
        prop_assert_eq!(compose_reparam(&f, &invert_reparam(&f)), id.clone());
        prop_assert_eq!(compose_reparam(&id, &f), f);
    }

    #[test]
    fn colimits_count_components(seed in any::<u64>()) {
        let mut rng = item_rng(seed, 92, 0);
        let d = random_diagram(&mut rng, 6, 5);
        prop_assert_eq!(colimit_matches_components(&d), None);
        let e = random_diagram(&mut rng, 4, 3);
        let sum = sum_diagrams(&[d.clone(), e.clone()]);
        prop_assert_eq!(
            sum.colimit().apex_size(),
            d.colimit().apex_size() + e.colimit().apex_size()
        );
        let components = element_components(&d);
        prop_assert_eq!(components.iter().map(Vec::len).sum::<usize>(), d.total_size());
    }

    #[test]
    fn flow_files_round_trip(seed in any::<u64>(), k in 0u64..1000) {
        let (base, att) = random_instance(seed, k, InstanceLimits::default());
        let flow = parse_flow(&flow_to_json(&base).to_string()).unwrap();
        prop_assert_eq!(&flow, &base);
        let back = parse_attachment(&attachment_to_json(&att, &base).to_string(), &flow).unwrap();
        prop_assert_eq!(back, att);
    }
}

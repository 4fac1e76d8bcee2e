//! Dropping empty-valued objects from the index of `D^f` leaves the colimit
//! unchanged, checked against degree-capped unrestricted indices.

use flowspace::corpus::{random_instance, InstanceLimits};
use flowspace::pathspace::DfDiagram;

#[test]
fn support_colimit_matches_unrestricted_index() {
    let mut checked = 0;
    for k in 0..120 {
        let (base, att) = random_instance(19, k, InstanceLimits::default());
        if base.state_count() > 4 {
            continue;
        }
        let df = DfDiagram::build(&base, &att).unwrap();
        let top = df.support.iter().map(|o| o.degree()).max().unwrap_or(1);
        if top + 1 > 5 {
            continue;
        }
        assert!(df.unrestricted_colimit_agrees(top + 1).unwrap(), "instance {k}");
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} instances were small enough");
}

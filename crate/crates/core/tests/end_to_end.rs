//! Public-API walkthrough: parse a document, build both system flavors and
//! chain the invariant computations together.

use std::collections::BTreeSet;

use gtails_core::sysspec::{SpecFormat, SystemSpec};
use gtails_core::tails::TailTag;
use gtails_core::VertexId;

const DOC: &str = r#"{
  "rank": 1,
  "vertices": ["v0", "v1", "v2"],
  "edges": [
    {"name": "e1", "range": "v0", "source": "v0"},
    {"name": "e2", "range": "v0", "source": "v0"},
    {"name": "a1", "range": "v0", "source": "v1"},
    {"name": "a2", "range": "v0", "source": "v2"},
    {"name": "l1", "range": "v1", "source": "v1"},
    {"name": "l2", "range": "v2", "source": "v2"}
  ],
  "group": {"generators": [{
    "name": "s",
    "vertexPerm": {"v1": "v2", "v2": "v1"},
    "edgePerm": {"e1": "e2", "e2": "e1", "a1": "a2", "a2": "a1", "l1": "l2", "l2": "l1"},
    "restrictions": {"e1": "s", "e2": "s", "a1": "s", "a2": "s", "l1": "s", "l2": "s"}
  }]}
}"#;

#[test]
fn rank1_pipeline() {
    let spec = SystemSpec::parse(DOC, SpecFormat::Json).unwrap();
    let sys = spec.build_rank1().unwrap();
    assert!(sys.is_pseudo_free());

    let tails = sys.enumerate_maximal_g_tails();
    assert_eq!(tails.len(), 2);
    let period = match &tails[1].tag {
        TailTag::Circuit { period, .. } => *period,
        other => panic!("expected a circuit tail, got {other:?}"),
    };
    assert_eq!(period, 1);

    assert!(sys.essential_central_isotropy().unwrap().is_empty());
    let spectrum = sys.prim_spectrum().unwrap();
    assert_eq!(spectrum.components.len(), 2);
    assert!(!sys.is_minimal());
    assert!(!sys.is_simple().unwrap().simple);
}

#[test]
fn kgraph_pipeline_on_rank1_subgraph() {
    // The same document without ω-edges runs through the k-graph machinery;
    // the periodicity of each tail matches the rank-one period.
    let spec = SystemSpec::parse(DOC, SpecFormat::Json).unwrap();
    let rsys = spec.build_rank1().unwrap();
    let ksys = spec.build_kgraph().unwrap();
    for tail in ksys.maximal_g_tails() {
        let (per, _) = ksys.periodicity_group(&tail, 3);
        let rtail: BTreeSet<VertexId> = tail.iter().copied().collect();
        match rsys.g_period(&rtail) {
            Some(n) => assert_eq!(per.basis(), &[vec![n as i64]]),
            None => assert!(per.is_trivial()),
        }
        let mperg = ksys.m_perg(&tail, 3);
        assert!(!mperg.is_empty());
    }
    let ks = ksys.spectrum_components(3).unwrap();
    assert_eq!(ks.components.len(), 2);
}

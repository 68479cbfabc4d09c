use flowlab::{FlowProblem, PiecewisePotential};
use proptest::prelude::*;

proptest! {
    #[test]
    fn json_round_trip_is_lossless(
        n in 1usize..10,
        sigma in prop_oneof![Just(0.0), 0.0f64..1e9],
        cut in 0.01f64..0.99,
        v in (-50.0f64..50.0, -50.0f64..50.0),
    ) {
        let potential = PiecewisePotential::new(vec![cut], vec![v.0, v.1]).unwrap();
        let mut nodes: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        nodes.push(cut);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let p = FlowProblem::with_potential(potential, nodes, sigma).unwrap();
        let back = FlowProblem::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn canonical_round_trip(n in 2usize..=12, sigma in 0.0f64..1e7) {
        let p = FlowProblem::canonical(n, sigma).unwrap();
        let back = FlowProblem::from_json(&p.to_json()).unwrap();
        prop_assert!(back.is_canonical());
        prop_assert_eq!(back, p);
    }
}

#[test]
fn node_count_must_match() {
    let json = r#"{"n":3,"nodes":[0.0,0.5,1.0],"sigma":1.0,"potential":{"breakpoints":[],"values":[0.0]}}"#;
    assert!(FlowProblem::from_json(json).is_err());
}

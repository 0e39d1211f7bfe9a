use empkit_core::emp::{cardinality_bounds, check_necessary};
use empkit_core::networks::{all_lower_patterns, figure_one, path};
use empkit_core::synthesis::{build_trace, explicit_emp, initial_emp, synthesize, Strategy};
use empkit_core::verify::{enumerate_minimal, jacobian_oracle, OracleOptions, DEFAULT_NODE_LIMIT};
use empkit_core::Dag;

fn connected(dag: &Dag) -> bool {
    let n = dag.n();
    let mut seen = vec![false; n + 1];
    let mut stack = vec![1];
    seen[1] = true;
    while let Some(v) = stack.pop() {
        for &w in dag.in_neighbors(v).iter().chain(dag.out_neighbors(v)) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen[1..].iter().all(|&s| s)
}

#[test]
fn synthesized_patterns_pass_necessity_and_replay() {
    let opts = OracleOptions::default();
    for n in 1..=5 {
        for dag in all_lower_patterns(n) {
            let bounds = cardinality_bounds(&dag);
            for strategy in Strategy::ALL {
                let s = synthesize(&dag, strategy, &opts).unwrap();
                assert!(check_necessary(&dag, &s.emp).unwrap().passed());
                assert!(initial_emp(&dag).is_subpattern_of(&s.emp));
                assert!((bounds.lower..=bounds.upper).contains(&s.emp.cardinality()));
                assert_eq!(s.trace.replay(&dag), s.state);
                assert_eq!(s.trace.final_emp(), s.emp);
            }
        }
    }
}

#[test]
fn explicit_pattern_contains_forced_nodes_and_is_valid() {
    let opts = OracleOptions::default();
    for n in 1..=5 {
        for dag in all_lower_patterns(n) {
            let e = explicit_emp(&dag);
            let c = dag.classify();
            assert!(c.sources.union(&c.dources).all(|v| e.excited.contains(v)));
            assert!(c.sinks.union(&c.dinks).all(|v| e.measured.contains(v)));
            assert!(jacobian_oracle(&dag, &e, &opts).unwrap().valid);
        }
    }
}

#[test]
fn trace_is_deterministic_per_seed() {
    let dag = figure_one();
    for strategy in Strategy::ALL {
        let (a, sa) = build_trace(&dag, strategy, 9).unwrap();
        let (b, sb) = build_trace(&dag, strategy, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        // the final pattern does not hinge on the instantiation
        let (c, _) = build_trace(&dag, strategy, 10).unwrap();
        assert_eq!(a.final_emp(), c.final_emp());
    }
}

#[test]
fn trees_reach_the_lower_bound() {
    let opts = OracleOptions::default();
    let mut trees = 0;
    for n in 2..=6 {
        for dag in all_lower_patterns(n).filter(|d| d.edge_count() + 1 == n && connected(d)) {
            let m = enumerate_minimal(&dag, DEFAULT_NODE_LIMIT, &opts).unwrap();
            assert_eq!(m.cardinality, n, "{:?}", dag.g_entries().collect::<Vec<_>>());
            trees += 1;
        }
    }
    assert!(trees > 1000);
    let m = enumerate_minimal(&path(3), DEFAULT_NODE_LIMIT, &opts).unwrap();
    let texts: Vec<String> = m.emps.iter().map(|e| e.to_text(3)).collect();
    assert_eq!(texts, ["E1,M23", "E12,M3"]);
}

use kgbench::eval::{Scorer, Side};
use kgbench::fixtures::random_kg;
use kgbench::kg::{EntityId, KnowledgeGraph, RelationId, Split, Triple};
use kgbench::symbolic::{
    connected_relations, filter_degenerate, mine_theories, read_rules, theory_analytics,
    write_rules, Aggregation, Atom, CompiledRule, HornRule, MiningConfig, RuleScorer, RuleTheory,
    Step, Term, TrainView, Verdict,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

type Pairs = BTreeSet<(u32, u32)>;

/// Pairs (x, y) connected by the walk `steps` over train triples.
fn compose(kg: &KnowledgeGraph, steps: &[Step]) -> Pairs {
    let edges = |s: Step| -> Pairs {
        kg.triples(Split::Train)
            .iter()
            .filter(|t| t.relation == s.relation)
            .map(|t| {
                if s.inverted {
                    (t.tail.0, t.head.0)
                } else {
                    (t.head.0, t.tail.0)
                }
            })
            .collect()
    };
    let mut cur = edges(steps[0]);
    for &s in &steps[1..] {
        let e = edges(s);
        cur = cur
            .iter()
            .flat_map(|&(x, z)| e.iter().filter(move |p| p.0 == z).map(move |p| (x, p.1)))
            .collect();
    }
    cur
}

fn target_pairs(kg: &KnowledgeGraph, r: RelationId) -> Pairs {
    kg.triples(Split::Train)
        .iter()
        .filter(|t| t.relation == r)
        .map(|t| (t.head.0, t.tail.0))
        .collect()
}

fn all_steps(kg: &KnowledgeGraph) -> Vec<Step> {
    kg.relations()
        .ids()
        .flat_map(|relation| [false, true].map(|inverted| Step { relation, inverted }))
        .collect()
}

fn small_config(parallel: bool) -> MiningConfig {
    MiningConfig {
        max_body_len: 2,
        parallel,
        ..MiningConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mined_counts_match_composition(seed in 0u64..10_000) {
        let kg = random_kg(10, 3, 30, seed);
        let targets: Vec<RelationId> = kg.relations().ids().collect();
        let theories = mine_theories(&kg, &targets, &small_config(true)).unwrap();
        prop_assert_eq!(&theories, &mine_theories(&kg, &targets, &small_config(false)).unwrap());
        let steps = all_steps(&kg);
        for th in &theories {
            let truth = target_pairs(&kg, th.target);
            let mut expect = 0;
            for a in &steps {
                for len in 1..=2 {
                    let patterns: Vec<Vec<Step>> = if len == 1 { vec![vec![*a]] } else { steps.iter().map(|b| vec![*a, *b]).collect() };
                    for p in patterns {
                        if p == [Step { relation: th.target, inverted: false }] {
                            continue;
                        }
                        let pairs = compose(&kg, &p);
                        let correct = pairs.intersection(&truth).count() as u64;
                        let found = th.rules.iter().find(|r| r.as_chain().as_deref() == Some(p.as_slice()));
                        if correct == 0 {
                            prop_assert!(found.is_none());
                            continue;
                        }
                        expect += 1;
                        let r = found.expect("pattern with a correct prediction is mined");
                        prop_assert_eq!((r.correct, r.total), (correct, pairs.len() as u64));
                    }
                }
            }
            prop_assert_eq!(th.rules.len(), expect);
            for w in th.rules.windows(2) {
                prop_assert!(w[0].confidence() >= w[1].confidence());
            }
        }
    }

    #[test]
    fn rule_files_round_trip(seed in 0u64..10_000) {
        let kg = random_kg(12, 3, 40, seed);
        let targets: Vec<RelationId> = kg.relations().ids().collect();
        let theories: Vec<RuleTheory> = mine_theories(&kg, &targets, &small_config(true))
            .unwrap()
            .into_iter()
            .filter(|t| !t.is_empty())
            .collect();
        let mut buf = Vec::new();
        write_rules(&mut buf, &kg, &theories).unwrap();
        let back = read_rules(buf.as_slice(), &kg).unwrap();
        prop_assert_eq!(back, theories);
    }

    #[test]
    fn scorer_matches_firing_oracle(seed in 0u64..10_000, noisy in any::<bool>()) {
        let kg = random_kg(10, 2, 30, seed);
        let targets: Vec<RelationId> = kg.relations().ids().collect();
        let theories = mine_theories(&kg, &targets, &small_config(true)).unwrap();
        let agg = if noisy { Aggregation::NoisyOr } else { Aggregation::Max };
        let scorer = RuleScorer::new(&kg, &theories, agg).unwrap();
        let view = TrainView::new(&kg);
        for th in &theories {
            let fired: Vec<(f64, Pairs)> = th.rules.iter().map(|r| (r.confidence(), compose(&kg, &r.as_chain().unwrap()))).collect();
            for r in &th.rules {
                let c = CompiledRule::new(r).unwrap();
                let pairs = compose(&kg, &r.as_chain().unwrap());
                let all: Pairs = view.all_predictions(&c).into_iter().map(|(x, y)| (x.0, y.0)).collect();
                prop_assert_eq!(&all, &pairs);
            }
            for h in 0..kg.num_entities() as u32 {
                let q = Triple::new(EntityId(h), th.target, EntityId(0));
                let side = scorer.score_side(q, Side::Tail, kg.num_entities());
                for t in 0..kg.num_entities() as u32 {
                    let mut want = 0.0f64;
                    for (conf, pairs) in &fired {
                        if pairs.contains(&(h, t)) {
                            want = if noisy { 1.0 - (1.0 - want) * (1.0 - conf) } else { want.max(*conf) };
                        }
                    }
                    let got = scorer.score(EntityId(h), th.target, EntityId(t));
                    prop_assert!((got - want).abs() < 1e-12, "score {} vs {}", got, want);
                    prop_assert!((side[t as usize] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn filter_accepts_exactly_linked_heads(body in prop::collection::vec((0u8..4, 0u8..4), 1..4)) {
        let var = |i: u8| Term::Var(["X", "Y", "Z", "W"][i as usize].to_owned());
        let rule = HornRule {
            head: Atom::new(RelationId(0), var(0), var(1)),
            body: body.iter().map(|&(a, b)| Atom::new(RelationId(1), var(a), var(b))).collect(),
            correct: 1,
            total: 1,
        };
        // reachability over variables sharing an atom
        let mut seen = BTreeSet::from([0u8]);
        loop {
            let before = seen.len();
            for &(a, b) in &body {
                if seen.contains(&a) || seen.contains(&b) {
                    seen.insert(a);
                    seen.insert(b);
                }
            }
            if seen.len() == before {
                break;
            }
        }
        let uses_x = body.iter().any(|&(a, b)| a == 0 || b == 0);
        let keep = uses_x && seen.contains(&1);
        prop_assert_eq!(filter_degenerate(&rule) == Verdict::Keep, keep);
    }
}

#[test]
fn analytics_of_equivalence_fixture() {
    let kg = kgbench::fixtures::equivalence_kg();
    let r2 = kg.relation("r2").unwrap();
    let theories = mine_theories(&kg, &[r2], &MiningConfig::default()).unwrap();
    let a = theory_analytics(&kg, &theories).unwrap();
    assert_eq!(a.theories.len(), 1);
    assert_eq!(a.theories[0].rules, theories[0].rules.len());
    let direct = a
        .rules
        .iter()
        .find(|p| p.rule == "r2(X,Y) :- r1(X,Y).")
        .unwrap();
    assert_eq!(direct.coverage, 800);
    assert_eq!(direct.train_precision, 1.0);
    assert_eq!(direct.ground_truth_precision, 1.0);
    assert_eq!(
        a.coverage_bins.iter().map(|b| b.count).sum::<usize>(),
        a.rules.len()
    );
    let conn = connected_relations(&kg);
    assert_eq!(conn.iter().map(|c| c.connected).collect::<Vec<_>>(), [1, 1]);
}

#[test]
fn unknown_relations_in_rule_files() {
    let kg = random_kg(5, 1, 8, 0);
    assert!(read_rules("1\t1\tr0(X,Y) :- nope(X,Y).\n".as_bytes(), &kg).is_err());
    assert!(read_rules("1.5\t1\tr0(X,Y) :- r0(Y,X).\n".as_bytes(), &kg).is_err());
    assert!(read_rules("0.5\t3\tr0(X,Y) :- r0(Y,X).\n".as_bytes(), &kg).is_err());
    let ok = read_rules("0.5\t4\tr0(X,Y) :- inv_r0(X,Y).\n".as_bytes(), &kg).unwrap();
    assert!(ok[0].rules[0].body[0].inverted);
}

use super::*;
use crate::bit::{Bit, Symbol};
use crate::protocols::*;

fn s(x: &str) -> Symbol {
    x.parse().unwrap()
}

fn cfg() -> Config {
    Config::default()
}

#[test]
fn world_counts_match_enumeration() {
    let c = cfg();
    assert_eq!(enumerate_worlds(&lemma4_ot_from_pr(), &c).unwrap().len(), 16);
    assert_eq!(enumerate_worlds(&lemma8_ok_from_ko(), &c).unwrap().len(), 8);
    assert_eq!(enumerate_worlds(&lemma6_ot_from_ok(), &c).unwrap().len(), 64);
}

#[test]
fn world_masses_are_uniform_per_input_pair() {
    let j = enumerate_worlds(&lemma5_pr_from_ok(), &cfg()).unwrap();
    assert_eq!(j.world_mass().to_string(), "1/8");
    for (u, v) in j.input_pairs() {
        assert_eq!(j.row(u, v).len(), 8);
        assert!(j.output_dist(u, v).is_ok());
    }
}

#[test]
fn world_bound_is_enforced() {
    let c = Config {
        max_tape_bits: 1,
        ..cfg()
    };
    let err = enumerate_worlds(&lemma3_ok_from_ot(), &c).unwrap_err();
    match err {
        Error::BoundExceeded { required, .. } => assert_eq!(required, "2^3"),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn catalog_verifies() {
    for spec in catalog() {
        let r = verify(&spec, &cfg()).unwrap();
        assert!(r.pass, "{}: {:?}", spec.name, r.failures());
        for p in Party::both() {
            assert_eq!(r.privacy.get(p).simulatable, Some(true));
        }
    }
}

#[test]
fn comm_costs() {
    let c = cfg();
    let cost = |spec: ProtocolSpec| comm_cost(&spec, &enumerate_worlds(&spec, &c).unwrap()).unwrap();
    assert_eq!(cost(lemma4_ot_from_pr()), 1);
    assert_eq!(cost(lemma5_pr_from_ok()), 2);
    assert_eq!(cost(lemma6_ot_from_ok()), 3);
    assert_eq!(cost(lemma8_ok_from_ko()), 0);
}

#[test]
fn comm_mismatch_is_structural() {
    let mut spec = lemma4_ot_from_pr();
    let j = enumerate_worlds(&spec, &cfg()).unwrap();
    spec.declared_comm_bits = 2;
    assert!(matches!(comm_cost(&spec, &j), Err(Error::CommMismatch { observed: 1, .. })));
}

#[test]
fn lemma4_sender_view_ignores_choice() {
    let spec = lemma4_ot_from_pr();
    let j = enumerate_worlds(&spec, &cfg()).unwrap();
    for x in Symbol::all(2) {
        let d0 = j.view_dist(Party::A, x, s("0")).unwrap();
        let d1 = j.view_dist(Party::A, x, s("1")).unwrap();
        assert_eq!(d0, d1);
    }
}

#[test]
fn lemma6_receiver_view_ignores_other_message() {
    let spec = lemma6_ot_from_ok();
    let j = enumerate_worlds(&spec, &cfg()).unwrap();
    for c in Bit::both() {
        for xc in Bit::both() {
            let with = |other: Bit| {
                let x = if c == Bit::ZERO { Symbol::pair(xc, other) } else { Symbol::pair(other, xc) };
                j.view_dist(Party::B, x, Symbol::bit(c)).unwrap()
            };
            assert_eq!(with(Bit::ZERO), with(Bit::ONE));
        }
    }
}

#[test]
fn correctness_mutations_fail_with_replayable_counterexample() {
    for name in ["ot-from-pr~m-uses-x1", "pr-from-ok~a-drops-mb-term"] {
        let spec = by_name(name).unwrap();
        let j = enumerate_worlds(&spec, &cfg()).unwrap();
        let r = check_correctness(&spec, &j).unwrap();
        assert!(!r.pass, "{name}");
        let w = r.counterexample.unwrap();
        let run = run_protocol(&spec, &w).unwrap();
        let row = spec.target.row(w.input_a, w.input_b).unwrap();
        let honest = run_protocol(&by_name(name.split('~').next().unwrap()).unwrap(), &w).unwrap();
        // either impossible under the target or differing from the honest run
        assert!(row.mass(&(run.output_a, run.output_b)).is_zero() || honest.output_b != run.output_b || honest.output_a != run.output_a);
    }
}

#[test]
fn clear_mb_breaks_privacy_of_a() {
    let spec = by_name("pr-from-ok~mb-in-clear").unwrap();
    let r = verify(&spec, &cfg()).unwrap();
    assert!(!r.privacy.a.pass);
    let w = r.privacy.a.witness.unwrap();
    assert_ne!(w.first.input, w.second.input);
    // the witness world replays to the reported view
    let run = run_protocol(&spec, &w.world).unwrap();
    assert_eq!(run.view_a, w.view);
}

#[test]
fn every_mutation_flips_a_verdict() {
    for m in mutations() {
        let r = verify(&m.spec, &cfg()).unwrap();
        assert!(!r.pass, "{} passed every check", m.spec.name);
        let has_example = r.correctness.counterexample.is_some()
            || Party::both().iter().any(|p| r.privacy.get(*p).witness.is_some() || r.malicious.get(*p).witness.is_some());
        assert!(has_example, "{}", m.spec.name);
    }
}

#[test]
fn literal_role_reading_of_lemma8_is_incorrect() {
    let spec = lemma8_literal_roles();
    let r = verify(&spec, &cfg()).unwrap();
    assert!(!r.correctness.pass);
}

#[test]
fn deviation_space_sizes() {
    let c = cfg();
    assert_eq!(enumerate_deviations(&lemma4_ot_from_pr(), Party::B, &c).unwrap().size, 4);
    assert_eq!(enumerate_deviations(&lemma7_ot_from_to(), Party::B, &c).unwrap().size, 256);
    for p in Party::both() {
        let d = enumerate_deviations(&lemma8_ok_from_ko(), p, &c).unwrap();
        assert_eq!(d.size, 1);
        assert!(d.decisions.is_empty());
    }
}

#[test]
fn deviation_bound_is_enforced() {
    let c = Config {
        max_strategies: 255,
        ..cfg()
    };
    match enumerate_deviations(&lemma7_ot_from_to(), Party::B, &c).unwrap_err() {
        Error::BoundExceeded { required, .. } => assert_eq!(required, "256"),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn strategies_decode_uniquely() {
    let spec = lemma7_ot_from_to();
    let d = enumerate_deviations(&spec, Party::B, &cfg()).unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for id in 0..d.size {
        assert!(seen.insert(d.strategy(id).tables));
    }
}

#[test]
fn honest_strategy_is_in_the_space() {
    // B's honest TO input (r, r xor c) as a table over (c, r)
    let spec = lemma7_ot_from_to();
    let d = enumerate_deviations(&spec, Party::B, &cfg()).unwrap();
    let honest = vec![s("00"), s("11"), s("01"), s("10")];
    let found = (0..d.size).map(|i| d.strategy(i)).find(|st| st.tables[0] == honest).unwrap();
    let replaced = d.apply(&spec, &found);
    for w in spec.worlds() {
        assert_eq!(run_protocol(&spec, &w).unwrap(), run_protocol(&replaced, &w).unwrap());
    }
}

#[test]
fn receiver_deviations_keep_one_bit_hidden() {
    for spec in [lemma6_ot_from_ok(), lemma7_ot_from_to(), lemma4_ot_from_pr()] {
        let r = check_malicious(&spec, Party::B, &cfg()).unwrap();
        assert_eq!(r.property, SecrecyProperty::OneMessageHidden);
        assert!(r.pass, "{}", spec.name);
    }
}

#[test]
fn clear_choice_is_caught_as_sender_leak() {
    let spec = by_name("ot-from-ok~m-in-clear").unwrap();
    let r = check_malicious(&spec, Party::A, &cfg()).unwrap();
    assert!(!r.pass);
    let w = r.witness.unwrap();
    let space = enumerate_deviations(&spec, Party::A, &cfg()).unwrap();
    let run = run_protocol(&space.apply(&spec, &w.strategy), &w.world).unwrap();
    assert_eq!(run.view_a.observation(), w.observation);
}

#[test]
fn cheating_receiver_is_caught() {
    // B asks for both pads by sending m that depends on nothing, and the
    // sender pads both messages with the same key bit
    let mut spec = lemma6_ot_from_ok();
    spec.name = "ot-from-ok/same-pad".into();
    spec.program_a.messages[1] = rule(|v| v.input_bit(1) ^ v.res_bit(v.received(0).as_usize()));
    let r = check_malicious(&spec, Party::B, &cfg()).unwrap();
    assert!(!r.pass);
}

#[test]
fn privacy_is_invariant_under_output_relabeling() {
    let flip = |x: Symbol| x.with_flipped(0);
    for name in ["ot-from-pr", "pr-from-ok", "pr-from-ok~mb-in-clear", "ot-from-to~constant-r"] {
        let spec = by_name(name).unwrap();
        let mut relabeled = spec.clone();
        relabeled.target = spec
            .target
            .relabel_outputs(spec.target.name(), |a| if a.is_null() { a } else { flip(a) }, flip)
            .unwrap();
        let (oa, ob) = (spec.program_a.output.clone(), spec.program_b.output.clone());
        relabeled.program_a.output = rule(move |v| {
            let a = oa(v);
            if a.is_null() {
                a
            } else {
                a.with_flipped(0)
            }
        });
        relabeled.program_b.output = rule(move |v| ob(v).with_flipped(0));
        let j0 = enumerate_worlds(&spec, &cfg()).unwrap();
        let j1 = enumerate_worlds(&relabeled, &cfg()).unwrap();
        assert_eq!(
            check_correctness(&spec, &j0).unwrap().pass,
            check_correctness(&relabeled, &j1).unwrap().pass
        );
        for p in Party::both() {
            assert_eq!(
                check_privacy(&spec, &j0, p).pass,
                check_privacy(&relabeled, &j1, p).pass,
                "{name} {p}"
            );
        }
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    for spec in catalog().into_iter().chain(mutations().into_iter().map(|m| m.spec)) {
        let one = serde_json::to_string(&verify(&spec, &cfg().with_workers(1)).unwrap()).unwrap();
        let four = serde_json::to_string(&verify(&spec, &cfg().with_workers(4)).unwrap()).unwrap();
        assert_eq!(one, four, "{}", spec.name);
    }
}

#[test]
fn report_shape() {
    let r = verify(&lemma8_ok_from_ko(), &cfg()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["protocol", "correctness", "privacy", "malicious", "comm_bits", "worlds", "notes"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["comm_bits"], 0);
    assert_eq!(v["worlds"], 8);
    assert!(v["correctness"]["counterexample"].is_null());
    assert!(v["privacy"]["A"]["pass"].as_bool().unwrap());
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

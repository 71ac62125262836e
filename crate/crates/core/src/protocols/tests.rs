use super::*;
use crate::model::Message;
use crate::primitives::Kind;

fn s(x: &str) -> Symbol {
    x.parse().unwrap()
}

fn world(spec: &ProtocolSpec, ia: &str, ib: &str, ta: &str, tb: &str, res: &str) -> World {
    let w = World {
        input_a: s(ia),
        input_b: s(ib),
        tape_a: s(ta),
        tape_b: s(tb),
        resource_tape: s(res),
    };
    check_world(spec, &w).unwrap();
    w
}

/// Resource tape selecting a given OK/KO atom (no resource inputs).
fn key_tape(spec: &ProtocolSpec, x0: u8, x1: u8, c: u8, y: u8) -> String {
    let pair = Symbol::pair(Bit::from_u8(x0), Bit::from_u8(x1));
    let choice = Symbol::pair(Bit::from_u8(c), Bit::from_u8(y));
    let outcome = match spec.resource.kind() {
        Kind::ObliviousKey { pair_holder: Party::A } => (pair, choice),
        Kind::ObliviousKey { pair_holder: Party::B } => (choice, pair),
        k => panic!("not a key resource: {k:?}"),
    };
    spec.resource
        .tape_for(Symbol::NULL, Symbol::NULL, outcome)
        .expect("atom has positive mass")
        .to_string()
}

fn outputs(spec: &ProtocolSpec, w: &World) -> (String, String) {
    let r = run_protocol(spec, w).unwrap();
    (r.output_a.to_string(), r.output_b.to_string())
}

#[test]
fn lemma1_examples() {
    let p = lemma1_pr_from_ot();
    assert_eq!(outputs(&p, &world(&p, "1", "1", "1", "", "")), ("1".into(), "0".into()));
    assert_eq!(outputs(&p, &world(&p, "0", "1", "0", "", "")), ("0".into(), "0".into()));
    assert_eq!(outputs(&p, &world(&p, "1", "0", "0", "", "")), ("0".into(), "0".into()));
}

#[test]
fn lemma2_examples() {
    let p = lemma2_ok_from_pr();
    // x=1, y=1, PR tape a=0 so b=1
    assert_eq!(outputs(&p, &world(&p, "-", "-", "1", "1", "0")), ("01".into(), "11".into()));
    // x=0, y=0, a=1 so b=1
    assert_eq!(outputs(&p, &world(&p, "-", "-", "0", "0", "1")), ("11".into(), "01".into()));
}

#[test]
fn lemma3_examples() {
    let p = lemma3_ok_from_ot();
    assert_eq!(outputs(&p, &world(&p, "-", "-", "10", "1", "")), ("10".into(), "10".into()));
    assert_eq!(outputs(&p, &world(&p, "-", "-", "00", "1", "")).1, "10");
}

#[test]
fn lemma4_examples() {
    let p = lemma4_ot_from_pr();
    let r = run_protocol(&p, &world(&p, "10", "1", "", "", "0")).unwrap();
    assert_eq!(
        r.transcript.0,
        vec![Message {
            direction: Direction::AToB,
            payload: Bit::ONE
        }]
    );
    assert_eq!((r.output_a, r.output_b), (Symbol::NULL, s("0")));
    let r = run_protocol(&p, &world(&p, "11", "0", "", "", "1")).unwrap();
    assert_eq!(r.transcript.0[0].payload, Bit::ZERO);
    assert_eq!(r.output_b, s("1"));
    let r = run_protocol(&p, &world(&p, "00", "1", "", "", "0")).unwrap();
    assert_eq!(r.transcript.0[0].payload, Bit::ZERO);
    assert_eq!(r.output_b, s("0"));
}

#[test]
fn lemma5_examples() {
    let p = lemma5_pr_from_ok();
    let cases = [
        // x, y, atom (X0 X1 C Y), ma, mb, a, b
        ("1", "1", (0, 1, 0, 0), 0, 1, "1", "0"),
        ("0", "1", (1, 1, 1, 1), 0, 0, "1", "1"),
        ("1", "0", (0, 0, 1, 0), 1, 1, "1", "1"),
    ];
    for (x, y, (x0, x1, c, yy), ma, mb, a, b) in cases {
        let t = key_tape(&p, x0, x1, c, yy);
        let r = run_protocol(&p, &world(&p, x, y, "", "", &t)).unwrap();
        let payloads: Vec<u8> = r.transcript.iter().map(|m| m.payload.as_u8()).collect();
        assert_eq!(payloads, [ma, mb]);
        assert_eq!((r.output_a.to_string().as_str(), r.output_b.to_string().as_str()), (a, b));
        let xy = s(x).get(0) & s(y).get(0);
        assert_eq!(r.output_a.get(0) ^ r.output_b.get(0), xy);
    }
}

#[test]
fn lemma6_examples() {
    let p = lemma6_ot_from_ok();
    let cases = [
        ("10", "1", (0, 1, 0, 0), [1, 0, 0], "0"),
        ("01", "0", (1, 0, 1, 0), [1, 0, 0], "0"),
        ("11", "1", (0, 0, 0, 0), [1, 1, 1], "1"),
    ];
    for (xs, c, (x0, x1, cc, y), msgs, z) in cases {
        let t = key_tape(&p, x0, x1, cc, y);
        let r = run_protocol(&p, &world(&p, xs, c, "", "", &t)).unwrap();
        let payloads: Vec<u8> = r.transcript.iter().map(|m| m.payload.as_u8()).collect();
        assert_eq!(payloads, msgs);
        assert_eq!(r.transcript.0[0].direction, Direction::BToA);
        assert_eq!(r.output_b.to_string(), z);
    }
}

#[test]
fn lemma7_examples() {
    let p = lemma7_ot_from_to();
    let cases = [
        ("10", "1", "1", "1", "0", 1, "0"),
        ("11", "0", "0", "0", "0", 1, "1"),
        ("01", "1", "1", "1", "0", 0, "1"),
    ];
    for (xs, c, r, choice, a, m, z) in cases {
        let res = run_protocol(&p, &world(&p, xs, c, "", r, "")).unwrap();
        assert_eq!(res.view_a.resource_in, Some(s(choice)));
        assert_eq!(res.view_a.resource_out, Some(s(a)));
        assert_eq!(res.transcript.0[0].payload.as_u8(), m);
        assert_eq!(res.output_b.to_string(), z);
    }
}

#[test]
fn lemma8_examples() {
    let p = lemma8_ok_from_ko();
    let t = key_tape(&p, 1, 0, 1, 0);
    let r = run_protocol(&p, &world(&p, "-", "-", "", "", &t)).unwrap();
    assert_eq!(r.output_b, s("11"));
    assert_eq!(r.output_a, s("01"));
    // new key satisfies Ybar = Xbar_{Cbar}
    assert_eq!(r.output_b.get(1), r.output_a.get(r.output_b.get(0).as_usize()));
    assert!(r.transcript.is_empty());

    let t = key_tape(&p, 0, 0, 1, 0);
    let r = run_protocol(&p, &world(&p, "-", "-", "", "", &t)).unwrap();
    assert_eq!((r.output_b, r.output_a), (s("00"), s("01")));
}

#[test]
fn transcript_lengths_and_single_copy() {
    let expected = [0, 0, 0, 1, 2, 3, 1, 0];
    for (spec, want) in catalog().iter().zip(expected) {
        assert_eq!(spec.declared_comm_bits, want, "{}", spec.name);
        for w in spec.worlds() {
            let r = run_protocol(spec, &w).unwrap();
            assert_eq!(r.transcript.len(), want, "{} {w}", spec.name);
            assert_eq!(r.resource_calls, 1);
        }
    }
}

#[test]
fn correct_output_identities() {
    for spec in catalog() {
        for w in spec.worlds() {
            let r = run_protocol(&spec, &w).unwrap();
            match spec.name.as_str() {
                "pr-from-ot" | "pr-from-ok" => {
                    let xy = w.input_a.get(0) & w.input_b.get(0);
                    assert_eq!(r.output_a.get(0) ^ r.output_b.get(0), xy);
                }
                "ot-from-pr" | "ot-from-ok" | "ot-from-to" => {
                    let c = w.input_b.get(0).as_usize();
                    assert_eq!(r.output_b.get(0), w.input_a.get(c));
                }
                _ => {
                    let (x, cy) = (r.output_a, r.output_b);
                    assert_eq!(cy.get(1), x.get(cy.get(0).as_usize()), "{} {w}", spec.name);
                }
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    for spec in catalog() {
        for w in spec.worlds() {
            assert_eq!(run_protocol(&spec, &w).unwrap(), run_protocol(&spec, &w).unwrap());
        }
    }
}

#[test]
fn world_counts() {
    assert_eq!(lemma4_ot_from_pr().worlds().count(), 16);
    assert_eq!(lemma8_ok_from_ko().worlds().count(), 8);
    assert_eq!(lemma6_ot_from_ok().worlds().count(), 64);
}

#[test]
fn mismatched_world_is_rejected() {
    let p = lemma4_ot_from_pr();
    let w = World {
        input_a: s("10"),
        input_b: s("1"),
        tape_a: s("0"),
        tape_b: Symbol::NULL,
        resource_tape: s("0"),
    };
    assert!(matches!(run_protocol(&p, &w), Err(Error::WorldMismatch { .. })));
    let w = World {
        input_a: s("1"),
        ..w
    };
    assert!(matches!(run_protocol(&p, &w), Err(Error::WorldMismatch { .. })));
}

#[test]
fn spec_validation() {
    let p = lemma4_ot_from_pr();
    let err = ProtocolSpec::new("bad", p.resource.clone(), p.target.clone(), p.program_a.clone(), p.program_b.clone(), vec![Step::Resource], 0)
        .unwrap_err();
    assert!(matches!(err, Error::MalformedProtocol { .. }));
    let err = ProtocolSpec::new(
        "twice",
        p.resource.clone(),
        p.target.clone(),
        p.program_a.clone(),
        p.program_b.clone(),
        vec![Step::Resource, Step::Resource, Step::Message(Direction::AToB)],
        1,
    )
    .unwrap_err();
    assert!(matches!(err, Error::MalformedProtocol { .. }));
}

#[test]
fn catalog_names_resolve() {
    for n in CATALOG_NAMES {
        assert_eq!(by_name(n).unwrap().name, n);
    }
    assert!(matches!(by_name("ot-from-nothing"), Err(Error::UnknownProtocol(_))));
    for m in mutations() {
        assert_eq!(by_name(&m.spec.name).unwrap().name, m.spec.name);
    }
}

#[test]
fn mutation_suite_covers_every_lemma_twice() {
    let muts = mutations();
    for n in CATALOG_NAMES {
        assert!(muts.iter().filter(|m| m.protocol == n).count() >= 2, "{n}");
    }
}

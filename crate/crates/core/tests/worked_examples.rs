//! Hand-computed runs of each catalog protocol.

use nonlocal_ot::protocols::*;
use nonlocal_ot::{Bit, Symbol, World};

fn s(bits: &str) -> Symbol {
    if bits == "-" {
        return Symbol::NULL;
    }
    Symbol::from_bits(&bits.bytes().map(|b| Bit::from_u8(b - b'0')).collect::<Vec<_>>())
}

/// Every world selected by `pick` must produce the expected outputs and
/// message bits.
fn check(spec: &ProtocolSpec, pick: impl Fn(&World, &RunResult) -> bool, out: (&str, &str), msgs: &[u8]) {
    let mut hits = 0;
    for w in spec.worlds() {
        let r = run_protocol(spec, &w).unwrap();
        if !pick(&w, &r) {
            continue;
        }
        hits += 1;
        assert_eq!((r.output_a, r.output_b), (s(out.0), s(out.1)), "{} {w:?}", spec.name);
        let got: Vec<u8> = r.transcript.0.iter().map(|m| m.payload.as_u8()).collect();
        assert_eq!(got, msgs, "{} {w:?}", spec.name);
        assert_eq!(r.resource_calls, 1);
    }
    assert!(hits > 0, "{}: no world matches", spec.name);
}

fn res_a(r: &RunResult) -> Symbol {
    r.view_a.resource_out.unwrap()
}

fn res_b(r: &RunResult) -> Symbol {
    r.view_b.resource_out.unwrap()
}

#[test]
fn pr_from_ot() {
    let spec = lemma1_pr_from_ot();
    for (x, y, a, out) in [("1", "1", "1", ("1", "0")), ("0", "1", "0", ("0", "0")), ("1", "0", "0", ("0", "0"))] {
        check(&spec, |w, _| w.input_a == s(x) && w.input_b == s(y) && w.tape_a == s(a), out, &[]);
    }
}

#[test]
fn ok_from_pr() {
    let spec = lemma2_ok_from_pr();
    let pick = |x: &'static str, y: &'static str, a: &'static str| {
        move |w: &World, r: &RunResult| w.tape_a == s(x) && w.tape_b == s(y) && res_a(r) == s(a)
    };
    check(&spec, pick("1", "1", "0"), ("01", "11"), &[]);
    check(&spec, pick("0", "0", "1"), ("11", "01"), &[]);
}

#[test]
fn ok_from_ot() {
    let spec = lemma3_ok_from_ot();
    check(&spec, |w, _| w.tape_a == s("10") && w.tape_b == s("1"), ("10", "10"), &[]);
    check(&spec, |w, _| w.tape_a == s("00") && w.tape_b == s("1"), ("00", "10"), &[]);
}

#[test]
fn ot_from_pr() {
    let spec = lemma4_ot_from_pr();
    let pick = |x: &'static str, c: &'static str, a: &'static str| {
        move |w: &World, r: &RunResult| w.input_a == s(x) && w.input_b == s(c) && res_a(r) == s(a)
    };
    check(&spec, pick("10", "1", "0"), ("-", "0"), &[1]);
    check(&spec, pick("11", "0", "1"), ("-", "1"), &[0]);
    check(&spec, pick("00", "1", "0"), ("-", "0"), &[0]);
}

#[test]
fn pr_from_ok() {
    let spec = lemma5_pr_from_ok();
    let pick = |x: &'static str, y: &'static str, xa: &'static str, cy: &'static str| {
        move |w: &World, r: &RunResult| {
            w.input_a == s(x) && w.input_b == s(y) && res_a(r) == s(xa) && res_b(r) == s(cy)
        }
    };
    check(&spec, pick("1", "1", "01", "00"), ("1", "0"), &[0, 1]);
    check(&spec, pick("0", "1", "11", "11"), ("1", "1"), &[0, 0]);
    check(&spec, pick("1", "0", "00", "10"), ("1", "1"), &[1, 1]);
}

#[test]
fn ot_from_ok() {
    let spec = lemma6_ot_from_ok();
    let pick = |x: &'static str, c: &'static str, xa: &'static str, cy: &'static str| {
        move |w: &World, r: &RunResult| {
            w.input_a == s(x) && w.input_b == s(c) && res_a(r) == s(xa) && res_b(r) == s(cy)
        }
    };
    check(&spec, pick("10", "1", "01", "00"), ("-", "0"), &[1, 0, 0]);
    check(&spec, pick("01", "0", "10", "10"), ("-", "0"), &[1, 0, 0]);
    check(&spec, pick("11", "1", "00", "00"), ("-", "1"), &[1, 1, 1]);
}

#[test]
fn ot_from_to() {
    let spec = lemma7_ot_from_to();
    let pick = |x: &'static str, c: &'static str, r: &'static str| {
        move |w: &World, _: &RunResult| w.input_a == s(x) && w.input_b == s(c) && w.tape_b == s(r)
    };
    check(&spec, pick("10", "1", "1"), ("-", "0"), &[1]);
    check(&spec, pick("11", "0", "0"), ("-", "1"), &[1]);
    check(&spec, pick("01", "1", "1"), ("-", "1"), &[0]);
}

#[test]
fn ok_from_ko() {
    let spec = lemma8_ok_from_ko();
    // B holds the KO pair (X0, X1), A holds (C, Y)
    check(&spec, |_, r| res_b(r) == s("10") && res_a(r) == s("10"), ("01", "11"), &[]);
    check(&spec, |_, r| res_b(r) == s("00") && res_a(r) == s("10"), ("01", "00"), &[]);
}

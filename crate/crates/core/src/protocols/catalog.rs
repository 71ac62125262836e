//! The eight single-copy reductions between OT, TO, OK, KO and PR.

use crate::bit::{Bit, Symbol};
use crate::error::{Error, Result};
use crate::model::Direction;
use crate::primitives::{ko, ok, ot, pr, to};

use super::{rule, PartyProgram, ProtocolSpec, Step};

pub const CATALOG_NAMES: [&str; 8] = [
    "pr-from-ot",
    "ok-from-pr",
    "ok-from-ot",
    "ot-from-pr",
    "pr-from-ok",
    "ot-from-ok",
    "ot-from-to",
    "ok-from-ko",
];

fn sym(b: Bit) -> Symbol {
    Symbol::bit(b)
}

fn null() -> super::Rule<Symbol> {
    rule(|_| Symbol::NULL)
}

const RES: Step = Step::Resource;
const A2B: Step = Step::Message(Direction::AToB);
const B2A: Step = Step::Message(Direction::BToA);

/// PR from one OT. B chooses `c = y`; A masks with a random bit `a` and
/// offers `(a, x ⊕ a)`. Outputs `a` and `x_c = a ⊕ xy`.
pub fn lemma1_pr_from_ot() -> ProtocolSpec {
    let a = PartyProgram::new(
        1,
        rule(|v| {
            let (x, r) = (v.input_bit(0), v.tape_bit(0));
            Symbol::pair(r, x ^ r)
        }),
        rule(|v| sym(v.tape_bit(0))),
    );
    let b = PartyProgram::new(0, rule(|v| sym(v.input_bit(0))), rule(|v| sym(v.res_bit(0))));
    ProtocolSpec::new("pr-from-ot", ot(), pr(), a, b, vec![RES], 0).expect("well formed")
}

/// OK from one PR: both feed random bits and relabel the outputs.
pub fn lemma2_ok_from_pr() -> ProtocolSpec {
    let a = PartyProgram::new(
        1,
        rule(|v| sym(v.tape_bit(0))),
        rule(|v| {
            let (x, out) = (v.tape_bit(0), v.res_bit(0));
            Symbol::pair(out, out ^ x)
        }),
    );
    let b = PartyProgram::new(
        1,
        rule(|v| sym(v.tape_bit(0))),
        rule(|v| Symbol::pair(v.tape_bit(0), v.res_bit(0))),
    );
    ProtocolSpec::new("ok-from-pr", pr(), ok(), a, b, vec![RES], 0).expect("well formed")
}

/// OK from one OT with random inputs on both sides.
pub fn lemma3_ok_from_ot() -> ProtocolSpec {
    let a = PartyProgram::new(2, rule(|v| v.own_tape), rule(|v| v.own_tape));
    let b = PartyProgram::new(
        1,
        rule(|v| sym(v.tape_bit(0))),
        rule(|v| Symbol::pair(v.tape_bit(0), v.res_bit(0))),
    );
    ProtocolSpec::new("ok-from-ot", ot(), ok(), a, b, vec![RES], 0).expect("well formed")
}

/// OT from one PR plus one bit A→B.
pub fn lemma4_ot_from_pr() -> ProtocolSpec {
    let a = PartyProgram::new(0, rule(|v| sym(v.input_bit(0) ^ v.input_bit(1))), null())
        .send(rule(|v| v.input_bit(0) ^ v.res_bit(0)));
    // B's final output is named z; y is its PR input.
    let b = PartyProgram::new(
        0,
        rule(|v| sym(v.input_bit(0))),
        rule(|v| sym(v.received(0) ^ v.res_bit(0))),
    );
    ProtocolSpec::new("ot-from-pr", pr(), ot(), a, b, vec![RES, A2B], 1).expect("well formed")
}

/// PR from one OK plus one bit each way. Both inputs travel one-time padded
/// with `X0 ⊕ X1` and `C` respectively.
pub fn lemma5_pr_from_ok() -> ProtocolSpec {
    let a = PartyProgram::new(
        0,
        null(),
        rule(|v| {
            let (x0, x1) = (v.res_bit(0), v.res_bit(1));
            let (ma, mb) = (v.messages_out[0], v.received(0));
            sym(x0 ^ ((x0 ^ x1) & mb) ^ (ma & mb))
        }),
    )
    .send(rule(|v| v.input_bit(0) ^ v.res_bit(0) ^ v.res_bit(1)));
    let b = PartyProgram::new(
        0,
        null(),
        rule(|v| {
            let (c, y) = (v.res_bit(0), v.res_bit(1));
            sym(y ^ (c & v.received(0)))
        }),
    )
    .send(rule(|v| v.input_bit(0) ^ v.res_bit(0)));
    ProtocolSpec::new("pr-from-ok", ok(), pr(), a, b, vec![RES, A2B, B2A], 2).expect("well formed")
}

/// OT from one OK: B announces `m = c ⊕ C`, A answers with both messages
/// padded by `X_m` and `X_{1⊕m}`.
pub fn lemma6_ot_from_ok() -> ProtocolSpec {
    let pad = |v: &crate::model::View, flip: Bit| {
        let m = v.received(0) ^ flip;
        v.res_bit(m.as_usize())
    };
    let a = PartyProgram::new(0, null(), null())
        .send(rule(move |v| v.input_bit(0) ^ pad(v, Bit::ZERO)))
        .send(rule(move |v| v.input_bit(1) ^ pad(v, Bit::ONE)));
    let b = PartyProgram::new(
        0,
        null(),
        rule(|v| {
            let c = v.input_bit(0);
            sym(v.received(c.as_usize()) ^ v.res_bit(1))
        }),
    )
    .send(rule(|v| v.input_bit(0) ^ v.res_bit(0)));
    ProtocolSpec::new("ot-from-ok", ok(), ot(), a, b, vec![RES, B2A, A2B, A2B], 3).expect("well formed")
}

/// OT from one TO plus one bit A→B. A chooses `x0 ⊕ x1` on the reversed
/// instance where B offers `(r, r ⊕ c)`.
pub fn lemma7_ot_from_to() -> ProtocolSpec {
    let a = PartyProgram::new(0, rule(|v| sym(v.input_bit(0) ^ v.input_bit(1))), null())
        .send(rule(|v| v.input_bit(0) ^ v.res_bit(0)));
    let b = PartyProgram::new(
        1,
        rule(|v| {
            let (c, r) = (v.input_bit(0), v.tape_bit(0));
            Symbol::pair(r, r ^ c)
        }),
        rule(|v| sym(v.tape_bit(0) ^ v.received(0))),
    );
    ProtocolSpec::new("ot-from-to", to(), ot(), a, b, vec![RES, A2B], 1).expect("well formed")
}

const LEMMA8_NOTE: &str = "roles: KO is the mirror of OK, so B holds (X0, X1) and A holds (C, Y); \
the pair-holder outputs (X0 xor X1, X0) and the choice-holder outputs (Y, Y xor C). \
Reading the protocol with A as the pair-holder (see ok-from-ko/literal-roles) fails correctness.";

/// OK from one KO without communication.
pub fn lemma8_ok_from_ko() -> ProtocolSpec {
    // choice-holder: resource output (C, Y)
    let a = PartyProgram::new(
        0,
        null(),
        rule(|v| {
            let (c, y) = (v.res_bit(0), v.res_bit(1));
            Symbol::pair(y, y ^ c)
        }),
    );
    // pair-holder: resource output (X0, X1)
    let b = PartyProgram::new(
        0,
        null(),
        rule(|v| {
            let (x0, x1) = (v.res_bit(0), v.res_bit(1));
            Symbol::pair(x0 ^ x1, x0)
        }),
    );
    ProtocolSpec::new("ok-from-ko", ko(), ok(), a, b, vec![RES], 0)
        .expect("well formed")
        .with_note(LEMMA8_NOTE)
}

/// The same formulas with A treated as the pair-holder of the mirrored KO.
/// Kept to document that this role assignment does not yield OK.
pub fn lemma8_literal_roles() -> ProtocolSpec {
    let a = PartyProgram::new(
        0,
        null(),
        rule(|v| {
            let (x0, x1) = (v.res_bit(0), v.res_bit(1));
            Symbol::pair(x0 ^ x1, x0)
        }),
    );
    let b = PartyProgram::new(
        0,
        null(),
        rule(|v| {
            let (c, y) = (v.res_bit(0), v.res_bit(1));
            Symbol::pair(y, y ^ c)
        }),
    );
    ProtocolSpec::new("ok-from-ko/literal-roles", ko(), ok(), a, b, vec![RES], 0).expect("well formed")
}

pub fn catalog() -> Vec<ProtocolSpec> {
    vec![
        lemma1_pr_from_ot(),
        lemma2_ok_from_pr(),
        lemma3_ok_from_ot(),
        lemma4_ot_from_pr(),
        lemma5_pr_from_ok(),
        lemma6_ot_from_ok(),
        lemma7_ot_from_to(),
        lemma8_ok_from_ko(),
    ]
}

pub fn by_name(name: &str) -> Result<ProtocolSpec> {
    match name {
        "pr-from-ot" => Ok(lemma1_pr_from_ot()),
        "ok-from-pr" => Ok(lemma2_ok_from_pr()),
        "ok-from-ot" => Ok(lemma3_ok_from_ot()),
        "ot-from-pr" => Ok(lemma4_ot_from_pr()),
        "pr-from-ok" => Ok(lemma5_pr_from_ok()),
        "ot-from-ok" => Ok(lemma6_ot_from_ok()),
        "ot-from-to" => Ok(lemma7_ot_from_to()),
        "ok-from-ko" => Ok(lemma8_ok_from_ko()),
        "ok-from-ko/literal-roles" => Ok(lemma8_literal_roles()),
        _ => super::mutations()
            .into_iter()
            .find(|m| m.spec.name == name)
            .map(|m| m.spec)
            .ok_or_else(|| Error::UnknownProtocol(name.to_string())),
    }
}

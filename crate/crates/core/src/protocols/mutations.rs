//! Curated single-gate mutations of the catalog protocols. Each one must
//! flip at least one verifier verdict.

use crate::bit::{Bit, Symbol};
use crate::model::Party;

use super::catalog::*;
use super::{rule, ProtocolSpec};

#[derive(Clone, Debug)]
pub struct Mutation {
    pub protocol: &'static str,
    pub id: &'static str,
    pub description: &'static str,
    pub spec: ProtocolSpec,
}

fn mutate(
    protocol: &'static str,
    id: &'static str,
    description: &'static str,
    base: ProtocolSpec,
    edit: impl FnOnce(&mut ProtocolSpec),
) -> Mutation {
    let mut spec = base;
    spec.name = format!("{protocol}~{id}");
    spec.notes.clear();
    edit(&mut spec);
    spec.validate().expect("mutation keeps the schedule well formed");
    Mutation {
        protocol,
        id,
        description,
        spec,
    }
}

fn sym(b: Bit) -> Symbol {
    Symbol::bit(b)
}

pub fn mutations() -> Vec<Mutation> {
    vec![
        mutate("pr-from-ot", "no-input-mask", "A offers (a, a) instead of (a, x xor a)", lemma1_pr_from_ot(), |s| {
            s.program_mut(Party::A).resource_input = rule(|v| Symbol::pair(v.tape_bit(0), v.tape_bit(0)));
        }),
        mutate("pr-from-ot", "constant-choice", "B always chooses c = 0", lemma1_pr_from_ot(), |s| {
            s.program_mut(Party::B).resource_input = rule(|_| sym(Bit::ZERO));
        }),
        mutate("ok-from-pr", "no-x-in-X1", "A outputs X1 = a without xor x", lemma2_ok_from_pr(), |s| {
            s.program_mut(Party::A).output = rule(|v| Symbol::pair(v.res_bit(0), v.res_bit(0)));
        }),
        mutate("ok-from-pr", "constant-y", "B feeds y = 1 but still outputs C = tape", lemma2_ok_from_pr(), |s| {
            s.program_mut(Party::B).resource_input = rule(|_| sym(Bit::ONE));
        }),
        mutate("ok-from-ot", "flipped-C", "B outputs C = 1 xor c", lemma3_ok_from_ot(), |s| {
            s.program_mut(Party::B).output = rule(|v| Symbol::pair(!v.tape_bit(0), v.res_bit(0)));
        }),
        mutate("ok-from-ot", "swapped-X", "A outputs (x1, x0)", lemma3_ok_from_ot(), |s| {
            s.program_mut(Party::A).output = rule(|v| Symbol::pair(v.tape_bit(1), v.tape_bit(0)));
        }),
        mutate("ot-from-pr", "m-uses-x1", "A sends m = x1 xor a", lemma4_ot_from_pr(), |s| {
            s.program_mut(Party::A).messages[0] = rule(|v| v.input_bit(1) ^ v.res_bit(0));
        }),
        mutate("ot-from-pr", "pr-input-x0", "A feeds x = x0 into PR", lemma4_ot_from_pr(), |s| {
            s.program_mut(Party::A).resource_input = rule(|v| sym(v.input_bit(0)));
        }),
        mutate("pr-from-ok", "a-drops-mb-term", "A outputs a = X0 xor ma*mb", lemma5_pr_from_ok(), |s| {
            s.program_mut(Party::A).output = rule(|v| sym(v.res_bit(0) ^ (v.messages_out[0] & v.received(0))));
        }),
        mutate("pr-from-ok", "mb-in-clear", "B sends mb = y without the C pad", lemma5_pr_from_ok(), |s| {
            s.program_mut(Party::B).messages[0] = rule(|v| v.input_bit(0));
        }),
        mutate("ot-from-ok", "m-in-clear", "B sends m = c without the C pad", lemma6_ot_from_ok(), |s| {
            s.program_mut(Party::B).messages[0] = rule(|v| v.input_bit(0));
        }),
        mutate("ot-from-ok", "output-without-Y", "B outputs m_c without xor Y", lemma6_ot_from_ok(), |s| {
            s.program_mut(Party::B).output = rule(|v| sym(v.received(v.input_bit(0).as_usize())));
        }),
        mutate("ot-from-to", "constant-r", "B uses r = 0 instead of a random bit", lemma7_ot_from_to(), |s| {
            s.program_mut(Party::B).resource_input = rule(|v| Symbol::pair(Bit::ZERO, v.input_bit(0)));
            s.program_mut(Party::B).output = rule(|v| sym(v.received(0)));
        }),
        mutate("ot-from-to", "output-without-r", "B outputs m without xor r", lemma7_ot_from_to(), |s| {
            s.program_mut(Party::B).output = rule(|v| sym(v.received(0)));
        }),
        mutate("ok-from-ko", "literal-roles", "pair-holder formulas run by the choice-holder", lemma8_ok_from_ko(), |s| {
            let lit = lemma8_literal_roles();
            s.program_a = lit.program_a;
            s.program_b = lit.program_b;
        }),
        mutate("ok-from-ko", "Ybar-from-X1", "pair-holder outputs Ybar = X1", lemma8_ok_from_ko(), |s| {
            s.program_mut(Party::B).output = rule(|v| Symbol::pair(v.res_bit(0) ^ v.res_bit(1), v.res_bit(1)));
        }),
    ]
}

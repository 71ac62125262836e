//! Reduction protocols as deterministic party programs over a single
//! resource call and a fixed public message schedule.

mod catalog;
mod mutations;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use catalog::{
    by_name, catalog, lemma1_pr_from_ot, lemma2_ok_from_pr, lemma3_ok_from_ot, lemma4_ot_from_pr,
    lemma5_pr_from_ok, lemma6_ot_from_ok, lemma7_ot_from_to, lemma8_literal_roles,
    lemma8_ok_from_ko, CATALOG_NAMES,
};
pub use mutations::{mutations, Mutation};

use crate::bit::{Bit, Symbol};
use crate::error::{Error, Result};
use crate::model::{Direction, Party, Transcript, View, World};
use crate::primitives::Primitive;

/// A decision a party takes from its current view.
pub type Rule<T> = Arc<dyn Fn(&View) -> T + Send + Sync>;

pub fn rule<T, F>(f: F) -> Rule<T>
where
    F: Fn(&View) -> T + Send + Sync + 'static,
{
    Arc::new(f)
}

#[derive(Clone)]
pub struct PartyProgram {
    /// Private uniform random bits.
    pub tape_len: u8,
    pub resource_input: Rule<Symbol>,
    /// One rule per message this party sends, in schedule order.
    pub messages: Vec<Rule<Bit>>,
    pub output: Rule<Symbol>,
}

impl PartyProgram {
    pub fn new(tape_len: u8, resource_input: Rule<Symbol>, output: Rule<Symbol>) -> Self {
        PartyProgram {
            tape_len,
            resource_input,
            messages: Vec::new(),
            output,
        }
    }

    pub fn send(mut self, m: Rule<Bit>) -> Self {
        self.messages.push(m);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Resource,
    Message(Direction),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Resource => f.write_str("resource"),
            Step::Message(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone)]
pub struct ProtocolSpec {
    pub name: String,
    pub resource: Primitive,
    pub target: Primitive,
    pub program_a: PartyProgram,
    pub program_b: PartyProgram,
    pub schedule: Vec<Step>,
    pub declared_comm_bits: usize,
    /// Free-form remarks carried into verification reports.
    pub notes: Vec<String>,
}

impl ProtocolSpec {
    pub fn new(
        name: impl Into<String>,
        resource: Primitive,
        target: Primitive,
        program_a: PartyProgram,
        program_b: PartyProgram,
        schedule: Vec<Step>,
        declared_comm_bits: usize,
    ) -> Result<Self> {
        let spec = ProtocolSpec {
            name: name.into(),
            resource,
            target,
            program_a,
            program_b,
            schedule,
            declared_comm_bits,
            notes: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::MalformedProtocol {
            name: self.name.clone(),
            reason,
        };
        let calls = self.schedule.iter().filter(|s| **s == Step::Resource).count();
        if calls != 1 {
            return Err(bad(format!("resource is called {calls} times, expected exactly once")));
        }
        let msgs = self.messages_in_schedule();
        if msgs != self.declared_comm_bits {
            return Err(bad(format!(
                "schedule carries {msgs} message bits but {} are declared",
                self.declared_comm_bits
            )));
        }
        for p in Party::both() {
            let sent = self
                .schedule
                .iter()
                .filter(|s| **s == Step::Message(Direction::from_sender(p)))
                .count();
            let rules = self.program(p).messages.len();
            if sent != rules {
                return Err(bad(format!("party {p} sends {sent} messages but has {rules} message rules")));
            }
        }
        Ok(())
    }

    pub fn program(&self, p: Party) -> &PartyProgram {
        match p {
            Party::A => &self.program_a,
            Party::B => &self.program_b,
        }
    }

    pub fn program_mut(&mut self, p: Party) -> &mut PartyProgram {
        match p {
            Party::A => &mut self.program_a,
            Party::B => &mut self.program_b,
        }
    }

    pub fn messages_in_schedule(&self) -> usize {
        self.schedule
            .iter()
            .filter(|s| matches!(s, Step::Message(_)))
            .count()
    }

    pub fn total_tape_bits(&self) -> usize {
        self.program_a.tape_len as usize + self.program_b.tape_len as usize + self.resource.tape_len() as usize
    }

    /// Every world in canonical order: inputs, then A's tape, B's tape and
    /// the resource tape.
    pub fn worlds(&self) -> impl Iterator<Item = World> + '_ {
        let (ta, tb, tr) = (self.program_a.tape_len, self.program_b.tape_len, self.resource.tape_len());
        self.target.input_pairs().flat_map(move |(u, v)| {
            Symbol::all(ta).flat_map(move |tape_a| {
                Symbol::all(tb).flat_map(move |tape_b| {
                    Symbol::all(tr).map(move |resource_tape| World {
                        input_a: u,
                        input_b: v,
                        tape_a,
                        tape_b,
                        resource_tape,
                    })
                })
            })
        })
    }

    pub fn world_count(&self) -> u128 {
        let inputs = self.target.inputs(Party::A).len() as u128 * self.target.inputs(Party::B).len() as u128;
        inputs << self.total_tape_bits()
    }
}

impl fmt::Debug for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtocolSpec")
            .field("name", &self.name)
            .field("resource", &self.resource.name())
            .field("target", &self.target.name())
            .field("schedule", &self.schedule)
            .field("declared_comm_bits", &self.declared_comm_bits)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunResult {
    pub output_a: Symbol,
    pub output_b: Symbol,
    pub view_a: View,
    pub view_b: View,
    pub transcript: Transcript,
    pub resource_calls: usize,
}

impl RunResult {
    pub fn output(&self, p: Party) -> Symbol {
        match p {
            Party::A => self.output_a,
            Party::B => self.output_b,
        }
    }

    pub fn view(&self, p: Party) -> &View {
        match p {
            Party::A => &self.view_a,
            Party::B => &self.view_b,
        }
    }
}

fn check_world(spec: &ProtocolSpec, w: &World) -> Result<()> {
    let bad = |reason: String| Error::WorldMismatch {
        name: spec.name.clone(),
        reason,
    };
    for p in Party::both() {
        if !spec.target.inputs(p).contains(&w.input(p)) {
            return Err(bad(format!("input {} of party {p} outside the target alphabet", w.input(p))));
        }
        let want = spec.program(p).tape_len as usize;
        if w.tape(p).len() != want {
            return Err(bad(format!("tape of party {p} has {} bits, expected {want}", w.tape(p).len())));
        }
    }
    if w.resource_tape.len() != spec.resource.tape_len() as usize {
        return Err(bad(format!(
            "resource tape has {} bits, expected {}",
            w.resource_tape.len(),
            spec.resource.tape_len()
        )));
    }
    Ok(())
}

/// Execute one world along the schedule.
pub fn run_protocol(spec: &ProtocolSpec, world: &World) -> Result<RunResult> {
    check_world(spec, world)?;
    let mut va = View::new(Party::A, world.input_a, world.tape_a);
    let mut vb = View::new(Party::B, world.input_b, world.tape_b);
    let mut transcript = Transcript::default();
    let mut calls = 0;
    let (mut next_a, mut next_b) = (0usize, 0usize);
    for step in &spec.schedule {
        match *step {
            Step::Resource => {
                calls += 1;
                let ia = (spec.program_a.resource_input)(&va);
                let ib = (spec.program_b.resource_input)(&vb);
                for (p, sym) in [(Party::A, ia), (Party::B, ib)] {
                    if !spec.resource.inputs(p).contains(&sym) {
                        return Err(Error::AlphabetViolation {
                            party: p.as_char(),
                            symbol: sym.to_string(),
                            what: "resource input",
                        });
                    }
                }
                let (oa, ob) = spec
                    .resource
                    .sample(ia, ib, world.resource_tape)
                    .expect("inputs and tape validated");
                va.resource_in = Some(ia);
                vb.resource_in = Some(ib);
                va.resource_out = Some(oa);
                vb.resource_out = Some(ob);
            }
            Step::Message(dir) => {
                let (sender, receiver, idx) = match dir {
                    Direction::AToB => (&mut va, &mut vb, &mut next_a),
                    Direction::BToA => (&mut vb, &mut va, &mut next_b),
                };
                let bit = (spec.program(dir.sender()).messages[*idx])(sender);
                *idx += 1;
                sender.messages_out.push(bit);
                receiver.messages_in.push(bit);
                transcript.push(dir, bit);
            }
        }
    }
    let oa = (spec.program_a.output)(&va);
    let ob = (spec.program_b.output)(&vb);
    for (p, sym) in [(Party::A, oa), (Party::B, ob)] {
        if !spec.target.outputs(p).contains(&sym) {
            return Err(Error::AlphabetViolation {
                party: p.as_char(),
                symbol: sym.to_string(),
                what: "target output",
            });
        }
    }
    va.output = Some(oa);
    vb.output = Some(ob);
    Ok(RunResult {
        output_a: oa,
        output_b: ob,
        view_a: va,
        view_b: vb,
        transcript,
        resource_calls: calls,
    })
}

#[cfg(test)]
mod tests;

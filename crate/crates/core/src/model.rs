//! Parties, worlds, views and transcripts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bit::{Bit, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Party::A => 'A',
            Party::B => 'B',
        }
    }

    pub fn both() -> [Party; 2] {
        [Party::A, Party::B]
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A->B")]
    AToB,
    #[serde(rename = "B->A")]
    BToA,
}

impl Direction {
    pub fn sender(self) -> Party {
        match self {
            Direction::AToB => Party::A,
            Direction::BToA => Party::B,
        }
    }

    pub fn receiver(self) -> Party {
        self.sender().other()
    }

    pub fn from_sender(p: Party) -> Direction {
        match p {
            Party::A => Direction::AToB,
            Party::B => Direction::BToA,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::AToB => f.write_str("A→B"),
            Direction::BToA => f.write_str("B→A"),
        }
    }
}

/// One complete assignment of inputs and randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct World {
    pub input_a: Symbol,
    pub input_b: Symbol,
    pub tape_a: Symbol,
    pub tape_b: Symbol,
    /// Uniform bits that select the resource's outcome.
    pub resource_tape: Symbol,
}

impl World {
    pub fn input(&self, p: Party) -> Symbol {
        match p {
            Party::A => self.input_a,
            Party::B => self.input_b,
        }
    }

    pub fn tape(&self, p: Party) -> Symbol {
        match p {
            Party::A => self.tape_a,
            Party::B => self.tape_b,
        }
    }

    pub fn total_tape_bits(&self) -> usize {
        self.tape_a.len() + self.tape_b.len() + self.resource_tape.len()
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inA={} inB={} tapeA={} tapeB={} res={}",
            self.input_a, self.input_b, self.tape_a, self.tape_b, self.resource_tape
        )
    }
}

/// Everything one party observes in a run. Built up step by step during
/// execution; party programs only ever see their own view.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct View {
    pub party: Party,
    pub own_input: Symbol,
    pub own_tape: Symbol,
    pub resource_in: Option<Symbol>,
    pub resource_out: Option<Symbol>,
    pub messages_in: Vec<Bit>,
    pub messages_out: Vec<Bit>,
    pub output: Option<Symbol>,
}

impl View {
    pub fn new(party: Party, own_input: Symbol, own_tape: Symbol) -> Self {
        View {
            party,
            own_input,
            own_tape,
            resource_in: None,
            resource_out: None,
            messages_in: Vec::new(),
            messages_out: Vec::new(),
            output: None,
        }
    }

    pub fn input_bit(&self, i: usize) -> Bit {
        self.own_input.get(i)
    }

    pub fn tape_bit(&self, i: usize) -> Bit {
        self.own_tape.get(i)
    }

    /// Component `i` of what the resource returned. Panics before the call.
    pub fn res_bit(&self, i: usize) -> Bit {
        self.resource_out
            .expect("resource output read before the resource was called")
            .get(i)
    }

    pub fn received(&self, i: usize) -> Bit {
        self.messages_in[i]
    }

    /// The information content of the view: own input, tape, what the
    /// resource returned, and incoming messages. Under a deterministic
    /// program everything else in the view is a function of these.
    pub fn observation(&self) -> Observation {
        Observation {
            input: self.own_input,
            tape: self.own_tape,
            resource_out: self.resource_out,
            messages_in: self.messages_in.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Observation {
    pub input: Symbol,
    pub tape: Symbol,
    pub resource_out: Option<Symbol>,
    pub messages_in: Vec<Bit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Message {
    pub direction: Direction,
    pub payload: Bit,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Transcript(pub Vec<Message>);

impl Transcript {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, direction: Direction, payload: Bit) {
        self.0.push(Message { direction, payload });
    }

    pub fn iter(&self) -> impl Iterator<Item = &Message> {
        self.0.iter()
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(no messages)");
        }
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{}: {}", m.direction, m.payload)?;
        }
        Ok(())
    }
}

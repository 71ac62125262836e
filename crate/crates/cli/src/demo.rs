//! Single-world demo runs. Randomness comes from a seeded xorshift
//! generator and never reaches verification.

use std::fmt::Write;

use anyhow::{bail, Context};
use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;

use nonlocal_ot::protocols::{ProtocolSpec, RunResult};
use nonlocal_ot::{Bit, Party, Symbol, World};

fn random_symbol(rng: &mut XorShiftRng, len: usize) -> Symbol {
    let bits: Vec<Bit> = (0..len).map(|_| Bit::from_u8((rng.next_u64() & 1) as u8)).collect();
    Symbol::from_bits(&bits)
}

fn parse_bits(key: &str, value: &str, len: usize) -> anyhow::Result<Symbol> {
    let s: Symbol = if value.is_empty() {
        Symbol::NULL
    } else {
        value.parse().with_context(|| format!("`{key}={value}`"))?
    };
    if s.len() != len {
        bail!("`{key}` needs {len} bit(s), got `{value}`");
    }
    Ok(s)
}

/// The world described by `label=bits` assignments; unassigned parts are
/// drawn from `seed`.
pub fn world(spec: &ProtocolSpec, assignments: &[String], seed: u64) -> anyhow::Result<World> {
    let mut rng = XorShiftRng::seed_from_u64(seed);
    let mut inputs = Party::both().map(|p| {
        let alpha = spec.target.inputs(p);
        alpha[(rng.next_u64() % alpha.len() as u64) as usize].to_bits()
    });
    let mut tapes = Party::both().map(|p| random_symbol(&mut rng, spec.program(p).tape_len as usize));
    let mut res = random_symbol(&mut rng, spec.resource.tape_len() as usize);
    for a in assignments {
        let (key, value) = a.split_once('=').with_context(|| format!("expected label=bits, got `{a}`"))?;
        match key {
            "tape_a" => tapes[0] = parse_bits(key, value, tapes[0].len())?,
            "tape_b" => tapes[1] = parse_bits(key, value, tapes[1].len())?,
            "res" => res = parse_bits(key, value, res.len())?,
            _ => {
                let labels = spec.target.labels();
                let slot = Party::both()
                    .into_iter()
                    .find_map(|p| labels.input(p).iter().position(|l| l == key).map(|i| (p as usize, i)));
                let Some((p, i)) = slot else {
                    bail!("unknown input `{key}` for {}", spec.name);
                };
                inputs[p][i] = parse_bits(key, value, 1)?.get(0);
            }
        }
    }
    let [ia, ib] = inputs.map(|b| Symbol::from_bits(&b));
    Ok(World {
        input_a: ia,
        input_b: ib,
        tape_a: tapes[0],
        tape_b: tapes[1],
        resource_tape: res,
    })
}

fn show(s: Option<Symbol>) -> String {
    match s {
        Some(s) if !s.is_null() => s.to_string(),
        _ => "-".to_string(),
    }
}

pub fn trace(spec: &ProtocolSpec, w: &World, r: &RunResult) -> String {
    let mut out = String::new();
    let bits = spec.declared_comm_bits;
    let _ = writeln!(
        out,
        "protocol  {} ({} -> {}, {bits} bit{})",
        spec.name,
        spec.resource.name(),
        spec.target.name(),
        if bits == 1 { "" } else { "s" }
    );
    let _ = writeln!(out, "world     {w}");
    for p in Party::both() {
        let v = r.view(p);
        let _ = writeln!(
            out,
            "view {p}    input={} tape={} resource in={} out={}",
            show(Some(v.own_input)),
            show(Some(v.own_tape)),
            show(v.resource_in),
            show(v.resource_out)
        );
    }
    for m in r.transcript.iter() {
        let _ = writeln!(out, "{}: {}", m.direction, m.payload);
    }
    let _ = writeln!(out, "output    A={} B={}", show(Some(r.output_a)), show(Some(r.output_b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nonlocal_ot::protocols::{by_name, run_protocol};

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn assignments_override_the_generator() {
        let spec = by_name("ot-from-to").unwrap();
        let w = world(&spec, &args(&["x0=1", "x1=0", "c=1", "tape_b=1"]), 3).unwrap();
        assert_eq!(w.input_a.to_string(), "10");
        assert_eq!(w.input_b.to_string(), "1");
        assert_eq!(w.tape_b.to_string(), "1");
    }

    #[test]
    fn unassigned_parts_follow_the_seed() {
        let spec = by_name("ot-from-ok").unwrap();
        assert_eq!(world(&spec, &[], 9).unwrap(), world(&spec, &[], 9).unwrap());
        let worlds: std::collections::BTreeSet<World> = (0..32).map(|s| world(&spec, &[], s).unwrap()).collect();
        assert!(worlds.len() > 1);
    }

    #[test]
    fn bad_assignments_are_rejected() {
        let spec = by_name("ot-from-pr").unwrap();
        for bad in ["x0", "q=1", "c=11", "res=", "x1=2"] {
            assert!(world(&spec, &args(&[bad]), 1).is_err(), "{bad}");
        }
    }

    #[test]
    fn trace_lists_each_message() {
        let spec = by_name("ot-from-ok").unwrap();
        let w = world(&spec, &[], 5).unwrap();
        let r = run_protocol(&spec, &w).unwrap();
        let text = trace(&spec, &w, &r);
        assert_eq!(text.matches("→").count(), 3);
        assert!(text.starts_with("protocol  ot-from-ok (OK -> OT, 3 bits)"));
    }
}

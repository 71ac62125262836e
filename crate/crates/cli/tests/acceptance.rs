//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use nonlocal_ot::nonlocality::{
    chsh_correlator, chsh_p_value, equal_stats, local_strategies, local_strategy_stats, pr_variant, singlet_stats,
    table_angles, TSIRELSON,
};
use nonlocal_ot::optimality::{self, SearchConfig};
use nonlocal_ot::primitives::mass;
use nonlocal_ot::protocols::{by_name, catalog, mutations, run_protocol, ProtocolSpec};
use nonlocal_ot::verifier::{self, Config, VerificationReport};
use nonlocal_ot::{Party, Prob, Symbol, View};
use num_rational::Ratio;

type Check = Result<String, String>;

/// Name, time limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reports() -> Result<Vec<VerificationReport>, String> {
    catalog()
        .iter()
        .map(|s| verifier::verify(s, &Config::default()).map_err(|e| e.to_string()))
        .collect()
}

/// Induced output law per input pair, counted directly from runs.
fn induced_matches_target(spec: &ProtocolSpec) -> Result<(), String> {
    let mut counts: BTreeMap<(Symbol, Symbol), BTreeMap<(Symbol, Symbol), u64>> = BTreeMap::new();
    for w in spec.worlds() {
        let r = run_protocol(spec, &w).map_err(|e| e.to_string())?;
        *counts
            .entry((w.input_a, w.input_b))
            .or_default()
            .entry((r.output_a, r.output_b))
            .or_insert(0) += 1;
    }
    let t = &spec.target;
    for (u, v) in t.input_pairs() {
        let row = counts.get(&(u, v)).ok_or_else(|| format!("{}: no worlds for ({u}, {v})", spec.name))?;
        let n: u64 = row.values().sum();
        for &oa in t.outputs(Party::A) {
            for &ob in t.outputs(Party::B) {
                let got = Prob::new(row.get(&(oa, ob)).copied().unwrap_or(0), n).map_err(|e| e.to_string())?;
                let want = mass(t, u, v, oa, ob);
                ensure(got == want, || format!("{}: ({u}, {v}) -> ({oa}, {ob}) is {got}, want {want}", spec.name))?;
            }
        }
        let covered: u64 = t
            .outputs(Party::A)
            .iter()
            .flat_map(|oa| t.outputs(Party::B).iter().map(move |ob| (*oa, *ob)))
            .filter_map(|k| row.get(&k))
            .sum();
        ensure(covered == n, || format!("{}: outputs outside the target alphabet", spec.name))?;
    }
    Ok(())
}

/// View law of `p` per (own input, own output) must not depend on the
/// counterpart's input and output.
fn view_independent(spec: &ProtocolSpec, p: Party) -> Result<(), String> {
    type Group = BTreeMap<(Symbol, Symbol), BTreeMap<View, u64>>;
    let mut groups: BTreeMap<(Symbol, Symbol), Group> = BTreeMap::new();
    for w in spec.worlds() {
        let r = run_protocol(spec, &w).map_err(|e| e.to_string())?;
        *groups
            .entry((w.input(p), r.output(p)))
            .or_default()
            .entry((w.input(p.other()), r.output(p.other())))
            .or_default()
            .entry(r.view(p).clone())
            .or_insert(0) += 1;
    }
    for (own, by_other) in &groups {
        let laws: Vec<_> = by_other.values().collect();
        let t0: u64 = laws[0].values().sum();
        for law in &laws[1..] {
            let t: u64 = law.values().sum();
            let same = laws[0].len() == law.len()
                && laws[0].iter().all(|(view, c)| law.get(view).is_some_and(|d| c * t == d * t0));
            ensure(same, || format!("{}: {p} view depends on the counterpart at {own:?}", spec.name))?;
        }
    }
    Ok(())
}

fn c1_correctness() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_nonlocal-ot"))
        .args(["verify", "--all"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("verify --all exited with {}", out.status))?;
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rs = doc["reports"].as_array().ok_or("no reports")?;
    ensure(rs.len() == 8, || format!("{} reports", rs.len()))?;
    for r in rs {
        ensure(r["correctness"]["pass"] == true, || format!("{} is not correct", r["protocol"]))?;
    }
    for spec in catalog() {
        induced_matches_target(&spec)?;
    }
    Ok("8/8 induced laws equal their targets".into())
}

fn c2_privacy() -> Check {
    for r in reports()? {
        for p in Party::both() {
            ensure(r.privacy.get(p).holds(), || format!("{} fails privacy for {p}", r.protocol))?;
        }
    }
    for spec in catalog() {
        for p in Party::both() {
            view_independent(&spec, p)?;
        }
    }
    Ok("16/16 party checks".into())
}

fn c3_costs() -> Check {
    let want = [
        ("pr-from-ot", 0),
        ("ok-from-pr", 0),
        ("ok-from-ot", 0),
        ("ot-from-pr", 1),
        ("pr-from-ok", 2),
        ("ot-from-ok", 3),
        ("ot-from-to", 1),
        ("ok-from-ko", 0),
    ];
    let specs = catalog();
    ensure(specs.len() == want.len(), || format!("{} protocols", specs.len()))?;
    let mut worlds = 0;
    for (spec, (name, bits)) in specs.iter().zip(want) {
        ensure(spec.name == name, || format!("expected {name}, found {}", spec.name))?;
        for w in spec.worlds() {
            let r = run_protocol(spec, &w).map_err(|e| e.to_string())?;
            ensure(r.transcript.len() == bits, || format!("{name}: {} bits in {w:?}", r.transcript.len()))?;
            worlds += 1;
        }
    }
    Ok(format!("(0, 0, 0, 1, 2, 3, 1, 0) over {worlds} worlds"))
}

fn c4_reversal() -> Check {
    let spec = by_name("ot-from-to").map_err(|e| e.to_string())?;
    ensure(spec.resource.name() == "TO" && spec.target.name() == "OT", || "wrong primitives".into())?;
    let r = verifier::verify(&spec, &Config::default()).map_err(|e| e.to_string())?;
    ensure(r.pass, || format!("failures {:?}", r.failures()))?;
    ensure(r.comm_bits == 1, || format!("{} bits", r.comm_bits))?;
    induced_matches_target(&spec)?;
    Ok("TO + 1 bit gives OT, all checks pass".into())
}

fn c5_lower_bounds() -> Check {
    let cfg = SearchConfig::default();
    let err = |e: nonlocal_ot::Error| e.to_string();

    let a = optimality::search_up_to("ot-from-pr", 0, false, 1, &cfg).map_err(err)?;
    ensure(a.exhausted && a.correct_and_private == 0u8.into(), || "ot-from-pr at 0 bits".into())?;

    let b = optimality::one_way_leak_certificate(2, 1, &cfg).map_err(err)?;
    ensure(b.exhausted && b.correct_and_private == 0u8.into(), || "pr-from-ok one-way".into())?;
    let mut certified = num_bigint::BigUint::from(0u8);
    for t in &b.templates {
        if t.correct > 0u8.into() {
            let c = t.leak_certificate.as_ref().ok_or("correct candidates without a certificate")?;
            ensure(c.holds_for_all() && c.checked == t.correct, || format!("certificate fails on {:?}", t.space.template))?;
            certified += &c.checked;
        }
    }
    ensure(certified > 0u8.into(), || "no correct one-way candidates to certify".into())?;

    let c = optimality::search_up_to("ot-from-ok", 2, false, 1, &cfg).map_err(err)?;
    ensure(c.exhausted && c.correct_and_private == 0u8.into(), || "ot-from-ok at 2 bits".into())?;
    ensure(c.templates.len() == optimality::templates(2, false).len(), || "templates skipped".into())?;

    let mut found = Vec::new();
    for name in ["ot-from-pr", "pr-from-ok", "ot-from-ok"] {
        let w = optimality::witness_positive(name, &cfg).map_err(err)?;
        ensure(w.catalog_member, || format!("{name}: catalog protocol not found"))?;
        let first = w.result.witnesses.first().ok_or_else(|| format!("{name}: no witness"))?;
        let spec = first.to_spec(&w.result.space, format!("{name}-witness")).map_err(err)?;
        let r = verifier::verify(&spec, &Config::default()).map_err(err)?;
        ensure(r.pass, || format!("{name} witness fails {:?}", r.failures()))?;
        found.push(format!("{}@{}", w.result.correct_and_private, w.result.space.template.len()));
    }
    Ok(format!("impossible below bounds ({certified} certified leaks); witnesses {}", found.join(" ")))
}

fn c6_malicious() -> Check {
    let mut strategies = 0;
    for r in reports()? {
        for p in Party::both() {
            let m = r.malicious.get(p);
            ensure(m.pass, || format!("{} {p}: {:?} fails", r.protocol, m.property))?;
            ensure(m.strategies > 0, || format!("{} {p}: no deviations", r.protocol))?;
            strategies += m.strategies;
        }
    }
    Ok(format!("{strategies} deviations"))
}

fn c7_nonlocality() -> Check {
    let s = singlet_stats(&table_angles());
    let a = table_angles();
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let oracle = ((a.a[i] - a.b[j]) / 2.0).sin().powi(2);
        ensure((s.get(i, j) - oracle).abs() < 1e-9, || format!("p{i}{j} = {}", s.get(i, j)))?;
    }
    let want = [0.0, 0.25, 0.25, 0.75];
    for (got, w) in s.to_array().iter().zip(want) {
        ensure((got - w).abs() < 1e-9, || format!("singlet stats {:?}", s.to_array()))?;
    }
    ensure((chsh_p_value(&s) - 0.25).abs() < 1e-9, || "singlet p-value".into())?;
    let corr = chsh_correlator(&s);
    ensure((corr - 2.5).abs() < 1e-9 && corr <= TSIRELSON + 1e-9, || format!("singlet correlator {corr}"))?;

    let best = local_strategies()
        .map(|[a0, a1, b0, b1]| chsh_p_value(&local_strategy_stats(a0, a1, b0, b1).signed()))
        .max()
        .ok_or("no local strategies")?;
    let oracle = (0..16u8)
        .map(|m| {
            let bit = |k: u8| (m >> k) & 1;
            let eq = |i: u8, j: u8| i64::from(bit(i) == bit(2 + j));
            eq(1, 1) - eq(0, 0) - eq(0, 1) - eq(1, 0)
        })
        .max()
        .unwrap_or(i64::MIN);
    ensure(local_strategies().count() == 16, || "strategy count".into())?;
    ensure(best == Ratio::from_integer(0) && oracle == 0, || format!("local maximum {best}"))?;

    let pr = equal_stats(&pr_variant()).map_err(|e| e.to_string())?.signed();
    ensure(chsh_p_value(&pr) == Ratio::from_integer(1), || "PR-variant p-value".into())?;
    let prc = chsh_correlator(&pr);
    ensure(prc == Ratio::from_integer(4) && *prc.numer() as f64 > TSIRELSON, || format!("PR-variant correlator {prc}"))?;
    Ok("singlet (0, 1/4, 1/4, 3/4), p 1/4 / 0 / 1, correlators 5/2 and 4".into())
}

fn c8_mutations() -> Check {
    let ms = mutations();
    let mut per: BTreeMap<&str, usize> = BTreeMap::new();
    for m in &ms {
        let r = verifier::verify(&m.spec, &Config::default()).map_err(|e| e.to_string())?;
        ensure(!r.pass, || format!("{} passes every check", m.spec.name))?;
        let world = r
            .correctness
            .counterexample
            .or_else(|| Party::both().iter().find_map(|p| r.privacy.get(*p).witness.as_ref().map(|w| w.world)))
            .or_else(|| Party::both().iter().find_map(|p| r.malicious.get(*p).witness.as_ref().map(|w| w.world)));
        let world = world.ok_or_else(|| format!("{}: no counterexample world", m.spec.name))?;
        run_protocol(&m.spec, &world).map_err(|e| format!("{}: counterexample does not run: {e}", m.spec.name))?;
        *per.entry(m.protocol).or_insert(0) += 1;
    }
    for spec in catalog() {
        let n = per.get(spec.name.as_str()).copied().unwrap_or(0);
        ensure(n >= 2, || format!("{} has {n} mutations", spec.name))?;
    }
    Ok(format!("{} mutations flipped, each with a world", ms.len()))
}

fn verify_all(workers: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nonlocal-ot"))
        .args(["verify", "--all", "--workers", workers])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("verify --all exited with {}", out.status))?;
    Ok(out.stdout)
}

fn c9_determinism() -> Check {
    let first = verify_all("1")?;
    let again = verify_all("1")?;
    let wide = verify_all("4")?;
    ensure(first == again, || "consecutive runs differ".into())?;
    ensure(first == wide, || "worker counts differ".into())?;
    Ok(format!("{} bytes identical across 3 runs", first.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 correctness", Some(5), c1_correctness),
        ("2 privacy", Some(10), c2_privacy),
        ("3 communication", None, c3_costs),
        ("4 ot reversal", None, c4_reversal),
        ("5 lower bounds", Some(60), c5_lower_bounds),
        ("6 malicious", Some(30), c6_malicious),
        ("7 nonlocality", Some(1), c7_nonlocality),
        ("8 mutations", None, c8_mutations),
        ("9 determinism", None, c9_determinism),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let t = Instant::now();
        let mut res = run();
        let took = t.elapsed();
        if let (Ok(_), Some(s)) = (&res, limit) {
            if took > Duration::from_secs(s) {
                res = Err(format!("took {:.2} s, limit {s} s", took.as_secs_f64()));
            }
        }
        match res {
            Ok(msg) => println!("PASS  {name:<16} {:>7.2} s  {msg}", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name:<16} {:>7.2} s  {msg}", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

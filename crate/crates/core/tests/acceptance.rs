//! Acceptance criteria. Each criterion prints one line; the target exits
//! nonzero if any criterion fails or overruns its time limit.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use plonka_core::builders::{
    chopped_sum_lattice_ops, complex_algebra, example_fig1, group_antichain, boolean_chain, pz2, two_component_sum,
    FiniteMonoid,
};
use plonka_core::enumerate::{enumerate_residuated_posets, property_sweep, SweepConfig};
use plonka_core::format::AlgebraFile;
use plonka_core::order_sum::{generate_systems, GeneratorConfig};
use plonka_core::plonka::{
    standard_partition_system, verify_left_normal_band, verify_partition_system, BandLaw, BandTable,
};
use plonka_core::residuated::HCondition;
use plonka_core::{compose_residuated, decompose, verify_residuated_poset, Algebra, ResiduatedPoset, Signature};

type Verdict = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Verdict, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const FAST: Duration = Duration::from_secs(1);
const ROUNDTRIP_LIMIT: Duration = Duration::from_secs(600);

fn fixture(name: &str) -> ResiduatedPoset {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    AlgebraFile::from_json(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_algebra()
        .unwrap()
}

fn labels(a: &ResiduatedPoset, elems: &[usize]) -> BTreeSet<String> {
    elems.iter().map(|&e| a.label(e).to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

// ---- oracles computed straight from the tables ----

fn one(a: &ResiduatedPoset, x: usize) -> usize {
    a.rd(x, x)
}

fn oracle_balanced(a: &ResiduatedPoset) -> bool {
    (0..a.len()).all(|x| a.ld(x, x) == a.rd(x, x))
}

fn oracle_h(a: &ResiduatedPoset, k: HCondition) -> bool {
    let n = a.len();
    let o = |x| one(a, x);
    (0..n).all(|x| {
        (0..n).all(|y| match k {
            HCondition::H1 => o(x) != o(y) || o(a.mult(x, y)) == o(x),
            HCondition::H2 => o(x) != o(y) || o(a.rd(x, y)) == o(x),
            HCondition::H3 => o(x) != o(y) || o(a.ld(x, y)) == o(x),
            HCondition::H4 => o(a.mult(x, y)) == a.mult(o(x), o(y)),
            HCondition::H5 => o(a.ld(x, y)) == a.mult(o(x), o(y)),
            HCondition::H6 => o(a.rd(x, y)) == a.mult(o(x), o(y)),
        })
    })
}

fn oracle_idp(a: &ResiduatedPoset) -> Vec<usize> {
    (0..a.len())
        .filter(|&p| a.leq(a.unit(), p) && a.mult(p, p) == p)
        .collect()
}

/// Order, unit and all three operations agree under `e`.
fn same_under(a: &ResiduatedPoset, b: &ResiduatedPoset, e: &[usize]) -> Result<(), String> {
    let n = a.len();
    if b.len() != n {
        return Err(format!("sizes {n} and {}", b.len()));
    }
    if e[a.unit()] != b.unit() {
        return Err("units differ".into());
    }
    for x in 0..n {
        for y in 0..n {
            let l = || format!("({}, {})", a.label(x), a.label(y));
            if a.leq(x, y) != b.leq(e[x], e[y]) {
                return Err(format!("order differs at {}", l()));
            }
            if e[a.mult(x, y)] != b.mult(e[x], e[y]) {
                return Err(format!("· differs at {}", l()));
            }
            if e[a.ld(x, y)] != b.ld(e[x], e[y]) {
                return Err(format!("\\ differs at {}", l()));
            }
            if e[a.rd(x, y)] != b.rd(e[x], e[y]) {
                return Err(format!("/ differs at {}", l()));
            }
        }
    }
    Ok(())
}

/// `a ↦ (1_a, a)`: positions in the disjoint union ordered by index, then element.
fn canonical_embedding(a: &ResiduatedPoset) -> Vec<usize> {
    let idp = oracle_idp(a);
    let mut order = Vec::new();
    for &p in &idp {
        order.extend((0..a.len()).filter(|&x| a.ld(x, x) == p));
    }
    let mut e = vec![0; a.len()];
    for (pos, &x) in order.iter().enumerate() {
        e[x] = pos;
    }
    e
}

fn all_small() -> Vec<ResiduatedPoset> {
    (1..=4).flat_map(|n| enumerate_residuated_posets(n, None).unwrap()).collect()
}

// ---- criteria ----

fn c1_fig1() -> Verdict {
    let a = fixture("fig1.json");
    ensure!(a == example_fig1(), "fixture differs from the built example");
    let id = |l: &str| a.lookup(l).unwrap();
    ensure!(a.is_balanced().verdict && a.balanced(), "not balanced");
    for k in [HCondition::H1, HCondition::H2, HCondition::H3] {
        ensure!(a.check_h(k).holds, "{k} fails");
    }
    for k in [HCondition::H4, HCondition::H5, HCondition::H6] {
        let w = a.check_h(k).witness;
        ensure!(w == Some((id("p"), id("a"))), "{k} witness {w:?}");
    }
    let idp = a.positive_idempotents().map_err(|e| e.to_string())?;
    ensure!(labels(&a, &idp) == set(&["1", "p", "q"]), "Idp = {:?}", labels(&a, &idp));
    let part = a.component_partition().map_err(|e| e.to_string())?;
    let classes: BTreeSet<BTreeSet<String>> = part.classes.iter().map(|c| labels(&a, c)).collect();
    let expected: BTreeSet<BTreeSet<String>> =
        [set(&["1", "a"]), set(&["p"]), set(&["q", "b", "⊥"])].into_iter().collect();
    ensure!(classes == expected, "components {classes:?}");
    ensure!(a.mult(id("p"), id("a")) == id("b"), "pa ≠ b");
    ensure!(a.ld(id("p"), id("a")) == id("⊥"), "p\\a ≠ ⊥");
    ensure!(a.one_x(id("⊥")) == id("q"), "1_⊥ ≠ q");
    Ok("balanced, H1–H3 hold, H4–H6 fail at (p, a), Idp = {1, p, q}".into())
}

fn c2_pz2() -> Verdict {
    let m = FiniteMonoid::cyclic(2);
    let a = complex_algebra(&m).map_err(|e| e.to_string())?;
    ensure!(verify_residuated_poset(&a.to_raw()).ok(), "verification fails");
    // set-level oracle on bitmasks: bit 0 is e, bit 1 is g
    let prod = |x: usize, y: usize| {
        let mut out = 0;
        for i in 0..2 {
            for j in 0..2 {
                if x >> i & 1 == 1 && y >> j & 1 == 1 {
                    out |= 1 << ((i + j) % 2);
                }
            }
        }
        out
    };
    for x in 0..4 {
        for y in 0..4 {
            ensure!(a.mult(x, y) == prod(x, y), "product at ({x}, {y})");
            let ld = (0..2).filter(|&z| prod(x, 1 << z) & !y == 0).fold(0, |acc, z| acc | 1 << z);
            ensure!(a.ld(x, y) == ld, "left residual at ({x}, {y})");
        }
    }
    ensure!(oracle_balanced(&a) && a.balanced(), "not balanced");
    for k in [HCondition::H4, HCondition::H5, HCondition::H6] {
        ensure!(a.check_h(k).holds && oracle_h(&a, k), "{k} fails");
    }
    ensure!(!a.is_integrally_closed(), "integrally closed");
    let (bot, unit, zero, top) = (0, 1, 2, 3);
    let idp = a.positive_idempotents().map_err(|e| e.to_string())?;
    ensure!(idp == [unit, top], "Idp = {idp:?}");
    let d = decompose(&a).map_err(|e| e.to_string())?;
    ensure!(d.members == [vec![unit, zero], vec![bot, top]], "members {:?}", d.members);
    let (g, b) = (&d.system.components[0], &d.system.components[1]);
    ensure!(!g.leq(0, 1) && !g.leq(1, 0) && g.mult(1, 1) == g.unit(), "A_1 is not the antichain group");
    ensure!(b.leq(0, 1) && !b.leq(1, 0), "A_⊤ is not a 2-chain");
    ensure!(d.system.phi[&(0, 1)] == [1, 1], "φ = {:?}", d.system.phi[&(0, 1)]);
    ensure!(d.system.psi[&(0, 1)] == [0, 0], "ψ = {:?}", d.system.psi[&(0, 1)]);
    let back = compose_residuated(&d.system).map_err(|e| e.to_string())?;
    same_under(&a, &back, &canonical_embedding(&a))?;
    ensure!(same_under(&a, &pz2(), &[0, 1, 2, 3]).is_ok(), "aliases change the algebra");
    Ok("decomposes into Z₂ and 2 with φ = ⊤, ψ = ⊥ and recomposes exactly".into())
}

fn c3_roundtrip() -> Verdict {
    let mut eligible = 0;
    for a in all_small() {
        let qualifies = oracle_balanced(&a)
            && [HCondition::H4, HCondition::H5, HCondition::H6].iter().all(|&k| oracle_h(&a, k));
        if !qualifies {
            continue;
        }
        eligible += 1;
        let d = decompose(&a).map_err(|e| format!("{e}\n{}", AlgebraFile::from_algebra("x", &a, false).to_json()))?;
        let back = compose_residuated(&d.system).map_err(|e| e.to_string())?;
        same_under(&a, &back, &canonical_embedding(&a))?;
    }
    ensure!(eligible > 0, "no eligible algebras");
    let sweep = property_sweep(&SweepConfig::new("roundtrip", 4)).map_err(|e| e.to_string())?;
    ensure!(sweep.confirmed() && sweep.eligible == eligible, "sweep: {sweep}");
    Ok(format!("{eligible} algebras round-trip"))
}

fn c4_prop4() -> Verdict {
    let mut count = 0;
    for a in all_small() {
        let r = a.is_balanced();
        ensure!(r.conditions.len() == 9, "expected nine conditions");
        ensure!(r.agree(), "disagreement on {}", AlgebraFile::from_algebra("x", &a, false).to_json());
        ensure!(r.verdict == oracle_balanced(&a), "verdict differs from x\\x = x/x");
        count += 1;
    }
    let sweep = property_sweep(&SweepConfig::new("prop4", 4)).map_err(|e| e.to_string())?;
    ensure!(sweep.confirmed() && sweep.instances_checked == count, "sweep: {sweep}");
    Ok(format!("nine conditions agree on {count} algebras"))
}

fn c5_implications() -> Verdict {
    use HCondition::*;
    let mut balanced = 0;
    for a in all_small().iter().filter(|a| oracle_balanced(a)) {
        balanced += 1;
        let h = |k| oracle_h(a, k);
        for k in HCondition::ALL {
            ensure!(a.check_h(k).holds == h(k), "library {k} differs from oracle");
        }
        ensure!(h(H2) == h(H3), "H2 ⇎ H3");
        ensure!(!h(H2) || h(H1), "H2 ⇏ H1");
        ensure!(!h(H4) || h(H1), "H4 ⇏ H1");
        ensure!(!(h(H5) && h(H6)) || (h(H2) && h(H3)), "H5 ∧ H6 ⇏ H2 ∧ H3");
    }
    for p in ["prop6", "h4_implies_h1", "h56_imply_h23"] {
        let sweep = property_sweep(&SweepConfig::new(p, 4)).map_err(|e| e.to_string())?;
        ensure!(sweep.confirmed(), "{sweep}");
    }
    Ok(format!("all implications hold on {balanced} balanced algebras"))
}

fn c6_lemma5() -> Verdict {
    let mut balanced = 0;
    for a in all_small().iter().filter(|a| oracle_balanced(a)) {
        balanced += 1;
        let n = a.len();
        for x in 0..n {
            for y in 0..n {
                let lo = one(a, x);
                for rhs in [a.mult(x, y), a.mult(y, x), a.rd(x, y), a.ld(y, x)] {
                    ensure!(a.leq(lo, one(a, rhs)), "fails at ({}, {})", a.label(x), a.label(y));
                }
            }
        }
    }
    let sweep = property_sweep(&SweepConfig::new("lemma5", 4)).map_err(|e| e.to_string())?;
    ensure!(sweep.confirmed() && sweep.eligible == balanced, "{sweep}");
    Ok(format!("four inequations hold on {balanced} balanced algebras"))
}

fn c7_thm5() -> Verdict {
    let (mut satisfying, mut violating, mut bad) = (0usize, 0usize, None);
    let total = generate_systems(GeneratorConfig::default(), |sys| {
        if bad.is_some() {
            return;
        }
        // independent evaluation of O1–O3 and of the order axioms
        let idx = &sys.index;
        let k = idx.len();
        let o = |p: usize| &sys.components[p];
        let leq_i = |p: usize, q: usize| idx.join(p, q) == q;
        let mut o_ok = true;
        for p in 0..k {
            for q in (0..k).filter(|&q| leq_i(p, q)) {
                let (f, g) = (&sys.phi[&(p, q)], &sys.psi[&(p, q)]);
                for a in 0..o(p).len() {
                    if p != q && !(o(q).leq(g[a], f[a]) && g[a] != f[a]) {
                        o_ok = false;
                    }
                    for (b, &gb) in g.iter().enumerate() {
                        if o(q).leq(f[a], gb) && !o(p).leq(a, b) {
                            o_ok = false;
                        }
                    }
                }
                for r in (0..k).filter(|&r| leq_i(p, r)) {
                    let t = idx.join(q, r);
                    for a in 0..o(p).len() {
                        let lhs = sys.phi[&(q, t)][sys.psi[&(p, q)][a]];
                        let rhs = sys.psi[&(r, t)][sys.phi[&(p, r)][a]];
                        if !o(t).leq(lhs, rhs) {
                            o_ok = false;
                        }
                    }
                }
            }
        }
        let elems: Vec<(usize, usize)> = (0..k).flat_map(|p| (0..o(p).len()).map(move |x| (p, x))).collect();
        let rel = |&(p, x): &(usize, usize), &(q, y): &(usize, usize)| {
            let s = idx.join(p, q);
            o(s).leq(sys.phi[&(p, s)][x], sys.psi[&(q, s)][y])
        };
        let mut order_ok = true;
        for a in &elems {
            for b in &elems {
                if a.0 == b.0 && rel(a, b) != o(a.0).leq(a.1, b.1) {
                    order_ok = false;
                }
                if a != b && rel(a, b) && rel(b, a) {
                    order_ok = false;
                }
                for c in &elems {
                    if rel(a, b) && rel(b, c) && !rel(a, c) {
                        order_ok = false;
                    }
                }
            }
        }
        let library = sys.verify_o().ok();
        if library != o_ok {
            bad = Some("library O1–O3 verdict differs from the oracle".to_string());
        } else if o_ok != order_ok {
            bad = Some(format!("O1–O3 = {o_ok} but order = {order_ok}"));
        }
        if o_ok {
            satisfying += 1;
        } else {
            violating += 1;
        }
    });
    if let Some(b) = bad {
        return Err(b);
    }
    ensure!(satisfying > 0 && violating > 0, "one direction untested: {satisfying} / {violating}");
    Ok(format!("{total} systems: {satisfying} satisfy O1–O3, {violating} violate; zero disagreements"))
}

fn c8_lemma4() -> Verdict {
    let mut algebras = vec![
        ("fig1".to_string(), example_fig1()),
        ("P(Z₂)".to_string(), pz2()),
        ("P(Z₃)".to_string(), complex_algebra(&FiniteMonoid::cyclic(3)).map_err(|e| e.to_string())?),
    ];
    algebras.extend(all_small().into_iter().enumerate().map(|(i, a)| (format!("enumerated #{i}"), a)));
    let mut audits = 0;
    for (name, a) in &algebras {
        let idp = oracle_idp(a);
        ensure!(a.positive_idempotents().ok().as_ref() == Some(&idp), "{name}: Idp differs from oracle");
        for p in idp {
            let r = a.closure_interior_audit(p);
            if let Some(c) = r.first_failure() {
                return Err(format!("{name}, p = {}: {} at {:?}", a.label(p), c.name, c.witness));
            }
            audits += 1;
        }
    }
    Ok(format!("{audits} audits over {} algebras", algebras.len()))
}

fn c9_chopped() -> Verdict {
    let s = two_component_sum(&group_antichain(2).unwrap(), &boolean_chain(), 0).map_err(|e| e.to_string())?;
    let (join, meet) = chopped_sum_lattice_ops(&s).map_err(|e| e.to_string())?;
    let target = pz2();
    // 1.e ↦ 1, 1.g ↦ 0, 2.⊥ ↦ ⊥, 2.⊤ ↦ ⊤
    let e = [1, 2, 0, 3];
    same_under(&s.algebra, &target, &e)?;
    let o = target.poset();
    let brute = |x: usize, y: usize, upper: bool| {
        let bounds: Vec<usize> = (0..4)
            .filter(|&c| if upper { o.leq(x, c) && o.leq(y, c) } else { o.leq(c, x) && o.leq(c, y) })
            .collect();
        bounds
            .iter()
            .copied()
            .find(|&c| bounds.iter().all(|&d| if upper { o.leq(c, d) } else { o.leq(d, c) }))
    };
    for x in 0..4 {
        for y in 0..4 {
            ensure!(Some(e[join.get(x, y)]) == brute(e[x], e[y], true), "join at ({x}, {y})");
            ensure!(Some(e[meet.get(x, y)]) == brute(e[x], e[y], false), "meet at ({x}, {y})");
        }
    }
    Ok("join and meet tables match the diamond on all 16 cells".into())
}

fn c10_bands() -> Verdict {
    let a = example_fig1();
    let odot = BandTable::from_fn(a.len(), |x, y| a.mult(one(&a, y), x));
    let v = verify_left_normal_band(&odot);
    let id = |l: &str| a.lookup(l).unwrap();
    ensure!(
        v.failure == Some((BandLaw::PF2, [id("1"), id("a"), id("p")])),
        "fig1 band verdict {:?}",
        v.failure
    );
    let p = pz2();
    let odot = BandTable::from_fn(4, |x, y| p.mult(one(&p, y), x));
    let otimes = BandTable::from_fn(4, |x, y| p.ld(one(&p, y), x));
    ensure!(verify_left_normal_band(&odot).holds, "⊙ on P(Z₂) is not a left normal band");
    ensure!(verify_left_normal_band(&otimes).holds, "⊗ on P(Z₂) is not a left normal band");
    let system = standard_partition_system(&p).map_err(|e| e.to_string())?;
    ensure!(system.bands["⊙"] == odot && system.bands["⊗"] == otimes, "library bands differ from the oracle");
    let report = verify_partition_system(&p, &system, Signature::Full);
    ensure!(report.ok(), "{report}");
    Ok("fig1 fails PF2 at (1, a, p); P(Z₂) bands and partition system pass".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "fig1 fixture", c1_fig1, Some(FAST)),
        (2, "P(Z₂) decomposition", c2_pz2, Some(FAST)),
        (3, "round-trip sweep, size ≤ 4", c3_roundtrip, Some(ROUNDTRIP_LIMIT)),
        (4, "nine balanced conditions agree", c4_prop4, None),
        (5, "H-condition implications", c5_implications, None),
        (6, "unit inequations", c6_lemma5, None),
        (7, "sum order iff O1–O3", c7_thm5, None),
        (8, "closure/interior audit", c8_lemma4, None),
        (9, "doubly chopped lattice operations", c9_chopped, None),
        (10, "band negative control", c10_bands, None),
    ];
    let mut failed = Vec::new();
    for (id, title, run, limit) in criteria {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let verdict = match (verdict, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:?}, limit {l:?}")),
            (v, _) => v,
        };
        match &verdict {
            Ok(detail) => println!("criterion {id:>2} PASS  {title}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                println!("criterion {id:>2} FAIL  {title}: {why} ({elapsed:.2?})");
                failed.push(id);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

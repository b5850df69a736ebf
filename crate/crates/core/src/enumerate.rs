//! Brute-force generation of small posets and residuated posets, and
//! exhaustive property sweeps over them.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::AlgebraFile;
use crate::order_sum::{compose_residuated, generate_systems, DirectedSystemPair, GeneratorConfig};
use crate::plonka::{decompose_with, DecomposeOptions};
use crate::poset::FinitePoset;
use crate::residuated::{residuals_raw, HCondition, ResiduatedPoset};
use crate::signature::Algebra;
use crate::table::{Elem, Table};

/// Largest poset size [`enumerate_posets`] accepts.
pub const MAX_POSET_SIZE: usize = 6;
/// Largest size enumerated without a budget.
pub const MAX_RESIDUATED_SIZE: usize = 4;
/// Largest size enumerated at all.
pub const MAX_BUDGETED_SIZE: usize = 5;

fn element_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// All labeled partial orders on `n` elements. Element `k` is added on top
/// of an order on `0..k` by choosing a down-set below it and an up-set above
/// it such that everything in the first lies below everything in the second.
pub fn enumerate_posets(n: usize) -> Result<Vec<FinitePoset>> {
    if n == 0 || n > MAX_POSET_SIZE {
        return Err(Error::SizeBound {
            requested: n,
            max: MAX_POSET_SIZE,
        });
    }
    let mut layer: Vec<Vec<bool>> = vec![vec![true]];
    for k in 1..n {
        let mut next = Vec::new();
        for m in &layer {
            let leq = |i: usize, j: usize| m[i * k + j];
            for down in 0u32..1 << k {
                let is_down = |i: usize| down >> i & 1 == 1;
                if !(0..k).all(|j| !is_down(j) || (0..k).all(|i| !leq(i, j) || is_down(i))) {
                    continue;
                }
                for up in 0u32..1 << k {
                    if up & down != 0 {
                        continue;
                    }
                    let is_up = |i: usize| up >> i & 1 == 1;
                    if !(0..k).all(|i| !is_up(i) || (0..k).all(|j| !leq(i, j) || is_up(j))) {
                        continue;
                    }
                    if !(0..k).all(|d| !is_down(d) || (0..k).all(|u| !is_up(u) || leq(d, u))) {
                        continue;
                    }
                    let size = k + 1;
                    let mut grown = vec![false; size * size];
                    for i in 0..k {
                        for j in 0..k {
                            grown[i * size + j] = leq(i, j);
                        }
                        grown[i * size + k] = is_down(i);
                        grown[k * size + i] = is_up(i);
                    }
                    grown[k * size + k] = true;
                    next.push(grown);
                }
            }
        }
        layer = next;
    }
    let labels = element_labels(n);
    Ok(layer
        .into_iter()
        .map(|m| FinitePoset::from_flat_unchecked(labels.clone(), m))
        .collect())
}

/// Labeled partial orders on `n` elements by filtering every relation that
/// is reflexive and antisymmetric by construction; the independent check
/// on [`enumerate_posets`].
pub fn naive_posets(n: usize) -> Vec<FinitePoset> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let labels = element_labels(n);
    (0..total)
        .filter_map(|mut code| {
            let mut leq = vec![vec![false; n]; n];
            for (i, row) in leq.iter_mut().enumerate() {
                row[i] = true;
            }
            for &(i, j) in &pairs {
                match code % 3 {
                    1 => leq[i][j] = true,
                    2 => leq[j][i] = true,
                    _ => {}
                }
                code /= 3;
            }
            let transitive =
                (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(leq[i][j] && leq[j][k]) || leq[i][k])));
            transitive.then(|| FinitePoset::from_matrix(labels.clone(), leq).expect("valid order"))
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// The least encoding of the order over all relabelings.
pub fn poset_canonical_key(p: &FinitePoset) -> Vec<bool> {
    let n = p.len();
    permutations(n)
        .into_iter()
        .map(|perm| {
            // new position i holds old element perm[i]
            (0..n * n).map(|c| p.leq(perm[c / n], perm[c % n])).collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

/// The least encoding of order, unit and products over all relabelings.
pub fn algebra_canonical_key(a: &ResiduatedPoset) -> Vec<usize> {
    let n = a.len();
    permutations(n)
        .into_iter()
        .map(|perm| {
            let mut inv = vec![0; n];
            for (i, &old) in perm.iter().enumerate() {
                inv[old] = i;
            }
            let mut key: Vec<usize> = (0..n * n).map(|c| a.leq(perm[c / n], perm[c % n]) as usize).collect();
            key.push(inv[a.unit()]);
            key.extend((0..n * n).map(|c| inv[a.mult(perm[c / n], perm[c % n])]));
            key
        })
        .min()
        .unwrap_or_default()
}

/// One poset of each isomorphism type on `n` elements.
pub fn enumerate_posets_up_to_iso(n: usize) -> Vec<FinitePoset> {
    let mut seen = std::collections::BTreeSet::new();
    enumerate_posets(n)
        .unwrap_or_default()
        .into_iter()
        .filter(|p| seen.insert(poset_canonical_key(p)))
        .collect()
}

/// Residuated posets on one labeled poset, in a fixed order: units
/// ascending, then tables in row-major backtracking order.
pub fn residuated_on(poset: &FinitePoset) -> Vec<ResiduatedPoset> {
    let n = poset.len();
    let bottom = poset.least();
    let mut out = Vec::new();
    for unit in 0..n {
        if n > 1 && bottom == Some(unit) {
            // x·⊥ = ⊥ in any residuated poset, which clashes with x·1 = x
            continue;
        }
        let mut cells: Vec<Option<Elem>> = vec![None; n * n];
        let mut consistent = true;
        for x in 0..n {
            for (c, v) in [(unit * n + x, x), (x * n + unit, x)] {
                cells[c] = Some(v);
            }
            if let Some(b) = bottom {
                for c in [b * n + x, x * n + b] {
                    if cells[c].is_some_and(|v| v != b) {
                        consistent = false;
                    }
                    cells[c] = Some(b);
                }
            }
        }
        if !consistent {
            continue;
        }
        let free: Vec<usize> = (0..n * n).filter(|&c| cells[c].is_none()).collect();
        let fixed: Vec<Elem> = cells.iter().map(|c| c.unwrap_or(usize::MAX)).collect();
        fill(poset, unit, &free, 0, fixed, &mut out);
    }
    out
}

fn monotone_with_assigned(poset: &FinitePoset, cells: &[Elem], c: usize) -> bool {
    let n = poset.len();
    let (x, y, v) = (c / n, c % n, cells[c]);
    if v == usize::MAX {
        return true;
    }
    (0..n * n).all(|d| {
        let w = cells[d];
        if w == usize::MAX || d == c {
            return true;
        }
        let (x2, y2) = (d / n, d % n);
        (!(poset.leq(x2, x) && poset.leq(y2, y)) || poset.leq(w, v))
            && (!(poset.leq(x, x2) && poset.leq(y, y2)) || poset.leq(v, w))
    })
}

fn fill(poset: &FinitePoset, unit: Elem, free: &[usize], i: usize, mut cells: Vec<Elem>, out: &mut Vec<ResiduatedPoset>) {
    let n = poset.len();
    if i == 0 && !(0..n * n).all(|c| monotone_with_assigned(poset, &cells, c)) {
        return;
    }
    if i == free.len() {
        let mult = Table::from_fn(n, |x, y| cells[x * n + y]);
        let associative = (0..n).all(|z| {
            (0..n).all(|y| (0..n).all(|x| mult.get(mult.get(x, y), z) == mult.get(x, mult.get(y, z))))
        });
        if !associative {
            return;
        }
        if let Ok((ld, rd)) = residuals_raw(poset, &mult) {
            out.push(ResiduatedPoset::from_parts_unchecked(poset.clone(), unit, mult, ld, rd));
        }
        return;
    }
    let c = free[i];
    for v in 0..n {
        cells[c] = v;
        if monotone_with_assigned(poset, &cells, c) {
            fill(poset, unit, free, i + 1, cells.clone(), out);
        }
    }
}

/// Labeled residuated posets on `n` elements: every labeled poset, every
/// unit, every monotone associative table with that unit whose residuals
/// exist. Sizes above [`MAX_RESIDUATED_SIZE`] need a budget, which caps the
/// number of algebras returned.
pub fn enumerate_residuated_posets(n: usize, budget: Option<usize>) -> Result<Vec<ResiduatedPoset>> {
    let max = if budget.is_some() {
        MAX_BUDGETED_SIZE
    } else {
        MAX_RESIDUATED_SIZE
    };
    if n == 0 || n > max {
        return Err(Error::SizeBound { requested: n, max });
    }
    let posets = enumerate_posets(n)?;
    let cap = budget.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    for chunk in posets.chunks(64) {
        let batch: Vec<Vec<ResiduatedPoset>> = chunk.par_iter().map(residuated_on).collect();
        for algebras in batch {
            for a in algebras {
                if out.len() == cap {
                    return Ok(out);
                }
                out.push(a);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Dedupe {
    #[default]
    Labeled,
    UpToIsomorphism,
}

/// Properties known to [`property_sweep`].
pub const PROPERTIES: [&str; 9] = [
    "prop4",
    "prop6",
    "lemma5",
    "h4_implies_h1",
    "h56_imply_h23",
    "thm5_iff",
    "roundtrip",
    "lemma4",
    "components",
];

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub max_size: usize,
    pub property: String,
    /// Most instances examined per size; required above size 4.
    pub budget: Option<usize>,
    pub dedupe: Dedupe,
    /// Skips the H4–H6 precondition in `decompose` (roundtrip only).
    pub planted_bug: bool,
}

impl SweepConfig {
    pub fn new(property: impl Into<String>, max_size: usize) -> Self {
        SweepConfig {
            max_size,
            property: property.into(),
            budget: None,
            dedupe: Dedupe::Labeled,
            planted_bug: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub reason: String,
    /// An `AlgebraFile`, or a description of a directed system pair.
    pub instance: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub property: String,
    pub max_size: usize,
    pub instances_checked: usize,
    /// Instances meeting the property's hypotheses.
    pub eligible: usize,
    pub counterexample: Option<Counterexample>,
}

impl SweepOutcome {
    pub fn confirmed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for SweepOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(
                f,
                "{}: confirmed (instances_checked = {}, eligible = {}, max size {})",
                self.property, self.instances_checked, self.eligible, self.max_size
            ),
            Some(c) => write!(
                f,
                "{}: counterexample after {} instances: {}\n{}",
                self.property,
                self.instances_checked,
                c.reason,
                serde_json::to_string_pretty(&c.instance).unwrap_or_default()
            ),
        }
    }
}

/// Outcome of checking one instance: `None` if ineligible, otherwise the
/// failure reason if any.
type Verdict = Option<std::result::Result<(), String>>;

fn holds(a: &ResiduatedPoset, k: HCondition) -> bool {
    a.check_h(k).holds
}

fn check_algebra(property: &str, a: &ResiduatedPoset, planted_bug: bool) -> Verdict {
    use HCondition::*;
    let fail = |msg: String| Some(Err(msg));
    match property {
        "prop4" => {
            let r = a.is_balanced();
            if r.agree() {
                Some(Ok(()))
            } else {
                let split: Vec<String> =
                    r.conditions.iter().map(|c| format!("({}) {}", c.number, c.holds)).collect();
                fail(format!("balanced conditions disagree: {}", split.join(", ")))
            }
        }
        "prop6" | "h4_implies_h1" | "h56_imply_h23" | "lemma5" | "components" if !a.balanced() => None,
        "prop6" => {
            let (h1, h2, h3) = (holds(a, H1), holds(a, H2), holds(a, H3));
            if h2 != h3 {
                fail(format!("H2 = {h2} but H3 = {h3}"))
            } else if h2 && !h1 {
                fail("H2 holds but H1 fails".into())
            } else {
                Some(Ok(()))
            }
        }
        "h4_implies_h1" => {
            if !holds(a, H4) {
                None
            } else if holds(a, H1) {
                Some(Ok(()))
            } else {
                fail("H4 holds but H1 fails".into())
            }
        }
        "h56_imply_h23" => {
            if !(holds(a, H5) && holds(a, H6)) {
                None
            } else if holds(a, H2) && holds(a, H3) {
                Some(Ok(()))
            } else {
                fail("H5 and H6 hold but H2 or H3 fails".into())
            }
        }
        "lemma5" => {
            let n = a.len();
            let one = |x| a.one_x(x);
            for y in 0..n {
                for x in 0..n {
                    let cases = [
                        ("1_x ≤ 1_xy", one(a.mult(x, y))),
                        ("1_x ≤ 1_yx", one(a.mult(y, x))),
                        ("1_x ≤ 1_x/y", one(a.rd(x, y))),
                        ("1_x ≤ 1_y\\x", one(a.ld(y, x))),
                    ];
                    if let Some((name, _)) = cases.iter().find(|(_, rhs)| !a.leq(one(x), *rhs)) {
                        return fail(format!("{name} fails at x = {}, y = {}", a.label(x), a.label(y)));
                    }
                }
            }
            Some(Ok(()))
        }
        "components" => {
            if !(holds(a, H1) && holds(a, H2) && holds(a, H3)) {
                return None;
            }
            let check = || -> Result<()> {
                a.component_partition()?;
                for p in a.positive_idempotents()? {
                    let c = a.extract_component(p)?;
                    if !c.is_integrally_closed() {
                        return Err(Error::PostconditionFailed(format!("component of {} is not integrally closed", a.label(p))));
                    }
                }
                Ok(())
            };
            Some(check().map_err(|e| e.to_string()))
        }
        "lemma4" => {
            let idp = match a.positive_idempotents() {
                Ok(v) => v,
                Err(e) => return fail(e.to_string()),
            };
            for p in idp {
                let r = a.closure_interior_audit(p);
                if let Some(c) = r.first_failure() {
                    return fail(format!(
                        "p = {}: {} at ({})",
                        a.label(p),
                        c.name,
                        c.witness.clone().unwrap_or_default().join(", ")
                    ));
                }
            }
            Some(Ok(()))
        }
        "roundtrip" => {
            let eligible = a.balanced() && (planted_bug || (holds(a, H4) && holds(a, H5) && holds(a, H6)));
            if !eligible {
                return None;
            }
            let options = DecomposeOptions {
                skip_identity_checks: planted_bug,
            };
            let result = decompose_with(a, options).and_then(|d| {
                let back = compose_residuated(&d.system)?;
                let embed = d.embedding(a.len());
                match a.first_disagreement(&back, &embed) {
                    None => Ok(()),
                    Some(w) => Err(Error::PostconditionFailed(format!("recomposition differs: {w}"))),
                }
            });
            Some(result.map_err(|e| e.to_string()))
        }
        _ => unreachable!("registry checked"),
    }
}

/// `None` when the relation is an order extending every component and O1–O3
/// hold, or when both fail; otherwise the direction that broke.
pub fn thm5_disagreement(sys: &DirectedSystemPair<FinitePoset>) -> Option<String> {
    let o_ok = sys.verify_o().ok();
    let rel = sys.sum_relation();
    let order_ok = rel.order_violation().is_none() && rel.extension_violation(&sys.components).is_none();
    match (o_ok, order_ok) {
        (true, false) => Some("O1–O3 hold but the relation is not an order extending the components".into()),
        (false, true) => Some("the relation is an order extending the components but O1–O3 fail".into()),
        _ => None,
    }
}

fn system_json(sys: &DirectedSystemPair<FinitePoset>) -> serde_json::Value {
    let idx = &sys.index;
    let comps: serde_json::Map<String, serde_json::Value> = (0..idx.len())
        .map(|p| {
            let c = &sys.components[p];
            let covers: Vec<(String, String)> =
                c.hasse().into_iter().map(|(x, y)| (c.label(x).to_string(), c.label(y).to_string())).collect();
            (idx.labels[p].clone(), serde_json::json!({ "elements": c.labels(), "leq": covers }))
        })
        .collect();
    let maps = |m: &std::collections::BTreeMap<(usize, usize), Vec<Elem>>| -> serde_json::Value {
        m.iter()
            .filter(|((p, q), _)| p != q)
            .map(|(&(p, q), f)| {
                let table: serde_json::Map<String, serde_json::Value> = f
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| {
                        (
                            sys.components[p].label(x).to_string(),
                            serde_json::Value::String(sys.components[q].label(y).to_string()),
                        )
                    })
                    .collect();
                (format!("{}<={}", idx.labels[p], idx.labels[q]), serde_json::Value::Object(table))
            })
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    serde_json::json!({
        "semilattice": {
            "elements": idx.labels,
            "join": (0..idx.len()).map(|p| (0..idx.len()).map(|q| idx.labels[idx.join(p, q)].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        },
        "components": comps,
        "phi": maps(&sys.phi),
        "psi": maps(&sys.psi),
    })
}

/// Counts of generated systems by whether O1–O3 hold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Thm5Counts {
    pub satisfying: usize,
    pub violating: usize,
}

/// Checks "sum relation is an order ⟺ O1–O3" over [`generate_systems`].
pub fn thm5_sweep(config: GeneratorConfig) -> (Thm5Counts, SweepOutcome) {
    let mut counts = Thm5Counts::default();
    let mut checked = 0;
    let mut counterexample = None;
    let mut batch: Vec<DirectedSystemPair<FinitePoset>> = Vec::new();
    let flush = |batch: &mut Vec<DirectedSystemPair<FinitePoset>>,
                     counts: &mut Thm5Counts,
                     checked: &mut usize,
                     counterexample: &mut Option<Counterexample>| {
        let results: Vec<(bool, Option<String>)> =
            batch.par_iter().map(|s| (s.verify_o().ok(), thm5_disagreement(s))).collect();
        for (s, (o_ok, bad)) in batch.iter().zip(results) {
            if counterexample.is_some() {
                break;
            }
            *checked += 1;
            if o_ok {
                counts.satisfying += 1;
            } else {
                counts.violating += 1;
            }
            if let Some(reason) = bad {
                *counterexample = Some(Counterexample {
                    reason,
                    instance: system_json(s),
                });
            }
        }
        batch.clear();
    };
    generate_systems(config, |s| {
        batch.push(s.clone());
        if batch.len() == 4096 {
            flush(&mut batch, &mut counts, &mut checked, &mut counterexample);
        }
    });
    flush(&mut batch, &mut counts, &mut checked, &mut counterexample);
    let outcome = SweepOutcome {
        property: "thm5_iff".into(),
        max_size: config.max_component_size,
        instances_checked: checked,
        eligible: checked,
        counterexample,
    };
    (counts, outcome)
}

/// Checks a registered property on every enumerated instance up to
/// `max_size`; the first failure in enumeration order is reported.
pub fn property_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    if !PROPERTIES.contains(&cfg.property.as_str()) {
        return Err(Error::UnknownProperty(cfg.property.clone()));
    }
    if cfg.property == "thm5_iff" {
        if cfg.max_size == 0 || cfg.max_size > 3 {
            return Err(Error::SizeBound {
                requested: cfg.max_size,
                max: 3,
            });
        }
        let mut config = GeneratorConfig {
            max_component_size: cfg.max_size,
            ..GeneratorConfig::default()
        };
        if let Some(b) = cfg.budget {
            config.budget_per_assignment = b;
        }
        return Ok(thm5_sweep(config).1);
    }
    let max = if cfg.budget.is_some() {
        MAX_BUDGETED_SIZE
    } else {
        MAX_RESIDUATED_SIZE
    };
    if cfg.max_size == 0 || cfg.max_size > max {
        return Err(Error::SizeBound {
            requested: cfg.max_size,
            max,
        });
    }
    let mut checked = 0;
    let mut eligible = 0;
    for n in 1..=cfg.max_size {
        let mut algebras = enumerate_residuated_posets(n, cfg.budget)?;
        if cfg.dedupe == Dedupe::UpToIsomorphism {
            let keys: Vec<Vec<usize>> = algebras.par_iter().map(algebra_canonical_key).collect();
            let mut seen = std::collections::BTreeSet::new();
            let mut keep = keys.into_iter().map(|k| seen.insert(k));
            algebras.retain(|_| keep.next().unwrap());
        }
        let verdicts: Vec<Verdict> = algebras
            .par_iter()
            .map(|a| check_algebra(&cfg.property, a, cfg.planted_bug))
            .collect();
        for (a, v) in algebras.iter().zip(verdicts) {
            checked += 1;
            match v {
                None => {}
                Some(Ok(())) => eligible += 1,
                Some(Err(reason)) => {
                    let file = AlgebraFile::from_algebra(format!("counterexample-{}", cfg.property), a, false);
                    return Ok(SweepOutcome {
                        property: cfg.property.clone(),
                        max_size: cfg.max_size,
                        instances_checked: checked,
                        eligible: eligible + 1,
                        counterexample: Some(Counterexample {
                            reason,
                            instance: serde_json::to_value(file).expect("algebra files serialize"),
                        }),
                    });
                }
            }
        }
    }
    Ok(SweepOutcome {
        property: cfg.property.clone(),
        max_size: cfg.max_size,
        instances_checked: checked,
        eligible,
        counterexample: None,
    })
}

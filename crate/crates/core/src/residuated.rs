//! Residuated posets `⟨A, ≤, ·, \, /, 1⟩` and the predicates and audits
//! defined on them: positive idempotents, the balanced conditions, the
//! quasi-equations and identities H1–H6, the component partition, and the
//! closure/interior operators attached to each positive idempotent.

use std::fmt;

use crate::error::{Error, Result, Side};
use crate::poset::{Extremum, FinitePoset};
use crate::report::Report;
use crate::signature::Algebra;
use crate::table::{first_failing_pair, first_failing_triple, pairs, Elem, Table};

/// Unvalidated parts of a candidate residuated poset, as read from a file.
#[derive(Debug, Clone)]
pub struct RawAlgebra {
    pub poset: FinitePoset,
    pub unit: Elem,
    pub mult: Table,
    pub ld: Option<Table>,
    pub rd: Option<Table>,
}

/// A validated finite residuated poset.
///
/// `ld.get(x, z)` is `x\z` and `rd.get(z, y)` is `z/y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResiduatedPoset {
    poset: FinitePoset,
    unit: Elem,
    mult: Table,
    ld: Table,
    rd: Table,
}

fn monoid_audit(poset: &FinitePoset, mult: &Table, unit: Elem) -> Result<()> {
    let n = poset.len();
    let lab = |v: &[Elem]| v.iter().map(|&e| poset.label(e).to_string()).collect::<Vec<_>>();
    if mult.size() != n || unit >= n {
        return Err(Error::Malformed("multiplication table does not match the carrier".into()));
    }
    if let Some(x) = (0..n).find(|&x| mult.get(unit, x) != x || mult.get(x, unit) != x) {
        return Err(Error::NotMonoid {
            law: "unit".into(),
            witness: lab(&[x]),
        });
    }
    if let Some((x, y, z)) =
        first_failing_triple(n, |x, y, z| mult.get(mult.get(x, y), z) == mult.get(x, mult.get(y, z)))
    {
        return Err(Error::NotMonoid {
            law: "associativity".into(),
            witness: lab(&[x, y, z]),
        });
    }
    if let Some(w) = monotone_witness(poset, mult) {
        return Err(Error::NotMonotone { witness: lab(&w) });
    }
    Ok(())
}

/// `(x, x', y)` with `x ≤ x'` but `x·y ≰ x'·y` or `y·x ≰ y·x'`.
fn monotone_witness(poset: &FinitePoset, mult: &Table) -> Option<[Elem; 3]> {
    let n = poset.len();
    first_failing_triple(n, |x, x2, y| {
        !poset.leq(x, x2)
            || (poset.leq(mult.get(x, y), mult.get(x2, y)) && poset.leq(mult.get(y, x), mult.get(y, x2)))
    })
    .map(|(x, x2, y)| [x, x2, y])
}

/// Greatest element among `candidates`, if any.
fn greatest(poset: &FinitePoset, candidates: impl Iterator<Item = Elem> + Clone) -> Option<Elem> {
    candidates
        .clone()
        .find(|&g| candidates.clone().all(|c| poset.leq(c, g)))
}

/// Residual tables without the monoid audit; `Err((x, z, side))` names the
/// first pair whose candidate set has no greatest element.
pub(crate) fn residuals_raw(
    poset: &FinitePoset,
    mult: &Table,
) -> std::result::Result<(Table, Table), (Elem, Elem, Side)> {
    let n = poset.len();
    let mut ld = Table::from_fn(n, |_, _| 0);
    let mut rd = Table::from_fn(n, |_, _| 0);
    for (x, z) in pairs(n) {
        let g = greatest(poset, (0..n).filter(|&y| poset.leq(mult.get(x, y), z))).ok_or((x, z, Side::Left))?;
        ld.set(x, z, g);
    }
    for (z, y) in pairs(n) {
        let g = greatest(poset, (0..n).filter(|&x| poset.leq(mult.get(x, y), z))).ok_or((z, y, Side::Right))?;
        rd.set(z, y, g);
    }
    Ok((ld, rd))
}

fn residuation_witness(poset: &FinitePoset, mult: &Table, ld: &Table, rd: &Table) -> Option<(Elem, Elem, Elem)> {
    first_failing_triple(poset.len(), |x, y, z| {
        let a = poset.leq(mult.get(x, y), z);
        a == poset.leq(x, rd.get(z, y)) && a == poset.leq(y, ld.get(x, z))
    })
}

/// Computes both residual tables of `mult` over `poset`.
///
/// The monoid and monotonicity laws are audited first; afterwards the full
/// three-way residuation equivalence is checked on every triple.
pub fn compute_residuals(poset: &FinitePoset, mult: &Table, unit: Elem) -> Result<(Table, Table)> {
    monoid_audit(poset, mult, unit)?;
    let (ld, rd) = residuals_raw(poset, mult).map_err(|(x, z, side)| Error::NotResiduated {
        x: poset.label(x).to_string(),
        z: poset.label(z).to_string(),
        side,
    })?;
    if let Some((x, y, z)) = residuation_witness(poset, mult, &ld, &rd) {
        return Err(Error::InternalInconsistency(format!(
            "computed residuals violate residuation at ({}, {}, {})",
            poset.label(x),
            poset.label(y),
            poset.label(z)
        )));
    }
    Ok((ld, rd))
}

/// Audits every residuated-poset law of `candidate`, naming the first
/// counterexample of each failed law.
pub fn verify_residuated_poset(candidate: &RawAlgebra) -> Report {
    let poset = &candidate.poset;
    let n = poset.len();
    let lab = |v: &[Elem]| v.iter().map(|&e| poset.label(e).to_string()).collect::<Vec<_>>();
    let mut report = Report::new("residuated poset");

    let shapes_ok = candidate.mult.size() == n
        && candidate.unit < n
        && candidate.ld.as_ref().is_none_or(|t| t.size() == n)
        && candidate.rd.as_ref().is_none_or(|t| t.size() == n);
    if !shapes_ok {
        report.fail("table shape", vec![format!("carrier has {n} elements")]);
        return report;
    }
    report.pass("table shape");
    let mult = &candidate.mult;
    let unit = candidate.unit;

    report.record(
        "unit",
        (0..n)
            .find(|&x| mult.get(unit, x) != x || mult.get(x, unit) != x)
            .map(|x| lab(&[x])),
    );
    report.record(
        "associativity",
        first_failing_triple(n, |x, y, z| mult.get(mult.get(x, y), z) == mult.get(x, mult.get(y, z)))
            .map(|(x, y, z)| lab(&[x, y, z])),
    );
    report.record("monotonicity", monotone_witness(poset, mult).map(|w| lab(&w)));

    let left = (0..n)
        .flat_map(|z| (0..n).map(move |x| (x, z)))
        .map(|(x, z)| (x, z, greatest(poset, (0..n).filter(|&y| poset.leq(mult.get(x, y), z)))))
        .collect::<Vec<_>>();
    let right = (0..n)
        .flat_map(|y| (0..n).map(move |z| (z, y)))
        .map(|(z, y)| (z, y, greatest(poset, (0..n).filter(|&x| poset.leq(mult.get(x, y), z)))))
        .collect::<Vec<_>>();
    let missing_left = left.iter().find(|t| t.2.is_none()).map(|t| lab(&[t.0, t.1]));
    let missing_right = right.iter().find(|t| t.2.is_none()).map(|t| lab(&[t.0, t.1]));
    report.record("left residuals exist", missing_left.clone());
    report.record("right residuals exist", missing_right.clone());

    let computed_ld = missing_left.is_none().then(|| {
        let mut t = Table::from_fn(n, |_, _| 0);
        for &(x, z, g) in &left {
            t.set(x, z, g.unwrap());
        }
        t
    });
    let computed_rd = missing_right.is_none().then(|| {
        let mut t = Table::from_fn(n, |_, _| 0);
        for &(z, y, g) in &right {
            t.set(z, y, g.unwrap());
        }
        t
    });

    let ld = candidate.ld.clone().or_else(|| computed_ld.clone());
    let rd = candidate.rd.clone().or_else(|| computed_rd.clone());
    match (&ld, &rd) {
        (Some(ld), Some(rd)) => report.record(
            "residuation law",
            residuation_witness(poset, mult, ld, rd).map(|(x, y, z)| lab(&[x, y, z])),
        ),
        _ => report.fail("residuation law", vec!["residual tables unavailable".into()]),
    }
    if let (Some(given), Some(computed)) = (&candidate.ld, &computed_ld) {
        report.record(
            "ld table matches recomputation",
            first_failing_pair(n, |x, z| given.get(x, z) == computed.get(x, z)).map(|(x, z)| lab(&[x, z])),
        );
    }
    if let (Some(given), Some(computed)) = (&candidate.rd, &computed_rd) {
        report.record(
            "rd table matches recomputation",
            first_failing_pair(n, |z, y| given.get(z, y) == computed.get(z, y)).map(|(z, y)| lab(&[z, y])),
        );
    }
    report
}

/// One of the conditions H1–H6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HCondition {
    /// `1_x = 1_y ⟹ 1_{xy} = 1_x`
    H1,
    /// `1_x = 1_y ⟹ 1_{x/y} = 1_x`
    H2,
    /// `1_x = 1_y ⟹ 1_{x\y} = 1_x`
    H3,
    /// `1_x·1_y = 1_{xy}`
    H4,
    /// `1_{x\y} = 1_x·1_y`
    H5,
    /// `1_{x/y} = 1_x·1_y`
    H6,
}

impl HCondition {
    pub const ALL: [HCondition; 6] = [
        HCondition::H1,
        HCondition::H2,
        HCondition::H3,
        HCondition::H4,
        HCondition::H5,
        HCondition::H6,
    ];

    pub fn from_index(k: u8) -> Option<Self> {
        Self::ALL.get(usize::from(k).checked_sub(1)?).copied()
    }
}

impl fmt::Display for HCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Outcome of [`ResiduatedPoset::check_h`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HCheck {
    pub holds: bool,
    pub witness: Option<(Elem, Elem)>,
}

/// One of the nine equivalent forms of balance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceCondition {
    pub number: u8,
    pub statement: &'static str,
    pub holds: bool,
    pub witness: Option<Vec<Elem>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedReport {
    /// Whether `x\x = x/x` for all `x`.
    pub verdict: bool,
    pub conditions: Vec<BalanceCondition>,
}

impl BalancedReport {
    /// Whether all nine evaluations coincide.
    pub fn agree(&self) -> bool {
        self.conditions.iter().all(|c| c.holds == self.verdict)
    }
}

/// The partition of a residuated poset by `a ↦ a\a` together with the sets
/// attached to each positive idempotent. All vectors are indexed like `idp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    pub idp: Vec<Elem>,
    /// `A_p = {a : a\a = p}`
    pub classes: Vec<Vec<Elem>>,
    /// `{a : a/a = p}`
    pub left_classes: Vec<Vec<Elem>>,
    /// `pA`
    pub left_multiples: Vec<Vec<Elem>>,
    /// `Ap`
    pub right_multiples: Vec<Vec<Elem>>,
    /// `p\A`
    pub ld_image: Vec<Vec<Elem>>,
    /// `A/p`
    pub rd_image: Vec<Vec<Elem>>,
}

impl ComponentPartition {
    /// Position in `idp` of the class containing `a`.
    pub fn class_of(&self, a: Elem) -> usize {
        self.classes.iter().position(|c| c.contains(&a)).expect("classes cover the carrier")
    }
}

fn sorted(mut v: Vec<Elem>) -> Vec<Elem> {
    v.sort_unstable();
    v.dedup();
    v
}

impl ResiduatedPoset {
    /// Builds a residuated poset from its order and multiplication, computing
    /// the residuals.
    pub fn new(poset: FinitePoset, unit: Elem, mult: Table) -> Result<Self> {
        let (ld, rd) = compute_residuals(&poset, &mult, unit)?;
        Ok(ResiduatedPoset {
            poset,
            unit,
            mult,
            ld,
            rd,
        })
    }

    /// Validates a candidate; supplied residual tables must match the
    /// recomputed ones.
    pub fn from_raw(raw: RawAlgebra) -> Result<Self> {
        let (ld, rd) = compute_residuals(&raw.poset, &raw.mult, raw.unit)?;
        for (given, computed, name) in [(&raw.ld, &ld, "ld"), (&raw.rd, &rd, "rd")] {
            if let Some(given) = given {
                if given.size() != computed.size() {
                    return Err(Error::Malformed(format!("{name} table has the wrong size")));
                }
                if let Some((a, b)) = first_failing_pair(computed.size(), |a, b| given.get(a, b) == computed.get(a, b)) {
                    return Err(Error::InternalInconsistency(format!(
                        "supplied {name} table differs from the recomputed residual at ({}, {})",
                        raw.poset.label(a),
                        raw.poset.label(b)
                    )));
                }
            }
        }
        Ok(ResiduatedPoset {
            poset: raw.poset,
            unit: raw.unit,
            mult: raw.mult,
            ld,
            rd,
        })
    }

    pub(crate) fn from_parts_unchecked(poset: FinitePoset, unit: Elem, mult: Table, ld: Table, rd: Table) -> Self {
        ResiduatedPoset {
            poset,
            unit,
            mult,
            ld,
            rd,
        }
    }

    pub fn to_raw(&self) -> RawAlgebra {
        RawAlgebra {
            poset: self.poset.clone(),
            unit: self.unit,
            mult: self.mult.clone(),
            ld: Some(self.ld.clone()),
            rd: Some(self.rd.clone()),
        }
    }

    pub fn with_labels(&self, labels: Vec<String>) -> Result<Self> {
        Ok(ResiduatedPoset {
            poset: self.poset.with_labels(labels)?,
            ..self.clone()
        })
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.poset.leq(x, y)
    }

    pub fn lookup(&self, label: &str) -> Result<Elem> {
        self.poset.lookup(label)
    }

    pub fn mult_table(&self) -> &Table {
        &self.mult
    }

    pub fn ld_table(&self) -> &Table {
        &self.ld
    }

    pub fn rd_table(&self) -> &Table {
        &self.rd
    }

    /// `1_x = x/x`.
    pub fn one_x(&self, x: Elem) -> Elem {
        self.rd.get(x, x)
    }

    /// Sorted positive idempotents `{p : 1 ≤ p, pp = p}`, cross-checked
    /// against `{a/a}` and `{a\a}`.
    pub fn positive_idempotents(&self) -> Result<Vec<Elem>> {
        let n = self.len();
        let direct: Vec<Elem> = (0..n)
            .filter(|&p| self.leq(self.unit, p) && self.mult.get(p, p) == p)
            .collect();
        let via_rd = sorted((0..n).map(|a| self.rd.get(a, a)).collect());
        let via_ld = sorted((0..n).map(|a| self.ld.get(a, a)).collect());
        if direct != via_rd || direct != via_ld {
            return Err(Error::InternalInconsistency(
                "positive idempotents differ from {a/a} or {a\\a}".into(),
            ));
        }
        Ok(direct)
    }

    fn idp_unchecked(&self) -> Vec<Elem> {
        (0..self.len())
            .filter(|&p| self.leq(self.unit, p) && self.mult.get(p, p) == p)
            .collect()
    }

    /// Evaluates `x\x = x/x` and the eight other equivalent conditions
    /// independently.
    pub fn is_balanced(&self) -> BalancedReport {
        let n = self.len();
        let idp = self.idp_unchecked();
        let set_eq = |f: &dyn Fn(Elem, Elem) -> bool, g: &dyn Fn(Elem, Elem) -> bool| {
            idp.iter()
                .flat_map(|&p| (0..n).map(move |a| (a, p)))
                .find(|&(a, p)| f(a, p) != g(a, p))
                .map(|(a, p)| vec![a, p])
        };
        let image_eq = |f: &dyn Fn(Elem, Elem) -> Elem, g: &dyn Fn(Elem, Elem) -> Elem| {
            idp.iter()
                .flat_map(|&p| (0..n).map(move |a| (a, p)))
                .find(|&(a, p)| (0..n).any(|b| f(b, p) == a) != (0..n).any(|b| g(b, p) == a))
                .map(|(a, p)| vec![a, p])
        };
        let pointwise = |f: &dyn Fn(Elem, Elem) -> bool| {
            idp.iter()
                .flat_map(|&p| (0..n).map(move |a| (a, p)))
                .find(|&(a, p)| !f(a, p))
                .map(|(a, p)| vec![a, p])
        };
        let m = |x, y| self.mult.get(x, y);
        let ld = |x, y| self.ld.get(x, y);
        let rd = |x, y| self.rd.get(x, y);

        let mut conditions = Vec::with_capacity(9);
        let mut push = |number, statement, witness: Option<Vec<Elem>>| {
            conditions.push(BalanceCondition {
                number,
                statement,
                holds: witness.is_none(),
                witness,
            })
        };
        push(1, "x\\x = x/x", (0..n).find(|&x| ld(x, x) != rd(x, x)).map(|x| vec![x]));
        push(
            2,
            "{a : a/a = p} = A_p for every positive idempotent p",
            set_eq(&|a, p| rd(a, a) == p, &|a, p| ld(a, a) == p),
        );
        push(3, "p\\A = A/p", image_eq(&|b, p| ld(p, b), &|b, p| rd(b, p)));
        push(4, "p\\a = a iff a/p = a", set_eq(&|a, p| ld(p, a) == a, &|a, p| rd(a, p) == a));
        push(5, "pa = a iff ap = a", set_eq(&|a, p| m(p, a) == a, &|a, p| m(a, p) == a));
        push(6, "p\\a = a/p", pointwise(&|a, p| ld(p, a) == rd(a, p)));
        push(7, "pa = ap", pointwise(&|a, p| m(p, a) == m(a, p)));
        push(
            8,
            "(x\\x)y = y(x\\x)",
            first_failing_pair(n, |x, y| m(ld(x, x), y) == m(y, ld(x, x))).map(|(x, y)| vec![x, y]),
        );
        push(
            9,
            "(x/x)y = y(x/x)",
            first_failing_pair(n, |x, y| m(rd(x, x), y) == m(y, rd(x, x))).map(|(x, y)| vec![x, y]),
        );
        BalancedReport {
            verdict: conditions[0].holds,
            conditions,
        }
    }

    pub fn balanced(&self) -> bool {
        (0..self.len()).all(|x| self.ld.get(x, x) == self.rd.get(x, x))
    }

    /// Checks one of H1–H6 over all pairs; the witness is the first failing
    /// pair in colexicographic order.
    pub fn check_h(&self, k: HCondition) -> HCheck {
        let one = |x| self.one_x(x);
        let m = |x, y| self.mult.get(x, y);
        let witness = first_failing_pair(self.len(), |x, y| match k {
            HCondition::H1 => one(x) != one(y) || one(m(x, y)) == one(x),
            HCondition::H2 => one(x) != one(y) || one(self.rd.get(x, y)) == one(x),
            HCondition::H3 => one(x) != one(y) || one(self.ld.get(x, y)) == one(x),
            HCondition::H4 => m(one(x), one(y)) == one(m(x, y)),
            HCondition::H5 => one(self.ld.get(x, y)) == m(one(x), one(y)),
            HCondition::H6 => one(self.rd.get(x, y)) == m(one(x), one(y)),
        });
        HCheck {
            holds: witness.is_none(),
            witness,
        }
    }

    /// `x\x = 1` for all `x`, equivalently `Idp A = {1}`.
    pub fn is_integrally_closed(&self) -> bool {
        let by_idp = self.idp_unchecked() == vec![self.unit];
        debug_assert_eq!(by_idp, (0..self.len()).all(|x| self.ld.get(x, x) == self.unit));
        by_idp
    }

    /// Computes the partition into classes `A_p` and asserts the set
    /// equalities relating `A_p`, `pA`, `Ap`, `p\A` and `A/p`.
    pub fn component_partition(&self) -> Result<ComponentPartition> {
        let n = self.len();
        let idp = self.positive_idempotents()?;
        let all = || 0..n;
        let classes: Vec<Vec<Elem>> = idp
            .iter()
            .map(|&p| all().filter(|&a| self.ld.get(a, a) == p).collect())
            .collect();
        let left_classes: Vec<Vec<Elem>> = idp
            .iter()
            .map(|&p| all().filter(|&a| self.rd.get(a, a) == p).collect())
            .collect();
        let left_multiples: Vec<_> = idp.iter().map(|&p| sorted(all().map(|a| self.mult.get(p, a)).collect())).collect();
        let right_multiples: Vec<_> = idp.iter().map(|&p| sorted(all().map(|a| self.mult.get(a, p)).collect())).collect();
        let ld_image: Vec<_> = idp.iter().map(|&p| sorted(all().map(|a| self.ld.get(p, a)).collect())).collect();
        let rd_image: Vec<_> = idp.iter().map(|&p| sorted(all().map(|a| self.rd.get(a, p)).collect())).collect();

        let fail = |what: String| Err(Error::InternalInconsistency(what));
        for part in [&classes, &left_classes] {
            let mut seen = vec![0usize; n];
            for c in part {
                for &a in c {
                    seen[a] += 1;
                }
            }
            if let Some(a) = (0..n).find(|&a| seen[a] != 1) {
                return fail(format!("classes do not partition the carrier at {}", self.poset.label(a)));
            }
        }
        for (i, &p) in idp.iter().enumerate() {
            let pl = self.poset.label(p);
            if !classes[i].contains(&p) {
                return fail(format!("{pl} is not in its own class"));
            }
            let rd_fixed: Vec<Elem> = all().filter(|&a| self.rd.get(a, p) == a).collect();
            let rd_below: Vec<Elem> = all().filter(|&a| self.leq(a, self.rd.get(a, p))).collect();
            let absorbs_right_le: Vec<Elem> = all().filter(|&a| self.leq(self.mult.get(a, p), a)).collect();
            let absorbs_right: Vec<Elem> = all().filter(|&a| self.mult.get(a, p) == a).collect();
            for (name, set) in [
                ("{a : a = a/p}", &rd_fixed),
                ("{a : a ≤ a/p}", &rd_below),
                ("{a : ap ≤ a}", &absorbs_right_le),
                ("{a : ap = a}", &absorbs_right),
                ("Ap", &right_multiples[i]),
            ] {
                if *set != rd_image[i] {
                    return fail(format!("A/{pl} ≠ {name}"));
                }
            }
            let ld_fixed: Vec<Elem> = all().filter(|&a| self.ld.get(p, a) == a).collect();
            let ld_below: Vec<Elem> = all().filter(|&a| self.leq(a, self.ld.get(p, a))).collect();
            let absorbs_left_le: Vec<Elem> = all().filter(|&a| self.leq(self.mult.get(p, a), a)).collect();
            let absorbs_left: Vec<Elem> = all().filter(|&a| self.mult.get(p, a) == a).collect();
            for (name, set) in [
                ("{a : a = p\\a}", &ld_fixed),
                ("{a : a ≤ p\\a}", &ld_below),
                ("{a : pa ≤ a}", &absorbs_left_le),
                ("{a : pa = a}", &absorbs_left),
                ("pA", &left_multiples[i]),
            ] {
                if *set != ld_image[i] {
                    return fail(format!("{pl}\\A ≠ {name}"));
                }
            }

            let union_above = |part: &[Vec<Elem>], strict: bool| {
                sorted(
                    idp.iter()
                        .enumerate()
                        .filter(|&(_, &q)| self.leq(p, q) && !(strict && q == p))
                        .flat_map(|(j, _)| part[j].iter().copied())
                        .collect(),
                )
            };
            if rd_image[i] != union_above(&classes, false) {
                return fail(format!("A/{pl} ≠ ⋃ A_q over q ≥ {pl}"));
            }
            let rest: Vec<Elem> = rd_image[i]
                .iter()
                .copied()
                .filter(|a| !union_above(&classes, true).contains(a))
                .collect();
            if rest != classes[i] {
                return fail(format!("A_{pl} ≠ (A/{pl}) minus ⋃ A_q over q > {pl}"));
            }
            if ld_image[i] != union_above(&left_classes, false) {
                return fail(format!("{pl}\\A ≠ ⋃ qA over q ≥ {pl}"));
            }
            let rest: Vec<Elem> = ld_image[i]
                .iter()
                .copied()
                .filter(|a| !union_above(&left_classes, true).contains(a))
                .collect();
            if rest != left_classes[i] {
                return fail(format!("{pl}A ≠ ({pl}\\A) minus ⋃ qA over q > {pl}"));
            }
        }
        if self.balanced() && classes != left_classes {
            return fail("balanced algebra with differing left and right classes".into());
        }
        Ok(ComponentPartition {
            idp,
            classes,
            left_classes,
            left_multiples,
            right_multiples,
            ld_image,
            rd_image,
        })
    }

    /// Verifies that the algebra is balanced and satisfies H1–H3, the
    /// conditions under which every class is closed under the operations.
    pub fn require_component_closure(&self) -> Result<()> {
        if let Some(x) = (0..self.len()).find(|&x| self.ld.get(x, x) != self.rd.get(x, x)) {
            return Err(Error::precondition("balanced", Some(self.labels_of(&[x]))));
        }
        for k in [HCondition::H1, HCondition::H2, HCondition::H3] {
            if let Some((x, y)) = self.check_h(k).witness {
                return Err(Error::precondition(k.to_string(), Some(self.labels_of(&[x, y]))));
            }
        }
        Ok(())
    }

    /// The `p`-component: `A_p` with the restricted order and operations and
    /// unit `p`.
    pub fn extract_component(&self, p: Elem) -> Result<ResiduatedPoset> {
        self.require_component_closure()?;
        self.component_unchecked(p)
    }

    pub(crate) fn component_unchecked(&self, p: Elem) -> Result<ResiduatedPoset> {
        if p >= self.len() || !self.idp_unchecked().contains(&p) {
            return Err(Error::precondition(
                "component index is a positive idempotent",
                (p < self.len()).then(|| self.labels_of(&[p])),
            ));
        }
        let members: Vec<Elem> = (0..self.len()).filter(|&a| self.ld.get(a, a) == p).collect();
        let local = |a: Elem| members.iter().position(|&m| m == a);
        let k = members.len();
        let mut tables = Vec::new();
        for (sym, table) in [("·", &self.mult), ("\\", &self.ld), ("/", &self.rd)] {
            let mut t = Table::from_fn(k, |_, _| 0);
            for i in 0..k {
                for j in 0..k {
                    let v = table.get(members[i], members[j]);
                    let Some(l) = local(v) else {
                        return Err(Error::precondition(
                            format!("class of {} closed under {sym}", self.poset.label(p)),
                            Some(self.labels_of(&[members[i], members[j]])),
                        ));
                    };
                    t.set(i, j, l);
                }
            }
            tables.push(t);
        }
        let rd = tables.pop().unwrap();
        let ld = tables.pop().unwrap();
        let mult = tables.pop().unwrap();
        let component = ResiduatedPoset::from_raw(RawAlgebra {
            poset: self.poset.restrict(&members),
            unit: local(p).unwrap(),
            mult,
            ld: Some(ld),
            rd: Some(rd),
        })
        .map_err(|e| Error::PostconditionFailed(format!("component {}: {e}", self.poset.label(p))))?;
        if !component.is_integrally_closed() {
            return Err(Error::PostconditionFailed(format!(
                "component {} is not integrally closed",
                self.poset.label(p)
            )));
        }
        Ok(component)
    }

    /// Audits the closure operators `a ↦ pa`, `a ↦ ap` and the interior
    /// operators `a ↦ p\a`, `a ↦ a/p`, including preservation of every
    /// existing join (resp. meet) of every subset.
    pub fn closure_interior_audit(&self, p: Elem) -> Report {
        let n = self.len();
        let pl = self.poset.label(p).to_string();
        let mut report = Report::new(format!("closure/interior operators at {pl}"));
        if !self.idp_unchecked().contains(&p) {
            report.fail("positive idempotent", vec![pl]);
            return report;
        }
        let lab = |v: &[Elem]| self.labels_of(v);
        let subsets: Vec<Vec<Elem>> = (0u64..(1u64 << n))
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
            .collect();

        let maps: [(&str, bool, Box<dyn Fn(Elem) -> Elem + '_>); 4] = [
            ("a ↦ pa", true, Box::new(|a| self.mult.get(p, a))),
            ("a ↦ ap", true, Box::new(|a| self.mult.get(a, p))),
            ("a ↦ p\\a", false, Box::new(|a| self.ld.get(p, a))),
            ("a ↦ a/p", false, Box::new(|a| self.rd.get(a, p))),
        ];
        let mut images = Vec::new();
        for (name, closure, f) in &maps {
            let inflationary = (0..n).find(|&a| {
                if *closure {
                    !self.leq(a, f(a))
                } else {
                    !self.leq(f(a), a)
                }
            });
            report.record(
                format!("{name} {}", if *closure { "extensive" } else { "deflationary" }),
                inflationary.map(|a| lab(&[a])),
            );
            report.record(format!("{name} idempotent"), (0..n).find(|&a| f(f(a)) != f(a)).map(|a| lab(&[a])));
            report.record(
                format!("{name} monotone"),
                first_failing_pair(n, |a, b| !self.leq(a, b) || self.leq(f(a), f(b))).map(|(a, b)| lab(&[a, b])),
            );
            let kind = if *closure { Extremum::Join } else { Extremum::Meet };
            let broken = subsets.iter().find(|s| match self.poset.extremum(s, kind) {
                None => false,
                Some(e) => {
                    let mapped: Vec<Elem> = s.iter().map(|&a| f(a)).collect();
                    self.poset.extremum(&mapped, kind) != Some(f(e))
                }
            });
            report.record(
                format!("{name} preserves existing {}", if *closure { "joins" } else { "meets" }),
                broken.map(|s| lab(s)),
            );
            images.push(sorted((0..n).map(f).collect::<Vec<_>>()));
        }
        let p_a = sorted((0..n).map(|a| self.mult.get(p, a)).collect());
        let a_p = sorted((0..n).map(|a| self.mult.get(a, p)).collect());
        let check_image = |i: usize, expected: &Vec<Elem>| {
            (images[i] != *expected).then(|| {
                let diff: Vec<Elem> = (0..n).filter(|a| images[i].contains(a) != expected.contains(a)).collect();
                lab(&diff[..1])
            })
        };
        report.record("image of a ↦ pa is pA", check_image(0, &p_a));
        report.record("image of a ↦ ap is Ap", check_image(1, &a_p));
        report.record("image of a ↦ p\\a is pA", check_image(2, &p_a));
        report.record("image of a ↦ a/p is Ap", check_image(3, &a_p));
        for (name, set) in [("pA", &p_a), ("Ap", &a_p)] {
            for kind in [Extremum::Meet, Extremum::Join] {
                let escaped = subsets.iter().find(|s| {
                    s.iter().all(|a| set.contains(a))
                        && self.poset.extremum(s, kind).is_some_and(|e| !set.contains(&e))
                });
                report.record(
                    format!("{name} closed under existing {}", if kind == Extremum::Meet { "meets" } else { "joins" }),
                    escaped.map(|s| lab(s)),
                );
            }
        }
        report
    }
}

impl ResiduatedPoset {
    /// First difference between `self` and `other` under `a ↦ embed[a]`,
    /// comparing order, unit and all three operation tables.
    pub fn first_disagreement(&self, other: &ResiduatedPoset, embed: &[Elem]) -> Option<String> {
        let n = self.len();
        if other.len() != n || embed.len() != n {
            return Some(format!("sizes {} and {}", n, other.len()));
        }
        let mut seen = vec![false; n];
        for &e in embed {
            if e >= n || std::mem::replace(&mut seen[e], true) {
                return Some("embedding is not a bijection".into());
            }
        }
        let l = |a: Elem| self.poset.label(a).to_string();
        if embed[self.unit] != other.unit {
            return Some("unit".into());
        }
        let checks: [(&str, &dyn Fn(Elem, Elem) -> bool); 4] = [
            ("≤", &|x, y| self.leq(x, y) == other.leq(embed[x], embed[y])),
            ("·", &|x, y| embed[self.mult(x, y)] == other.mult(embed[x], embed[y])),
            ("\\", &|x, y| embed[self.ld(x, y)] == other.ld(embed[x], embed[y])),
            ("/", &|x, y| embed[self.rd(x, y)] == other.rd(embed[x], embed[y])),
        ];
        checks.iter().find_map(|(name, ok)| {
            first_failing_pair(n, ok).map(|(x, y)| format!("{name} at ({}, {})", l(x), l(y)))
        })
    }
}

impl Algebra for ResiduatedPoset {
    fn size(&self) -> usize {
        self.len()
    }
    fn label(&self, e: Elem) -> &str {
        self.poset.label(e)
    }
    fn unit(&self) -> Elem {
        self.unit
    }
    fn mult(&self, x: Elem, y: Elem) -> Elem {
        self.mult.get(x, y)
    }
    fn ld(&self, x: Elem, z: Elem) -> Elem {
        self.ld.get(x, z)
    }
    fn rd(&self, z: Elem, y: Elem) -> Elem {
        self.rd.get(z, y)
    }
}

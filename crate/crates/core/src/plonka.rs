//! Left normal bands, partition functions and partition systems,
//! metamorphisms, semilattice directed systems of metamorphisms, Płonka sums,
//! and the decomposition of balanced residuated posets satisfying H4–H6.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::order_sum::DirectedSystemPair;
use crate::report::Report;
use crate::residuated::{HCondition, ResiduatedPoset};
use crate::signature::{Algebra, Signature, Symbol};
use crate::table::{first_failing_pair, first_failing_triple, Elem, MapTable, Table};

/// A binary operation intended to be a left normal band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandTable(pub Table);

impl BandTable {
    pub fn from_fn(n: usize, f: impl FnMut(Elem, Elem) -> Elem) -> Self {
        BandTable(Table::from_fn(n, f))
    }

    #[inline]
    pub fn apply(&self, a: Elem, b: Elem) -> Elem {
        self.0.get(a, b)
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    /// Left projection `a ⊙ b = a`.
    pub fn left_projection(n: usize) -> Self {
        BandTable::from_fn(n, |a, _| a)
    }

    /// `a ≤ b` iff `b ⊙ a = b`.
    pub fn preorder(&self, a: Elem, b: Elem) -> bool {
        self.apply(b, a) == b
    }

    pub fn equivalent(&self, a: Elem, b: Elem) -> bool {
        self.preorder(a, b) && self.preorder(b, a)
    }

    /// `b ⊙ a₁ ⊙ … ⊙ aₙ`, bracketed to the left.
    pub fn fold(&self, b: Elem, args: &[Elem]) -> Elem {
        args.iter().fold(b, |acc, &a| self.apply(acc, a))
    }
}

/// Band laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandLaw {
    /// `a ⊙ a = a`
    PF1,
    /// `a ⊙ (b ⊙ c) = (a ⊙ b) ⊙ c`
    PF2,
    /// `a ⊙ (b ⊙ c) = a ⊙ (c ⊙ b)`
    PF3,
}

impl fmt::Display for BandLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandVerdict {
    pub holds: bool,
    pub failure: Option<(BandLaw, [Elem; 3])>,
}

/// Checks PF1–PF3 in that order; reports the first failing triple
/// `(a, b, c)` of the first failing law.
pub fn verify_left_normal_band(op: &BandTable) -> BandVerdict {
    let n = op.size();
    let f = |a, b| op.apply(a, b);
    let failure = (0..n)
        .find(|&a| f(a, a) != a)
        .map(|a| (BandLaw::PF1, [a, a, a]))
        .or_else(|| {
            first_failing_triple(n, |a, b, c| f(a, f(b, c)) == f(f(a, b), c)).map(|(a, b, c)| (BandLaw::PF2, [a, b, c]))
        })
        .or_else(|| {
            first_failing_triple(n, |a, b, c| f(a, f(b, c)) == f(a, f(c, b))).map(|(a, b, c)| (BandLaw::PF3, [a, b, c]))
        });
    BandVerdict {
        holds: failure.is_none(),
        failure,
    }
}

/// A finite join semilattice on positions `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSemilattice {
    pub labels: Vec<String>,
    pub join: Table,
    pub least: Option<usize>,
}

impl IndexSemilattice {
    /// Builds the semilattice and locates its least element.
    pub fn new(labels: Vec<String>, join: Table) -> Result<Self> {
        if join.size() != labels.len() {
            return Err(Error::Malformed("join table does not match the index set".into()));
        }
        let k = labels.len();
        let least = (0..k).find(|&b| (0..k).all(|i| join.get(b, i) == i));
        let s = IndexSemilattice { labels, join, least };
        if let Some(problem) = s.validate() {
            return Err(Error::Malformed(problem));
        }
        Ok(s)
    }

    /// The `k`-element chain `0 < 1 < … < k-1`.
    pub fn chain(labels: Vec<String>) -> Self {
        let k = labels.len();
        IndexSemilattice {
            labels,
            join: Table::from_fn(k, |a, b| a.max(b)),
            least: (k > 0).then_some(0),
        }
    }

    /// Describes the first violated semilattice law, if any.
    pub fn validate(&self) -> Option<String> {
        let k = self.len();
        let j = |a, b| self.join.get(a, b);
        if let Some(a) = (0..k).find(|&a| j(a, a) != a) {
            return Some(format!("join is not idempotent at {}", self.labels[a]));
        }
        if let Some((a, b)) = first_failing_pair(k, |a, b| j(a, b) == j(b, a)) {
            return Some(format!("join is not commutative at ({}, {})", self.labels[a], self.labels[b]));
        }
        if let Some((a, b, c)) = first_failing_triple(k, |a, b, c| j(j(a, b), c) == j(a, j(b, c))) {
            return Some(format!(
                "join is not associative at ({}, {}, {})",
                self.labels[a], self.labels[b], self.labels[c]
            ));
        }
        if let Some(l) = self.least {
            if let Some(i) = (0..k).find(|&i| j(l, i) != i) {
                return Some(format!("{} is not least: fails against {}", self.labels[l], self.labels[i]));
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join.get(a, b)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.join.get(a, b) == b
    }

    /// All pairs `p ≤ q`, including `p = q`, ordered by `p` then `q`.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        (0..k)
            .flat_map(|p| (0..k).map(move |q| (p, q)))
            .filter(|&(p, q)| self.leq(p, q))
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// The quotient of a left normal band by its induced equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSemilattice {
    /// Classes ordered by representative.
    pub classes: Vec<Vec<Elem>>,
    pub representatives: Vec<Elem>,
    /// `class_of[a]` is the position of `a`'s class.
    pub class_of: Vec<usize>,
    pub semilattice: IndexSemilattice,
}

/// Quotients `A` by `≡_⊙`. A class containing an element of `preferred` is
/// represented by it; other classes by their least element index.
pub fn induced_semilattice(op: &BandTable, labels: &[String], preferred: &[Elem]) -> Result<InducedSemilattice> {
    if let Some((law, w)) = verify_left_normal_band(op).failure {
        return Err(Error::precondition(
            format!("left normal band ({law})"),
            Some(w.iter().map(|&e| labels[e].clone()).collect()),
        ));
    }
    let n = op.size();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<Elem>> = Vec::new();
    for a in 0..n {
        if class_of[a] != usize::MAX {
            continue;
        }
        let members: Vec<Elem> = (a..n).filter(|&b| op.equivalent(a, b)).collect();
        for &m in &members {
            class_of[m] = classes.len();
        }
        classes.push(members);
    }
    let mut reps: Vec<Elem> = classes
        .iter()
        .map(|c| c.iter().copied().find(|e| preferred.contains(e)).unwrap_or(c[0]))
        .collect();
    // order classes by representative
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&i| reps[i]);
    let classes: Vec<Vec<Elem>> = order.iter().map(|&i| classes[i].clone()).collect();
    reps = order.iter().map(|&i| reps[i]).collect();
    for (pos, c) in classes.iter().enumerate() {
        for &m in c {
            class_of[m] = pos;
        }
    }
    let k = classes.len();
    let mut join = Table::from_fn(k, |_, _| 0);
    for i in 0..k {
        for j in 0..k {
            let target = class_of[op.apply(reps[i], reps[j])];
            // congruence: every pair of members lands in the same class
            for &a in &classes[i] {
                for &b in &classes[j] {
                    if class_of[op.apply(a, b)] != target {
                        return Err(Error::InternalInconsistency(format!(
                            "band equivalence is not a congruence at ({}, {})",
                            labels[a], labels[b]
                        )));
                    }
                }
            }
            join.set(i, j, target);
        }
    }
    let semilattice = IndexSemilattice::new(reps.iter().map(|&r| labels[r].clone()).collect(), join)
        .map_err(|e| Error::InternalInconsistency(format!("band quotient: {e}")))?;
    Ok(InducedSemilattice {
        classes,
        representatives: reps,
        class_of,
        semilattice,
    })
}

/// An assignment of one band per argument position of each operation symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSystem {
    pub bands: BTreeMap<String, BandTable>,
    pub assignment: BTreeMap<Symbol, Vec<String>>,
}

impl PartitionSystem {
    /// The classic case: one band at every position of every symbol.
    pub fn single(op: BandTable, signature: Signature) -> Self {
        let name = "⊙".to_string();
        let assignment = signature
            .symbols()
            .iter()
            .map(|&s| (s, vec![name.clone(); s.arity() + 1]))
            .collect();
        PartitionSystem {
            bands: BTreeMap::from([(name, op)]),
            assignment,
        }
    }

    pub fn band(&self, sym: Symbol, position: usize) -> &BandTable {
        &self.bands[&self.assignment[&sym][position]]
    }
}

fn lab<A: Algebra + ?Sized>(alg: &A, v: &[Elem]) -> Vec<String> {
    v.iter().map(|&e| alg.label(e).to_string()).collect()
}

/// Checks band laws, compatibility, and PF4^σ, PF5^σ, PF6^ω over `signature`.
pub fn verify_partition_system<A: Algebra + ?Sized>(alg: &A, system: &PartitionSystem, signature: Signature) -> Report {
    let n = alg.size();
    let mut report = Report::new("partition system");
    for &sym in signature.symbols() {
        let ok = system.assignment.get(&sym).is_some_and(|names| {
            names.len() == sym.arity() + 1 && names.iter().all(|b| system.bands.get(b).is_some_and(|t| t.size() == n))
        });
        if !ok {
            report.fail(format!("assignment for {sym}"), vec![sym.name().to_string()]);
            return report;
        }
    }
    for (name, band) in &system.bands {
        let v = verify_left_normal_band(band);
        match v.failure {
            None => report.pass(format!("{name} is a left normal band")),
            Some((law, w)) => report.fail(format!("{name} is a left normal band ({law})"), lab(alg, &w)),
        }
    }
    let names: Vec<&String> = system.bands.keys().collect();
    for w in names.windows(2) {
        let (a, b) = (&system.bands[w[0]], &system.bands[w[1]]);
        report.record(
            format!("{} and {} compatible", w[0], w[1]),
            first_failing_pair(n, |x, y| a.equivalent(x, y) == b.equivalent(x, y)).map(|(x, y)| lab(alg, &[x, y])),
        );
    }
    for sym in signature.operations() {
        let b0 = system.band(sym, 0);
        let (b1, b2) = (system.band(sym, 1), system.band(sym, 2));
        report.record(
            format!("PF4[{sym}]"),
            first_failing_triple(n, |a1, a2, b| {
                b0.apply(alg.apply(sym, &[a1, a2]), b) == alg.apply(sym, &[b1.apply(a1, b), b2.apply(a2, b)])
            })
            .map(|(a1, a2, b)| lab(alg, &[a1, a2, b])),
        );
        report.record(
            format!("PF5[{sym}]"),
            first_failing_triple(n, |a1, a2, b| b0.apply(b, alg.apply(sym, &[a1, a2])) == b0.fold(b, &[a1, a2]))
                .map(|(a1, a2, b)| lab(alg, &[a1, a2, b])),
        );
    }
    for &sym in signature.symbols().iter().filter(|s| s.arity() == 0) {
        let b0 = system.band(sym, 0);
        let omega = alg.apply(sym, &[]);
        report.record(
            format!("PF6[{sym}]"),
            (0..n).find(|&b| b0.apply(b, omega) != b).map(|b| lab(alg, &[b])),
        );
    }
    report
}

/// Checks PF1–PF6 for a single band and, when they hold, materializes the
/// classic decomposition (partition, semilattice, homomorphisms
/// `a ↦ a ⊙ b` for `b` in the target class) and checks it.
pub fn verify_partition_function<A: Algebra + ?Sized>(alg: &A, op: &BandTable, signature: Signature) -> Report {
    let system = PartitionSystem::single(op.clone(), signature);
    let mut report = verify_partition_system(alg, &system, signature);
    report.title = "partition function".into();
    if !report.ok() {
        return report;
    }
    let labels: Vec<String> = (0..alg.size()).map(|e| alg.label(e).to_string()).collect();
    match partition_decomposition(alg, &system, signature) {
        Ok((induced, meta)) => {
            // the classic maps do not depend on the chosen element of the target class
            let independent = induced.semilattice.arrows().into_iter().find_map(|(i, j)| {
                induced.classes[i].iter().find_map(|&a| {
                    let first = op.apply(a, induced.classes[j][0]);
                    induced.classes[j]
                        .iter()
                        .find(|&&b| op.apply(a, b) != first)
                        .map(|&b| vec![labels[a].clone(), labels[b].clone()])
                })
            });
            report.record("maps independent of class representative", independent);
            let homomorphic = meta.xi.iter().find_map(|(&(p, q), m)| {
                m.maps.iter().find_map(|(sym, tuple)| {
                    tuple
                        .windows(2)
                        .any(|w| w[0] != w[1])
                        .then(|| vec![sym.name().to_string(), meta.index.labels[p].clone(), meta.index.labels[q].clone()])
                })
            });
            report.record("maps are homomorphisms", homomorphic);
            report.absorb("decomposition: ", verify_meta_system(&meta));
            match plonka_sum(&meta) {
                Ok(sum) => report.record("algebra is the Płonka sum", sum_mismatch(alg, &induced, &sum, signature)),
                Err(e) => report.fail("algebra is the Płonka sum", vec![e.to_string()]),
            }
        }
        Err(e) => report.fail("decomposition", vec![e.to_string()]),
    }
    report
}

/// First operation cell where `alg` differs from `sum` under
/// `a ↦ (class of a, a)`.
fn sum_mismatch<A: Algebra + ?Sized>(
    alg: &A,
    induced: &InducedSemilattice,
    sum: &PlonkaSum,
    signature: Signature,
) -> Option<Vec<String>> {
    let embed = |a: Elem| {
        let c = induced.class_of[a];
        sum.offsets[c] + induced.classes[c].iter().position(|&m| m == a).unwrap()
    };
    let n = alg.size();
    if signature.symbols().contains(&Symbol::Unit) && embed(alg.unit()) != sum.ops.unit() {
        return Some(vec!["1".into()]);
    }
    signature.operations().find_map(|sym| {
        first_failing_pair(n, |a, b| embed(alg.apply(sym, &[a, b])) == sum.ops.apply(sym, &[embed(a), embed(b)]))
            .map(|(a, b)| vec![sym.name().to_string(), alg.label(a).to_string(), alg.label(b).to_string()])
    })
}

/// Decomposition determined by a partition system: the classes of the
/// common band equivalence, the components with `ω^{A_p} = ω ⊙ p`, and the
/// metamorphisms `ξ^{σi}_{pq}(a) = a ⊙ᵢ^σ q`.
pub fn partition_decomposition<A: Algebra + ?Sized>(
    alg: &A,
    system: &PartitionSystem,
    signature: Signature,
) -> Result<(InducedSemilattice, MetaSystem<OpTables>)> {
    let labels: Vec<String> = (0..alg.size()).map(|e| alg.label(e).to_string()).collect();
    let first = system
        .bands
        .values()
        .next()
        .ok_or_else(|| Error::precondition("partition system has a band", None))?;
    let induced = induced_semilattice(first, &labels, &[])?;
    let local = |a: Elem| {
        let c = induced.class_of[a];
        induced.classes[c].iter().position(|&m| m == a).unwrap()
    };
    let mut components = Vec::new();
    for (pos, class) in induced.classes.iter().enumerate() {
        let p = induced.representatives[pos];
        let mut tables = BTreeMap::new();
        for sym in signature.operations() {
            let mut t = Table::from_fn(class.len(), |_, _| 0);
            for (i, &a) in class.iter().enumerate() {
                for (j, &b) in class.iter().enumerate() {
                    let v = alg.apply(sym, &[a, b]);
                    if induced.class_of[v] != pos {
                        return Err(Error::precondition(
                            format!("class of {} closed under {sym}", labels[p]),
                            Some(vec![labels[a].clone(), labels[b].clone()]),
                        ));
                    }
                    t.set(i, j, local(v));
                }
            }
            tables.insert(sym, t);
        }
        let unit = if signature.symbols().contains(&Symbol::Unit) {
            let u = system.band(Symbol::Unit, 0).apply(alg.unit(), p);
            if induced.class_of[u] != pos {
                return Err(Error::precondition(
                    format!("1 ⊙ {} lies in the class of {}", labels[p], labels[p]),
                    Some(vec![labels[u].clone()]),
                ));
            }
            local(u)
        } else {
            0
        };
        components.push(OpTables {
            labels: class.iter().map(|&a| labels[a].clone()).collect(),
            unit,
            tables,
        });
    }
    let mut xi = BTreeMap::new();
    for (p, q) in induced.semilattice.arrows() {
        let target = induced.representatives[q];
        let mut maps = BTreeMap::new();
        for &sym in signature.symbols() {
            let tuple = (0..=sym.arity())
                .map(|i| {
                    let band = system.band(sym, i);
                    induced.classes[p]
                        .iter()
                        .map(|&a| {
                            let v = band.apply(a, target);
                            if induced.class_of[v] == q {
                                Ok(local(v))
                            } else {
                                Err(Error::precondition(
                                    format!("a ⊙ {} lies in the class of {}", labels[target], labels[target]),
                                    Some(vec![labels[a].clone()]),
                                ))
                            }
                        })
                        .collect::<Result<MapTable>>()
                })
                .collect::<Result<Vec<_>>>()?;
            maps.insert(sym, tuple);
        }
        xi.insert((p, q), Metamorphism { maps });
    }
    let meta = MetaSystem {
        signature,
        index: induced.semilattice.clone(),
        components,
        xi,
    };
    Ok((induced, meta))
}

/// The bands `a ⊙ b = 1_b·a` and `a ⊗ b = 1_b\a` with the assignment
/// `1 ↦ ⟨⊙⟩`, `· ↦ ⟨⊙,⊙,⊙⟩`, `\ ↦ ⟨⊗,⊙,⊗⟩`, `/ ↦ ⟨⊗,⊗,⊙⟩`.
pub fn standard_partition_system(a: &ResiduatedPoset) -> Result<PartitionSystem> {
    require_h456(a, false)?;
    Ok(standard_bands_unchecked(a))
}

pub(crate) fn standard_bands_unchecked(a: &ResiduatedPoset) -> PartitionSystem {
    let n = a.len();
    let odot = BandTable::from_fn(n, |x, y| a.mult(a.one_x(y), x));
    let otimes = BandTable::from_fn(n, |x, y| a.ld(a.one_x(y), x));
    let (o, t) = ("⊙".to_string(), "⊗".to_string());
    PartitionSystem {
        bands: BTreeMap::from([(o.clone(), odot), (t.clone(), otimes)]),
        assignment: BTreeMap::from([
            (Symbol::Unit, vec![o.clone()]),
            (Symbol::Mul, vec![o.clone(), o.clone(), o.clone()]),
            (Symbol::Ld, vec![t.clone(), o.clone(), t.clone()]),
            (Symbol::Rd, vec![t.clone(), t, o]),
        ]),
    }
}

fn require_h456(a: &ResiduatedPoset, skip_identities: bool) -> Result<()> {
    if let Some(x) = (0..a.len()).find(|&x| a.ld(x, x) != a.rd(x, x)) {
        return Err(Error::precondition("balanced", Some(lab(a, &[x]))));
    }
    if skip_identities {
        return Ok(());
    }
    for k in [HCondition::H4, HCondition::H5, HCondition::H6] {
        if let Some((x, y)) = a.check_h(k).witness {
            return Err(Error::precondition(k.to_string(), Some(lab(a, &[x, y]))));
        }
    }
    Ok(())
}

/// Per-symbol tuples of maps from a source carrier to a target carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metamorphism {
    pub maps: BTreeMap<Symbol, Vec<MapTable>>,
}

impl Metamorphism {
    pub fn identity(n: usize, signature: Signature) -> Self {
        let id: MapTable = (0..n).collect();
        Metamorphism {
            maps: signature
                .symbols()
                .iter()
                .map(|&s| (s, vec![id.clone(); s.arity() + 1]))
                .collect(),
        }
    }

    /// `other ∘ self`, componentwise.
    pub fn then(&self, other: &Metamorphism) -> Metamorphism {
        Metamorphism {
            maps: self
                .maps
                .iter()
                .map(|(&s, tuple)| {
                    let composed = tuple
                        .iter()
                        .zip(&other.maps[&s])
                        .map(|(f, g)| f.iter().map(|&x| g[x]).collect())
                        .collect();
                    (s, composed)
                })
                .collect(),
        }
    }

    /// `⟨f, …, f⟩` for a homomorphism `f`.
    pub fn from_homomorphism(f: &MapTable, signature: Signature) -> Self {
        Metamorphism {
            maps: signature
                .symbols()
                .iter()
                .map(|&s| (s, vec![f.clone(); s.arity() + 1]))
                .collect(),
        }
    }
}

/// First argument tuple violating `f^{σ0}(σ^A(ā)) = σ^B(f^{σ1}(a₁), …)`.
pub fn metamorphism_violation<A: Algebra + ?Sized, B: Algebra + ?Sized>(
    f: &Metamorphism,
    source: &A,
    target: &B,
    signature: Signature,
) -> Option<(Symbol, Vec<Elem>)> {
    for &sym in signature.symbols() {
        let t = &f.maps[&sym];
        if sym.arity() == 0 {
            if t[0][source.apply(sym, &[])] != target.apply(sym, &[]) {
                return Some((sym, vec![]));
            }
            continue;
        }
        if let Some((a1, a2)) = first_failing_pair(source.size(), |a1, a2| {
            t[0][source.apply(sym, &[a1, a2])] == target.apply(sym, &[t[1][a1], t[2][a2]])
        }) {
            return Some((sym, vec![a1, a2]));
        }
    }
    None
}

/// A semilattice directed system of metamorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaSystem<C: Algebra = ResiduatedPoset> {
    pub signature: Signature,
    pub index: IndexSemilattice,
    pub components: Vec<C>,
    /// One metamorphism per `p ≤ q`, the diagonal included.
    pub xi: BTreeMap<(usize, usize), Metamorphism>,
}

/// Checks the semilattice, arrow shapes, `ξ_pp = id`, `ξ_qr ∘ ξ_pq = ξ_pr`,
/// and the metamorphism law of every arrow, exhaustively.
pub fn verify_meta_system<C: Algebra>(meta: &MetaSystem<C>) -> Report {
    let mut report = Report::new("directed system of metamorphisms");
    let idx = &meta.index;
    if let Some(problem) = idx.validate() {
        report.fail("index semilattice", vec![problem]);
        return report;
    }
    if meta.components.len() != idx.len() {
        report.fail("one component per index", vec![format!("{} components", meta.components.len())]);
        return report;
    }
    report.pass("index semilattice");
    let name = |p: usize| idx.labels[p].clone();
    let arrows = idx.arrows();
    let shape_problem = arrows.iter().find_map(|&(p, q)| {
        let Some(m) = meta.xi.get(&(p, q)) else {
            return Some(vec![name(p), name(q), "missing".into()]);
        };
        let (src, dst) = (meta.components[p].size(), meta.components[q].size());
        meta.signature.symbols().iter().find_map(|&s| {
            let ok = m.maps.get(&s).is_some_and(|t| {
                t.len() == s.arity() + 1 && t.iter().all(|f| f.len() == src && f.iter().all(|&v| v < dst))
            });
            (!ok).then(|| vec![name(p), name(q), s.name().to_string()])
        })
    });
    let extra = meta.xi.keys().find(|&&(p, q)| p >= idx.len() || q >= idx.len() || !idx.leq(p, q));
    if let Some(w) = shape_problem {
        report.fail("arrow shapes", w);
        return report;
    }
    if let Some(&(p, q)) = extra {
        report.fail("arrow shapes", vec![format!("({p}, {q}) is not an arrow")]);
        return report;
    }
    report.pass("arrow shapes");

    let identity = (0..idx.len()).find_map(|p| {
        let m = &meta.xi[&(p, p)];
        m.maps.iter().find_map(|(s, t)| {
            t.iter().enumerate().find_map(|(i, f)| {
                f.iter().enumerate().find(|&(x, &v)| x != v).map(|(x, _)| {
                    vec![
                        name(p),
                        format!("{s}{i}"),
                        meta.components[p].label(x).to_string(),
                    ]
                })
            })
        })
    });
    report.record("ξ_pp is the identity", identity);

    let mut composition = None;
    'outer: for &(p, q) in &arrows {
        for &(q2, r) in &arrows {
            if q2 != q {
                continue;
            }
            let composed = meta.xi[&(p, q)].then(&meta.xi[&(q, r)]);
            if composed != meta.xi[&(p, r)] {
                composition = Some(vec![name(p), name(q), name(r)]);
                break 'outer;
            }
        }
    }
    report.record("ξ_qr ∘ ξ_pq = ξ_pr", composition);

    let law = arrows.iter().find_map(|&(p, q)| {
        let (a, b) = (&meta.components[p], &meta.components[q]);
        metamorphism_violation(&meta.xi[&(p, q)], a, b, meta.signature).map(|(s, args)| {
            let mut w = vec![name(p), name(q), s.name().to_string()];
            w.extend(args.iter().map(|&e| a.label(e).to_string()));
            w
        })
    });
    report.record("metamorphism law", law);
    if meta.signature.symbols().iter().any(|s| s.arity() == 0) {
        report.record("least index exists", idx.least.is_none().then(Vec::new));
    }
    report
}

/// Operation tables on a labeled carrier, without an order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTables {
    pub labels: Vec<String>,
    pub unit: Elem,
    pub tables: BTreeMap<Symbol, Table>,
}

impl Algebra for OpTables {
    fn size(&self) -> usize {
        self.labels.len()
    }
    fn label(&self, e: Elem) -> &str {
        &self.labels[e]
    }
    fn unit(&self) -> Elem {
        self.unit
    }
    fn mult(&self, x: Elem, y: Elem) -> Elem {
        self.tables[&Symbol::Mul].get(x, y)
    }
    fn ld(&self, x: Elem, z: Elem) -> Elem {
        self.tables[&Symbol::Ld].get(x, z)
    }
    fn rd(&self, z: Elem, y: Elem) -> Elem {
        self.tables[&Symbol::Rd].get(z, y)
    }
}

/// The Płonka sum of a directed system of metamorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlonkaSum {
    pub ops: OpTables,
    /// `(index, local element)` of every carrier element.
    pub provenance: Vec<(usize, Elem)>,
    /// Position of each component's first element in the carrier.
    pub offsets: Vec<usize>,
}

/// Carrier of a disjoint union: labels `"p.x"`, provenance and offsets.
pub(crate) fn disjoint_union(index_labels: &[String], sizes: &[usize], local_label: impl Fn(usize, Elem) -> String) -> (Vec<String>, Vec<(usize, Elem)>, Vec<usize>) {
    let mut labels = Vec::new();
    let mut provenance = Vec::new();
    let mut offsets = Vec::new();
    for (p, &size) in sizes.iter().enumerate() {
        offsets.push(labels.len());
        for x in 0..size {
            labels.push(format!("{}.{}", index_labels[p], local_label(p, x)));
            provenance.push((p, x));
        }
    }
    (labels, provenance, offsets)
}

/// Builds the Płonka sum: `σ(a₁, a₂) = σ^{A_q}(ξ^{σ1}_{p₁q}(a₁), ξ^{σ2}_{p₂q}(a₂))`
/// with `q = p₁ ∨ p₂`, and the unit of the least component.
pub fn plonka_sum<C: Algebra>(meta: &MetaSystem<C>) -> Result<PlonkaSum> {
    let report = verify_meta_system(meta);
    if let Some(c) = report.first_failure() {
        return Err(Error::precondition(c.name.clone(), c.witness.clone()));
    }
    let sizes: Vec<usize> = meta.components.iter().map(|c| c.size()).collect();
    let (labels, provenance, offsets) =
        disjoint_union(&meta.index.labels, &sizes, |p, x| meta.components[p].label(x).to_string());
    let total = labels.len();
    let mut tables = BTreeMap::new();
    for sym in meta.signature.operations() {
        let t = Table::from_fn(total, |a, b| {
            let ((p1, x1), (p2, x2)) = (provenance[a], provenance[b]);
            let q = meta.index.join(p1, p2);
            let f1 = &meta.xi[&(p1, q)].maps[&sym][1];
            let f2 = &meta.xi[&(p2, q)].maps[&sym][2];
            offsets[q] + meta.components[q].apply(sym, &[f1[x1], f2[x2]])
        });
        tables.insert(sym, t);
    }
    let unit = if meta.signature.symbols().contains(&Symbol::Unit) {
        let bottom = meta
            .index
            .least
            .ok_or_else(|| Error::precondition("index semilattice has a least element", None))?;
        offsets[bottom] + meta.components[bottom].unit()
    } else {
        0
    };
    Ok(PlonkaSum {
        ops: OpTables { labels, unit, tables },
        provenance,
        offsets,
    })
}

/// Reads bands off a Płonka sum: `a ⊙ᵢ^σ b = ξ^{σi}_{p, p∨q}(a)` for
/// `a ∈ A_p`, `b ∈ A_q`. Positions carrying identical bands share a name.
pub fn bands_of_sum<C: Algebra>(meta: &MetaSystem<C>, sum: &PlonkaSum) -> PartitionSystem {
    let total = sum.provenance.len();
    let mut bands: BTreeMap<String, BandTable> = BTreeMap::new();
    let mut assignment = BTreeMap::new();
    for &sym in meta.signature.symbols() {
        let mut names = Vec::new();
        for i in 0..=sym.arity() {
            let band = BandTable::from_fn(total, |a, b| {
                let ((p, x), (q, _)) = (sum.provenance[a], sum.provenance[b]);
                let r = meta.index.join(p, q);
                sum.offsets[r] + meta.xi[&(p, r)].maps[&sym][i][x]
            });
            let name = match bands.iter().find(|(_, t)| **t == band) {
                Some((n, _)) => n.clone(),
                None => {
                    let n = format!("band{}", bands.len());
                    bands.insert(n.clone(), band);
                    n
                }
            };
            names.push(name);
        }
        assignment.insert(sym, names);
    }
    PartitionSystem { bands, assignment }
}

/// Knobs for [`decompose_with`]; `skip_identity_checks` deliberately plants
/// a bug used to self-test the property sweeps.
#[derive(Debug, Clone, Copy, Default)]
pub struct DecomposeOptions {
    /// Skips the H4–H6 precondition. Among balanced algebras of size at most
    /// 4, H5 and H6 already force H4, so skipping H4 alone changes nothing.
    pub skip_identity_checks: bool,
}

/// A balanced residuated poset satisfying H4–H6 split into its components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Positive idempotents, in element order; position `i` indexes component `i`.
    pub idempotents: Vec<Elem>,
    /// Elements of each component, in element order.
    pub members: Vec<Vec<Elem>>,
    /// Components with maps `φ_pq(a) = qa` and `ψ_pq(a) = q\a`.
    pub system: DirectedSystemPair<ResiduatedPoset>,
    /// The same system as metamorphisms `ξ^1 = ⟨φ⟩`, `ξ^· = ⟨φ,φ,φ⟩`,
    /// `ξ^\ = ⟨ψ,φ,ψ⟩`, `ξ^/ = ⟨ψ,ψ,φ⟩`.
    pub meta: MetaSystem<ResiduatedPoset>,
}

impl Decomposition {
    /// `a ↦ (1_a, a)` as positions in the disjoint-union carrier.
    pub fn embedding(&self, n: usize) -> Vec<Elem> {
        let mut offsets = Vec::new();
        let mut acc = 0;
        for m in &self.members {
            offsets.push(acc);
            acc += m.len();
        }
        (0..n)
            .map(|a| {
                let (c, m) = self
                    .members
                    .iter()
                    .enumerate()
                    .find(|(_, m)| m.contains(&a))
                    .expect("members cover the carrier");
                offsets[c] + m.iter().position(|&x| x == a).unwrap()
            })
            .collect()
    }
}

pub fn decompose(a: &ResiduatedPoset) -> Result<Decomposition> {
    decompose_with(a, DecomposeOptions::default())
}

/// Splits `a` into its components over `⟨Idp A, ·⟩` and verifies that the
/// Płonka sum reproduces the operations and the sum order reproduces `≤`.
pub fn decompose_with(a: &ResiduatedPoset, options: DecomposeOptions) -> Result<Decomposition> {
    require_h456(a, options.skip_identity_checks)?;
    let n = a.len();
    let idp = a.positive_idempotents()?;
    let join = Table::from_fn(idp.len(), |i, j| {
        let v = a.mult(idp[i], idp[j]);
        idp.iter().position(|&p| p == v).unwrap_or(usize::MAX)
    });
    if (0..idp.len()).any(|i| (0..idp.len()).any(|j| join.get(i, j) == usize::MAX)) {
        return Err(Error::PostconditionFailed("positive idempotents are not closed under ·".into()));
    }
    let index = IndexSemilattice::new(lab(a, &idp), join)
        .map_err(|e| Error::PostconditionFailed(format!("⟨Idp A, ·⟩ is not a join semilattice: {e}")))?;
    let unit_pos = idp.iter().position(|&p| p == a.unit());
    if index.least != unit_pos {
        return Err(Error::PostconditionFailed("1 is not the least index".into()));
    }
    let members: Vec<Vec<Elem>> = idp
        .iter()
        .map(|&p| (0..n).filter(|&x| a.ld(x, x) == p).collect())
        .collect();
    let components = idp
        .iter()
        .map(|&p| a.component_unchecked(p))
        .collect::<Result<Vec<_>>>()?;
    let local = |c: usize, x: Elem| members[c].iter().position(|&m| m == x);
    let mut phi = BTreeMap::new();
    let mut psi = BTreeMap::new();
    for (p, q) in index.arrows() {
        let target = idp[q];
        let mut f = Vec::new();
        let mut g = Vec::new();
        for &x in &members[p] {
            let (fx, gx) = (a.mult(target, x), a.ld(target, x));
            match (local(q, fx), local(q, gx)) {
                (Some(i), Some(j)) => {
                    f.push(i);
                    g.push(j);
                }
                _ => {
                    return Err(Error::PostconditionFailed(format!(
                        "transition maps of {} do not land in the component of {}",
                        a.label(x),
                        a.label(target)
                    )))
                }
            }
        }
        phi.insert((p, q), f);
        psi.insert((p, q), g);
    }
    let system = DirectedSystemPair {
        index,
        components,
        phi,
        psi,
    };
    let meta = system.metamorphisms();
    let decomposition = Decomposition {
        idempotents: idp,
        members,
        system,
        meta,
    };

    let report = verify_meta_system(&decomposition.meta);
    if let Some(c) = report.first_failure() {
        return Err(Error::PostconditionFailed(format!(
            "{} fails at ({})",
            c.name,
            c.witness.clone().unwrap_or_default().join(", ")
        )));
    }
    let sum = plonka_sum(&decomposition.meta)?;
    let embed = decomposition.embedding(n);
    if embed[a.unit()] != sum.ops.unit() {
        return Err(Error::PostconditionFailed("Płonka sum has the wrong unit".into()));
    }
    for sym in Signature::Full.operations() {
        if let Some((x, y)) =
            first_failing_pair(n, |x, y| embed[a.apply(sym, &[x, y])] == sum.ops.apply(sym, &[embed[x], embed[y]]))
        {
            return Err(Error::PostconditionFailed(format!(
                "Płonka sum differs on {} {sym} {}",
                a.label(x),
                a.label(y)
            )));
        }
    }
    let order = decomposition.system.sum_relation();
    if let Some((x, y)) = first_failing_pair(n, |x, y| a.leq(x, y) == order.holds(embed[x], embed[y])) {
        return Err(Error::PostconditionFailed(format!(
            "sum order differs on ({}, {})",
            a.label(x),
            a.label(y)
        )));
    }
    Ok(decomposition)
}

//! Orders on disjoint unions built from a pair of directed systems of
//! monotone maps, the conditions O1–O3, and the residuated composition of a
//! directed system of residuated posets.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, OrderAxiom, Result};
use crate::plonka::{disjoint_union, plonka_sum, verify_meta_system, IndexSemilattice, MetaSystem, Metamorphism};
use crate::poset::FinitePoset;
use crate::report::Report;
use crate::residuated::{verify_residuated_poset, RawAlgebra, ResiduatedPoset};
use crate::signature::{Algebra, Signature, Symbol};
use crate::table::{Elem, MapTable};

/// Anything carrying a finite partial order.
pub trait Ordered {
    fn order(&self) -> &FinitePoset;
}

impl Ordered for FinitePoset {
    fn order(&self) -> &FinitePoset {
        self
    }
}

impl Ordered for ResiduatedPoset {
    fn order(&self) -> &FinitePoset {
        self.poset()
    }
}

/// Components over an index semilattice with two directed systems of maps,
/// `phi` and `psi`, one table per `p ≤ q` (the diagonal included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedSystemPair<C = FinitePoset> {
    pub index: IndexSemilattice,
    pub components: Vec<C>,
    pub phi: BTreeMap<(usize, usize), MapTable>,
    pub psi: BTreeMap<(usize, usize), MapTable>,
}

/// The relation defined on a disjoint union; not necessarily an order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumRelation {
    pub labels: Vec<String>,
    pub provenance: Vec<(usize, Elem)>,
    pub offsets: Vec<usize>,
    rel: Vec<bool>,
}

impl SumRelation {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn holds(&self, a: Elem, b: Elem) -> bool {
        self.rel[a * self.len() + b]
    }

    /// Position of local element `x` of component `p`.
    pub fn global(&self, p: usize, x: Elem) -> Elem {
        self.offsets[p] + x
    }

    /// The first violated order axiom, with the offending elements.
    pub fn order_violation(&self) -> Option<(OrderAxiom, Vec<Elem>)> {
        let n = self.len();
        if let Some(a) = (0..n).find(|&a| !self.holds(a, a)) {
            return Some((OrderAxiom::Reflexivity, vec![a]));
        }
        for b in 0..n {
            for a in 0..n {
                if a != b && self.holds(a, b) && self.holds(b, a) {
                    return Some((OrderAxiom::Antisymmetry, vec![a, b]));
                }
            }
        }
        for c in 0..n {
            for b in 0..n {
                for a in 0..n {
                    if self.holds(a, b) && self.holds(b, c) && !self.holds(a, c) {
                        return Some((OrderAxiom::Transitivity, vec![a, b, c]));
                    }
                }
            }
        }
        None
    }

    /// First pair inside one component where the relation and that
    /// component's order disagree.
    pub fn extension_violation<C: Ordered>(&self, components: &[C]) -> Option<Vec<Elem>> {
        components.iter().enumerate().find_map(|(p, c)| {
            let o = c.order();
            (0..o.len()).find_map(|y| {
                (0..o.len())
                    .find(|&x| o.leq(x, y) != self.holds(self.global(p, x), self.global(p, y)))
                    .map(|x| vec![self.global(p, x), self.global(p, y)])
            })
        })
    }

    pub fn to_poset(&self) -> Result<FinitePoset> {
        let n = self.len();
        FinitePoset::from_matrix(
            self.labels.clone(),
            (0..n).map(|a| (0..n).map(|b| self.holds(a, b)).collect()).collect(),
        )
    }
}

fn is_monotone(o_src: &FinitePoset, o_dst: &FinitePoset, f: &MapTable) -> Option<(Elem, Elem)> {
    let n = o_src.len();
    (0..n).find_map(|y| (0..n).find(|&x| o_src.leq(x, y) && !o_dst.leq(f[x], f[y])).map(|x| (x, y)))
}

impl<C: Ordered> DirectedSystemPair<C> {
    fn name(&self, p: usize) -> String {
        self.index.labels[p].clone()
    }

    fn elem(&self, p: usize, x: Elem) -> String {
        self.components[p].order().label(x).to_string()
    }

    /// Shapes, monotonicity, identities and composition of both systems.
    pub fn validate(&self) -> Report {
        let mut report = Report::new("directed system pair");
        if let Some(problem) = self.index.validate() {
            report.fail("index semilattice", vec![problem]);
            return report;
        }
        if self.components.len() != self.index.len() {
            report.fail("one component per index", vec![format!("{} components", self.components.len())]);
            return report;
        }
        let arrows = self.index.arrows();
        for (sys, maps) in [("φ", &self.phi), ("ψ", &self.psi)] {
            let shape = arrows
                .iter()
                .find(|&&(p, q)| {
                    maps.get(&(p, q)).is_none_or(|f| {
                        f.len() != self.components[p].order().len()
                            || f.iter().any(|&v| v >= self.components[q].order().len())
                    })
                })
                .map(|&(p, q)| vec![self.name(p), self.name(q)])
                .or_else(|| {
                    maps.keys()
                        .find(|&&(p, q)| p >= self.index.len() || q >= self.index.len() || !self.index.leq(p, q))
                        .map(|&(p, q)| vec![format!("({p}, {q}) is not an arrow")])
                });
            if let Some(w) = shape {
                report.fail(format!("{sys} shapes"), w);
                return report;
            }
            report.pass(format!("{sys} shapes"));
            report.record(
                format!("{sys} monotone"),
                arrows.iter().find_map(|&(p, q)| {
                    is_monotone(self.components[p].order(), self.components[q].order(), &maps[&(p, q)])
                        .map(|(x, y)| vec![self.name(p), self.name(q), self.elem(p, x), self.elem(p, y)])
                }),
            );
            report.record(
                format!("{sys}_pp is the identity"),
                (0..self.index.len()).find_map(|p| {
                    maps[&(p, p)]
                        .iter()
                        .enumerate()
                        .find(|&(x, &v)| x != v)
                        .map(|(x, _)| vec![self.name(p), self.elem(p, x)])
                }),
            );
            let mut composition = None;
            'outer: for &(p, q) in &arrows {
                for &(q2, r) in &arrows {
                    if q2 != q {
                        continue;
                    }
                    let (f, g, h) = (&maps[&(p, q)], &maps[&(q, r)], &maps[&(p, r)]);
                    if let Some(x) = (0..f.len()).find(|&x| g[f[x]] != h[x]) {
                        composition = Some(vec![self.name(p), self.name(q), self.name(r), self.elem(p, x)]);
                        break 'outer;
                    }
                }
            }
            report.record(format!("{sys} composition"), composition);
        }
        report
    }

    /// `a ≤ b` iff `φ_ps(a) ≤_s ψ_qs(b)` with `s = p ∨ q`.
    pub fn sum_relation(&self) -> SumRelation {
        let sizes: Vec<usize> = self.components.iter().map(|c| c.order().len()).collect();
        let (labels, provenance, offsets) = disjoint_union(&self.index.labels, &sizes, |p, x| self.elem(p, x));
        let n = labels.len();
        let mut rel = vec![false; n * n];
        for a in 0..n {
            let (p, x) = provenance[a];
            for b in 0..n {
                let (q, y) = provenance[b];
                let s = self.index.join(p, q);
                rel[a * n + b] = self.components[s].order().leq(self.phi[&(p, s)][x], self.psi[&(q, s)][y]);
            }
        }
        SumRelation {
            labels,
            provenance,
            offsets,
            rel,
        }
    }

    /// O1 over `p < q`, O2 over `p ≤ q, r`, O3 over `p ≤ q`.
    pub fn verify_o(&self) -> Report {
        let mut report = Report::new("O1–O3");
        let k = self.index.len();
        let arrows = self.index.arrows();
        let o = |p: usize| self.components[p].order();

        let o1 = arrows.iter().filter(|&&(p, q)| p != q).find_map(|&(p, q)| {
            (0..o(p).len())
                .find(|&a| {
                    let (lo, hi) = (self.psi[&(p, q)][a], self.phi[&(p, q)][a]);
                    !o(q).lt(lo, hi)
                })
                .map(|a| vec![self.name(p), self.name(q), self.elem(p, a)])
        });
        report.record("O1", o1);

        let mut o2 = None;
        'o2: for p in 0..k {
            for q in (0..k).filter(|&q| self.index.leq(p, q)) {
                for r in (0..k).filter(|&r| self.index.leq(p, r)) {
                    let t = self.index.join(q, r);
                    for a in 0..o(p).len() {
                        let lhs = self.phi[&(q, t)][self.psi[&(p, q)][a]];
                        let rhs = self.psi[&(r, t)][self.phi[&(p, r)][a]];
                        if !o(t).leq(lhs, rhs) {
                            o2 = Some(vec![self.name(p), self.name(q), self.name(r), self.elem(p, a)]);
                            break 'o2;
                        }
                    }
                }
            }
        }
        report.record("O2", o2);

        let o3 = arrows.iter().find_map(|&(p, q)| {
            let n = o(p).len();
            (0..n).find_map(|b| {
                (0..n)
                    .find(|&a| o(q).leq(self.phi[&(p, q)][a], self.psi[&(p, q)][b]) && !o(p).leq(a, b))
                    .map(|a| vec![self.name(p), self.name(q), self.elem(p, a), self.elem(p, b)])
            })
        });
        report.record("O3", o3);
        report
    }

    /// The sum order, or the order axiom the relation breaks together with
    /// the first failing O-condition.
    pub fn sum_poset(&self) -> Result<FinitePoset> {
        if let Some(c) = self.validate().first_failure() {
            return Err(Error::precondition(c.name.clone(), c.witness.clone()));
        }
        let rel = self.sum_relation();
        let o = self.verify_o();
        let broken = rel
            .order_violation()
            .or_else(|| rel.extension_violation(&self.components).map(|w| (OrderAxiom::Extension, w)));
        match (o.first_failure(), broken) {
            (None, None) => rel.to_poset(),
            (Some(c), Some((axiom, w))) => Err(Error::NotAnOrder {
                axiom,
                witness: w.iter().map(|&e| rel.labels[e].clone()).collect(),
                failed_condition: c.name.clone(),
            }),
            (None, Some((axiom, _))) => Err(Error::InternalInconsistency(format!(
                "O1–O3 hold but the sum relation violates {axiom}"
            ))),
            (Some(c), None) => Err(Error::InternalInconsistency(format!(
                "the sum relation is an order extending the components but {} fails",
                c.name
            ))),
        }
    }
}

impl DirectedSystemPair<ResiduatedPoset> {
    /// `ξ^1 = ⟨φ⟩`, `ξ^· = ⟨φ,φ,φ⟩`, `ξ^\ = ⟨ψ,φ,ψ⟩`, `ξ^/ = ⟨ψ,ψ,φ⟩`.
    pub fn metamorphisms(&self) -> MetaSystem<ResiduatedPoset> {
        let xi = self
            .index
            .arrows()
            .into_iter()
            .map(|arrow| {
                let (f, g) = (self.phi[&arrow].clone(), self.psi[&arrow].clone());
                let maps = BTreeMap::from([
                    (Symbol::Unit, vec![f.clone()]),
                    (Symbol::Mul, vec![f.clone(), f.clone(), f.clone()]),
                    (Symbol::Ld, vec![g.clone(), f.clone(), g.clone()]),
                    (Symbol::Rd, vec![g.clone(), g, f]),
                ]);
                (arrow, Metamorphism { maps })
            })
            .collect();
        MetaSystem {
            signature: Signature::Full,
            index: self.index.clone(),
            components: self.components.clone(),
            xi,
        }
    }

    /// First `(a, c, u)` breaking `ψ_tu(a\c) = φ_pu(a) \_u ψ_ru(c)` for
    /// `a ∈ A_p`, `c ∈ A_r`, `t = p ∨ r ≤ u`; elements are sum positions.
    pub fn ld_transport_violation(&self) -> Option<(Elem, Elem, usize)> {
        let k = self.index.len();
        for p in 0..k {
            for r in 0..k {
                let t = self.index.join(p, r);
                for u in (0..k).filter(|&u| self.index.leq(t, u)) {
                    let (cp, cr, ct, cu) = (
                        &self.components[p],
                        &self.components[r],
                        &self.components[t],
                        &self.components[u],
                    );
                    for a in 0..cp.len() {
                        for c in 0..cr.len() {
                            let ac = ct.ld(self.phi[&(p, t)][a], self.psi[&(r, t)][c]);
                            let lhs = self.psi[&(t, u)][ac];
                            let rhs = cu.ld(self.phi[&(p, u)][a], self.psi[&(r, u)][c]);
                            if lhs != rhs {
                                return Some((a, c, u));
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

/// The Płonka sum of the metamorphisms together with the sum order.
pub fn compose_residuated(sys: &DirectedSystemPair<ResiduatedPoset>) -> Result<ResiduatedPoset> {
    if sys.index.validate().is_none() && sys.index.least.is_none() {
        return Err(Error::precondition("index semilattice has a least element", None));
    }
    if let Some(c) = sys.validate().first_failure() {
        return Err(Error::precondition(c.name.clone(), c.witness.clone()));
    }
    let meta = sys.metamorphisms();
    if let Some(c) = verify_meta_system(&meta).first_failure() {
        return Err(Error::precondition(c.name.clone(), c.witness.clone()));
    }
    if let Some(c) = sys.verify_o().first_failure() {
        return Err(Error::precondition(c.name.clone(), c.witness.clone()));
    }
    let sum = plonka_sum(&meta)?;
    let order = sys
        .sum_poset()
        .map_err(|e| Error::PostconditionFailed(format!("sum order: {e}")))?;
    let raw = RawAlgebra {
        poset: order,
        unit: sum.ops.unit(),
        mult: sum.ops.tables[&Symbol::Mul].clone(),
        ld: Some(sum.ops.tables[&Symbol::Ld].clone()),
        rd: Some(sum.ops.tables[&Symbol::Rd].clone()),
    };
    let report = verify_residuated_poset(&raw);
    if let Some(c) = report.first_failure() {
        return Err(Error::PostconditionFailed(format!(
            "{} fails at ({})",
            c.name,
            c.witness.clone().unwrap_or_default().join(", ")
        )));
    }
    let RawAlgebra { poset, unit, mult, ld, rd } = raw;
    Ok(ResiduatedPoset::from_parts_unchecked(poset, unit, mult, ld.unwrap(), rd.unwrap()))
}

/// Shapes of index semilattices used by [`generate_systems`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexShape {
    One,
    Chain2,
    Chain3,
    /// Two incomparable indices below a top.
    Wedge,
}

impl IndexShape {
    pub const ALL: [IndexShape; 4] = [IndexShape::One, IndexShape::Chain2, IndexShape::Chain3, IndexShape::Wedge];

    pub fn semilattice(self) -> IndexSemilattice {
        let labels = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match self {
            IndexShape::One => IndexSemilattice::chain(labels(&["0"])),
            IndexShape::Chain2 => IndexSemilattice::chain(labels(&["0", "1"])),
            IndexShape::Chain3 => IndexSemilattice::chain(labels(&["0", "1", "2"])),
            IndexShape::Wedge => {
                let join = crate::table::Table::from_fn(3, |a, b| if a == b { a } else { 2 });
                IndexSemilattice::new(labels(&["l", "r", "t"]), join).expect("wedge is a semilattice")
            }
        }
    }
}

/// Posets with at most `max` elements, one per isomorphism class.
pub fn small_posets(max: usize) -> Vec<FinitePoset> {
    (1..=max).flat_map(crate::enumerate::enumerate_posets_up_to_iso).collect()
}

/// Every monotone map between two posets, in colex order of value tuples.
pub fn monotone_maps(src: &FinitePoset, dst: &FinitePoset) -> Vec<MapTable> {
    let (n, m) = (src.len(), dst.len());
    let mut out = Vec::new();
    let mut f = vec![0; n];
    fn rec(i: usize, f: &mut MapTable, n: usize, m: usize, src: &FinitePoset, dst: &FinitePoset, out: &mut Vec<MapTable>) {
        if i == n {
            out.push(f.clone());
            return;
        }
        for v in 0..m {
            let ok = (0..i).all(|j| (!src.leq(j, i) || dst.leq(f[j], v)) && (!src.leq(i, j) || dst.leq(v, f[j])));
            if ok {
                f[i] = v;
                rec(i + 1, f, n, m, src, dst, out);
            }
        }
    }
    rec(0, &mut f, n, m, src, dst, &mut out);
    out
}

/// Settings for [`generate_systems`].
#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub max_component_size: usize,
    /// Most systems examined per assignment of components to indices;
    /// beyond it a seeded sample is drawn.
    pub budget_per_assignment: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_component_size: 3,
            budget_per_assignment: 2000,
            seed: 0x5eed,
        }
    }
}

/// All directed system pairs over each [`IndexShape`] with components from
/// [`small_posets`], enumerating the free (non-composite) arrows of both
/// systems; composite arrows are filled in by composition. Assignments with
/// more candidate systems than the budget are sampled deterministically.
pub fn generate_systems(config: GeneratorConfig, mut visit: impl FnMut(&DirectedSystemPair<FinitePoset>)) -> usize {
    let posets = small_posets(config.max_component_size);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut count = 0;
    for shape in IndexShape::ALL {
        let index = shape.semilattice();
        let k = index.len();
        // free arrows: strict covers
        let strict: Vec<(usize, usize)> = index.arrows().into_iter().filter(|&(p, q)| p != q).collect();
        let covers: Vec<(usize, usize)> = strict
            .iter()
            .copied()
            .filter(|&(p, q)| !strict.iter().any(|&(a, b)| a == p && b != q && strict.contains(&(b, q))))
            .collect();
        let mut assignment = vec![0usize; k];
        loop {
            let components: Vec<FinitePoset> = assignment.iter().map(|&i| posets[i].clone()).collect();
            let choices: Vec<Vec<MapTable>> = covers
                .iter()
                .map(|&(p, q)| monotone_maps(&components[p], &components[q]))
                .collect();
            let mut sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
            sizes.extend(choices.iter().map(Vec::len));
            let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
            let picks: Vec<Vec<usize>> = match total {
                Some(t) if t <= config.budget_per_assignment => mixed_radix(&sizes).collect(),
                _ => (0..config.budget_per_assignment)
                    .map(|_| sizes.iter().map(|&s| *(0..s).collect::<Vec<_>>().choose(&mut rng).unwrap()).collect())
                    .collect(),
            };
            for pick in picks {
                let (fp, gp) = pick.split_at(covers.len());
                let phi = close_system(&index, &components, &covers, &choices, fp);
                let psi = close_system(&index, &components, &covers, &choices, gp);
                if let (Some(phi), Some(psi)) = (phi, psi) {
                    let sys = DirectedSystemPair {
                        index: index.clone(),
                        components: components.clone(),
                        phi,
                        psi,
                    };
                    visit(&sys);
                    count += 1;
                }
            }
            // next assignment in colex order
            let mut i = 0;
            while i < k {
                assignment[i] += 1;
                if assignment[i] < posets.len() {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    count
}

/// Mixed-radix counter with the first digit fastest.
fn mixed_radix(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |mut t| {
        radices
            .iter()
            .map(|&r| {
                let d = t % r;
                t /= r;
                d
            })
            .collect()
    })
}

/// Extends chosen cover maps to all arrows by composition; `None` when two
/// paths disagree.
fn close_system(
    index: &IndexSemilattice,
    components: &[FinitePoset],
    covers: &[(usize, usize)],
    choices: &[Vec<MapTable>],
    pick: &[usize],
) -> Option<BTreeMap<(usize, usize), MapTable>> {
    let mut maps: BTreeMap<(usize, usize), MapTable> = BTreeMap::new();
    for (p, c) in components.iter().enumerate() {
        maps.insert((p, p), (0..c.len()).collect());
    }
    for (i, &arrow) in covers.iter().enumerate() {
        maps.insert(arrow, choices[i][pick[i]].clone());
    }
    // the shapes in use have height at most two, so one round of composition suffices
    for &(p, q) in covers {
        for &(q2, r) in covers {
            if q2 != q {
                continue;
            }
            let composed: MapTable = maps[&(p, q)].iter().map(|&x| maps[&(q, r)][x]).collect();
            match maps.get(&(p, r)) {
                Some(existing) if *existing != composed => return None,
                Some(_) => {}
                None => {
                    maps.insert((p, r), composed);
                }
            }
        }
    }
    index.arrows().iter().all(|a| maps.contains_key(a)).then_some(maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{boolean_chain, group_antichain};

    fn pz2_system() -> DirectedSystemPair<ResiduatedPoset> {
        let g = group_antichain(2).unwrap();
        let b = boolean_chain();
        DirectedSystemPair {
            index: IndexSemilattice::chain(vec!["1".into(), "⊤".into()]),
            components: vec![g, b],
            phi: BTreeMap::from([((0, 0), vec![0, 1]), ((1, 1), vec![0, 1]), ((0, 1), vec![1, 1])]),
            psi: BTreeMap::from([((0, 0), vec![0, 1]), ((1, 1), vec![0, 1]), ((0, 1), vec![0, 0])]),
        }
    }

    #[test]
    fn pz2_relation_cells() {
        let sys = pz2_system();
        let rel = sys.sum_relation();
        // components: 1.e, 1.g, ⊤.⊥, ⊤.⊤
        let (e, g, bot, top) = (0, 1, 2, 3);
        assert!(rel.holds(bot, e));
        assert!(!rel.holds(top, g));
        assert!(rel.holds(e, top) && rel.holds(g, top) && rel.holds(bot, g));
        assert!(!rel.holds(e, g) && !rel.holds(g, e));
        assert!(sys.verify_o().ok());
    }

    #[test]
    fn single_component_relation_is_its_order() {
        let c = FinitePoset::chain(vec!["x".into(), "y".into()]).unwrap();
        let sys = DirectedSystemPair {
            index: IndexShape::One.semilattice(),
            components: vec![c.clone()],
            phi: BTreeMap::from([((0, 0), vec![0, 1])]),
            psi: BTreeMap::from([((0, 0), vec![0, 1])]),
        };
        let order = sys.sum_poset().unwrap();
        assert_eq!(order.matrix(), c.matrix());
    }

    #[test]
    fn equal_maps_break_o1_and_antisymmetry() {
        let mut sys = pz2_system();
        sys.psi.insert((0, 1), vec![1, 1]);
        let o = sys.verify_o();
        assert!(!o.get("O1").unwrap().passed);
        match sys.sum_poset() {
            Err(Error::NotAnOrder {
                axiom, failed_condition, ..
            }) => {
                assert_eq!(axiom, OrderAxiom::Antisymmetry);
                assert_eq!(failed_condition, "O1");
            }
            other => panic!("expected NotAnOrder, got {other:?}"),
        }
    }

    #[test]
    fn pz2_composition_and_transport() {
        let sys = pz2_system();
        assert_eq!(sys.ld_transport_violation(), None);
        let a = compose_residuated(&sys).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.unit(), 0);
    }

    #[test]
    fn missing_least_index_is_a_precondition() {
        let c = ResiduatedPoset::new(
            FinitePoset::chain(vec!["1".into()]).unwrap(),
            0,
            crate::table::Table::from_fn(1, |_, _| 0),
        )
        .unwrap();
        let idx = IndexShape::Wedge.semilattice();
        let id = vec![0];
        let arrows = idx.arrows();
        let sys = DirectedSystemPair {
            index: idx,
            components: vec![c.clone(), c.clone(), c],
            phi: arrows.iter().map(|&a| (a, id.clone())).collect(),
            psi: arrows.iter().map(|&a| (a, id.clone())).collect(),
        };
        assert!(matches!(compose_residuated(&sys), Err(Error::PreconditionFailed { .. })));
    }

    #[test]
    fn monotone_maps_into_a_chain() {
        let two = FinitePoset::chain(vec!["0".into(), "1".into()]).unwrap();
        // 0 ≤ 1 forces f(0) ≤ f(1): three maps
        assert_eq!(monotone_maps(&two, &two).len(), 3);
        let anti = FinitePoset::antichain(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(monotone_maps(&anti, &two).len(), 4);
    }

    #[test]
    fn generator_is_deterministic() {
        let config = GeneratorConfig {
            max_component_size: 2,
            budget_per_assignment: 50,
            seed: 7,
        };
        let mut first = Vec::new();
        generate_systems(config, |s| first.push(s.sum_relation()));
        let mut second = Vec::new();
        generate_systems(config, |s| second.push(s.sum_relation()));
        assert!(!first.is_empty());
        assert_eq!(first, second);
    }
}

//! Constructions of concrete residuated posets: complex algebras of finite
//! monoids, small named examples, sums of two components over a 2-chain,
//! and lattice operations on such sums.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::order_sum::{compose_residuated, DirectedSystemPair};
use crate::plonka::IndexSemilattice;
use crate::poset::{order_closure, Extremum, FinitePoset};
use crate::residuated::{RawAlgebra, ResiduatedPoset};
use crate::signature::Algebra;
use crate::table::{first_failing_pair, first_failing_triple, Elem, Table};

/// Default bound on `|M|` for [`complex_algebra`].
pub const DEFAULT_MONOID_BOUND: usize = 4;

/// A finite monoid on `0..labels.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    labels: Vec<String>,
    unit: Elem,
    mult: Table,
}

impl FiniteMonoid {
    pub fn new(labels: Vec<String>, unit: Elem, mult: Table) -> Result<Self> {
        let n = labels.len();
        if mult.size() != n || unit >= n {
            return Err(Error::Malformed("monoid table does not match the carrier".into()));
        }
        if let Some(x) = (0..n).find(|&x| mult.get(unit, x) != x || mult.get(x, unit) != x) {
            return Err(Error::NotMonoid {
                law: "unit".into(),
                witness: vec![labels[x].clone()],
            });
        }
        if let Some((x, y, z)) =
            first_failing_triple(n, |x, y, z| mult.get(mult.get(x, y), z) == mult.get(x, mult.get(y, z)))
        {
            return Err(Error::NotMonoid {
                law: "associativity".into(),
                witness: vec![labels[x].clone(), labels[y].clone(), labels[z].clone()],
            });
        }
        Ok(FiniteMonoid { labels, unit, mult })
    }

    /// The cyclic group `Z_n` with elements `e, g, g2, …`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs at least one element");
        let labels = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{i}"),
            })
            .collect();
        FiniteMonoid {
            labels,
            unit: 0,
            mult: Table::from_fn(n, |a, b| (a + b) % n),
        }
    }

    pub fn trivial() -> Self {
        FiniteMonoid::cyclic(1)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> Elem {
        self.unit
    }

    pub fn mult(&self, x: Elem, y: Elem) -> Elem {
        self.mult.get(x, y)
    }
}

fn set_label(m: &FiniteMonoid, mask: usize) -> String {
    let members: Vec<&str> = (0..m.len())
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| m.labels[i].as_str())
        .collect();
    format!("{{{}}}", members.join(","))
}

/// `P(M)` with the default size bound.
pub fn complex_algebra(m: &FiniteMonoid) -> Result<ResiduatedPoset> {
    complex_algebra_bounded(m, DEFAULT_MONOID_BOUND)
}

/// The powerset of `M` ordered by inclusion with pointwise product and
/// set-lifted residuals. Subsets are numbered by their bitmask, so element
/// `k` is the set of monoid elements `i` with bit `i` of `k` set.
pub fn complex_algebra_bounded(m: &FiniteMonoid, max: usize) -> Result<ResiduatedPoset> {
    if m.len() > max {
        return Err(Error::SizeBound {
            requested: m.len(),
            max,
        });
    }
    let k = m.len();
    let n = 1usize << k;
    let labels: Vec<String> = (0..n).map(|s| set_label(m, s)).collect();
    let leq = (0..n).map(|x| (0..n).map(|y| x & !y == 0).collect()).collect();
    let poset = FinitePoset::from_matrix(labels, leq)?;
    let singleton_product = |x: usize, z: usize| -> usize {
        let mut out = 0;
        for i in (0..k).filter(|&i| x >> i & 1 == 1) {
            out |= 1 << m.mult(i, z);
        }
        out
    };
    let mult = Table::from_fn(n, |x, y| {
        (0..k)
            .filter(|&j| y >> j & 1 == 1)
            .fold(0, |acc, j| acc | singleton_product(x, j))
    });
    // X\Y = {z : X·{z} ⊆ Y}
    let ld = Table::from_fn(n, |x, y| {
        (0..k)
            .filter(|&z| singleton_product(x, z) & !y == 0)
            .fold(0, |acc, z| acc | 1 << z)
    });
    // X/Y = {z : {z}·Y ⊆ X}
    let rd = Table::from_fn(n, |x, y| {
        (0..k)
            .filter(|&z| {
                let zy = (0..k).filter(|&j| y >> j & 1 == 1).fold(0, |acc, j| acc | 1 << m.mult(z, j));
                zy & !x == 0
            })
            .fold(0, |acc, z| acc | 1 << z)
    });
    ResiduatedPoset::from_raw(RawAlgebra {
        poset,
        unit: 1 << m.unit(),
        mult,
        ld: Some(ld),
        rd: Some(rd),
    })
    .map_err(|e| Error::InternalInconsistency(format!("complex algebra: {e}")))
}

/// `P(Z₂)` with display names `⊥, 1, 0, ⊤` for `∅, {e}, {g}, {e,g}`.
pub fn pz2() -> ResiduatedPoset {
    complex_algebra(&FiniteMonoid::cyclic(2))
        .and_then(|a| a.with_labels(["⊥", "1", "0", "⊤"].map(String::from).to_vec()))
        .expect("P(Z₂) is residuated")
}

/// The cyclic group `Z_n` ordered as an antichain.
pub fn group_antichain(n: usize) -> Result<ResiduatedPoset> {
    let m = FiniteMonoid::cyclic(n);
    ResiduatedPoset::new(FinitePoset::antichain(m.labels.clone())?, m.unit, m.mult.clone())
}

/// The 2-element Boolean algebra `⊥ < ⊤` with product meet and unit `⊤`.
pub fn boolean_chain() -> ResiduatedPoset {
    let poset = FinitePoset::chain(vec!["⊥".into(), "⊤".into()]).expect("chain");
    ResiduatedPoset::new(poset, 1, Table::from_fn(2, |a, b| a.min(b))).expect("2 is residuated")
}

/// The one-element algebra.
pub fn trivial_algebra() -> ResiduatedPoset {
    ResiduatedPoset::new(FinitePoset::chain(vec!["1".into()]).expect("chain"), 0, Table::from_fn(1, |_, _| 0))
        .expect("trivial algebra is residuated")
}

/// The 6-element example: product is the meet of a second order `⊑`.
/// Elements are numbered `⊥, a, b, 1, p, q`.
pub fn example_fig1() -> ResiduatedPoset {
    let labels: Vec<String> = ["⊥", "a", "b", "1", "p", "q"].map(String::from).to_vec();
    let order = order_closure(
        &[("⊥", "a"), ("a", "1"), ("a", "b"), ("1", "p"), ("b", "p"), ("p", "q")],
        &labels,
    )
    .expect("acyclic");
    let meet_order = order_closure(
        &[("⊥", "b"), ("b", "q"), ("b", "a"), ("q", "p"), ("p", "1"), ("a", "1")],
        &labels,
    )
    .expect("acyclic");
    let mult = Table::from_fn(6, |x, y| meet_order.meet(x, y).expect("⊑ is a lattice"));
    ResiduatedPoset::new(order, 3, mult).expect("the example is residuated")
}

/// A sum of two components over the chain `1 < 2` with constant maps
/// `φ₁₂ = 1^{A₂}` and `ψ₁₂ = zero`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoComponentSum {
    pub algebra: ResiduatedPoset,
    /// Elements of the first component, as positions in `algebra`.
    pub first: Vec<Elem>,
    pub second: Vec<Elem>,
    pub zero: Elem,
    /// The unit of the second component.
    pub unit_b: Elem,
}

pub fn two_component_sum(a1: &ResiduatedPoset, a2: &ResiduatedPoset, zero: Elem) -> Result<TwoComponentSum> {
    let u2 = a2.unit();
    if zero >= a2.len() || !a2.poset().lt(zero, u2) {
        return Err(Error::precondition(
            "zero < 1 in the second component",
            Some(vec![a2.label(zero.min(a2.len() - 1)).to_string(), a2.label(u2).to_string()]),
        ));
    }
    let (n1, n2) = (a1.len(), a2.len());
    let id = |n: usize| (0..n).collect::<Vec<_>>();
    let sys = DirectedSystemPair {
        index: IndexSemilattice::chain(vec!["1".into(), "2".into()]),
        components: vec![a1.clone(), a2.clone()],
        phi: BTreeMap::from([((0, 0), id(n1)), ((1, 1), id(n2)), ((0, 1), vec![u2; n1])]),
        psi: BTreeMap::from([((0, 0), id(n1)), ((1, 1), id(n2)), ((0, 1), vec![zero; n1])]),
    };
    let algebra = compose_residuated(&sys)?;
    Ok(TwoComponentSum {
        algebra,
        first: (0..n1).collect(),
        second: (n1..n1 + n2).collect(),
        zero: n1 + zero,
        unit_b: n1 + u2,
    })
}

/// Join and meet tables of a two-component sum whose first component is a
/// doubly chopped lattice and whose second is a lattice, computed case by
/// case and checked cell by cell against the extrema of the sum order.
pub fn chopped_sum_lattice_ops(s: &TwoComponentSum) -> Result<(Table, Table)> {
    let o = s.algebra.poset();
    let n = o.len();
    let in_a = |x: Elem| s.first.contains(&x);
    let label = |x: Elem| o.label(x).to_string();
    let bounded_above = |a: Elem, b: Elem| s.first.iter().any(|&c| o.leq(a, c) && o.leq(b, c));
    let bounded_below = |a: Elem, b: Elem| s.first.iter().any(|&c| o.leq(c, a) && o.leq(c, b));
    let in_part = |part: &[Elem], a: Elem, b: Elem, kind: Extremum| {
        let bounds: Vec<Elem> = part
            .iter()
            .copied()
            .filter(|&c| match kind {
                Extremum::Join => o.leq(a, c) && o.leq(b, c),
                _ => o.leq(c, a) && o.leq(c, b),
            })
            .collect();
        let pick = if kind == Extremum::Join {
            Extremum::Least
        } else {
            Extremum::Greatest
        };
        o.extremum(&bounds, pick)
    };
    // the first part must be doubly chopped, the second a lattice
    let k = s.first.len();
    if let Some((i, j)) = first_failing_pair(k, |i, j| {
        let (a, b) = (s.first[i], s.first[j]);
        (!bounded_above(a, b) || in_part(&s.first, a, b, Extremum::Join).is_some())
            && (!bounded_below(a, b) || in_part(&s.first, a, b, Extremum::Meet).is_some())
    }) {
        return Err(Error::precondition(
            "first component is a doubly chopped lattice",
            Some(vec![label(s.first[i]), label(s.first[j])]),
        ));
    }
    let m = s.second.len();
    if let Some((i, j)) = first_failing_pair(m, |i, j| {
        let (a, b) = (s.second[i], s.second[j]);
        in_part(&s.second, a, b, Extremum::Join).is_some() && in_part(&s.second, a, b, Extremum::Meet).is_some()
    }) {
        return Err(Error::precondition(
            "second component is a lattice",
            Some(vec![label(s.second[i]), label(s.second[j])]),
        ));
    }
    let join_b = |a, b| in_part(&s.second, a, b, Extremum::Join).unwrap();
    let meet_b = |a, b| in_part(&s.second, a, b, Extremum::Meet).unwrap();
    let join = |x: Elem, y: Elem| -> Elem {
        match (in_a(x), in_a(y)) {
            (true, true) if bounded_above(x, y) => in_part(&s.first, x, y, Extremum::Join).unwrap(),
            (true, true) => s.unit_b,
            (false, false) => join_b(x, y),
            (true, false) if o.leq(y, s.zero) => x,
            (true, false) => join_b(y, s.unit_b),
            (false, true) if o.leq(x, s.zero) => y,
            (false, true) => join_b(x, s.unit_b),
        }
    };
    let meet = |x: Elem, y: Elem| -> Elem {
        match (in_a(x), in_a(y)) {
            (true, true) if bounded_below(x, y) => in_part(&s.first, x, y, Extremum::Meet).unwrap(),
            (true, true) => s.zero,
            (false, false) => meet_b(x, y),
            (true, false) if o.leq(s.unit_b, y) => x,
            (true, false) => meet_b(y, s.zero),
            (false, true) if o.leq(s.unit_b, x) => y,
            (false, true) => meet_b(x, s.zero),
        }
    };
    let jt = Table::from_fn(n, join);
    let mt = Table::from_fn(n, meet);
    if let Some((x, y)) = first_failing_pair(n, |x, y| Some(jt.get(x, y)) == o.join(x, y)) {
        return Err(Error::PostconditionFailed(format!("join of ({}, {}) is not the least upper bound", label(x), label(y))));
    }
    if let Some((x, y)) = first_failing_pair(n, |x, y| Some(mt.get(x, y)) == o.meet(x, y)) {
        return Err(Error::PostconditionFailed(format!("meet of ({}, {}) is not the greatest lower bound", label(x), label(y))));
    }
    Ok((jt, mt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_complex_algebra_cells() {
        let a = pz2();
        let [bot, one, zero, top] = [0, 1, 2, 3];
        assert_eq!(a.unit(), one);
        assert_eq!(a.mult(zero, zero), one);
        assert_eq!(a.ld(top, one), bot);
        assert!(a.poset().is_lattice());
    }

    #[test]
    fn trivial_monoid_gives_two_chain() {
        let a = complex_algebra(&FiniteMonoid::trivial()).unwrap();
        assert_eq!(a.poset().labels(), ["{}", "{e}"]);
        assert!(a.leq(0, 1) && !a.leq(1, 0));
    }

    #[test]
    fn bound_is_enforced() {
        let err = complex_algebra_bounded(&FiniteMonoid::cyclic(3), 2).unwrap_err();
        assert!(matches!(err, Error::SizeBound { requested: 3, max: 2 }));
    }

    #[test]
    fn powerset_joins_are_unions() {
        let a = complex_algebra(&FiniteMonoid::cyclic(3)).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(a.poset().join(x, y), Some(x | y));
                assert_eq!(a.poset().meet(x, y), Some(x & y));
            }
        }
    }

    #[test]
    fn fig1_products() {
        let a = example_fig1();
        let [bot, ea, b, one, p, _q] = [0, 1, 2, 3, 4, 5];
        assert_eq!(a.mult(p, ea), b);
        assert_eq!(a.ld(p, ea), bot);
        assert!((0..6).all(|x| a.mult(one, x) == x));
    }

    #[test]
    fn z2_and_two_chain_sum_is_pz2() {
        let s = two_component_sum(&group_antichain(2).unwrap(), &boolean_chain(), 0).unwrap();
        // 1.e ↦ 1, 1.g ↦ 0, 2.⊥ ↦ ⊥, 2.⊤ ↦ ⊤
        let embed = [1, 2, 0, 3];
        assert_eq!(s.algebra.first_disagreement(&pz2(), &embed), None);
        // a·b = b for a in the first component and b in the second
        for &a in &s.first {
            for &b in &s.second {
                assert_eq!(s.algebra.mult(a, b), b);
            }
        }
    }

    #[test]
    fn zero_must_be_strictly_below_unit() {
        let err = two_component_sum(&trivial_algebra(), &boolean_chain(), 1).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed { .. }));
    }

    #[test]
    fn one_element_first_component() {
        let s = two_component_sum(&trivial_algebra(), &boolean_chain(), 0).unwrap();
        let o = s.algebra.poset();
        // the new element sits strictly between zero and the unit of the second part
        assert!(o.lt(s.zero, 0) && o.lt(0, s.unit_b));
    }

    #[test]
    fn chopped_cases() {
        let s = two_component_sum(&group_antichain(2).unwrap(), &boolean_chain(), 0).unwrap();
        let (join, meet) = chopped_sum_lattice_ops(&s).unwrap();
        // e and g have no upper bound in the group part
        assert_eq!(join.get(0, 1), s.unit_b);
        assert_eq!(join.get(0, s.zero), 0);
        assert_eq!(meet.get(0, 1), s.zero);
        for x in 0..4 {
            assert_eq!(join.get(x, x), x);
            assert_eq!(meet.get(x, x), x);
        }
    }
}

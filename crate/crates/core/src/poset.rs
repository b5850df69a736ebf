//! Finite posets stored as dense order matrices.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::table::Elem;

/// Which bound [`FinitePoset::extremum`] should look for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    /// Greatest lower bound.
    Meet,
    /// Least upper bound.
    Join,
    /// Greatest element of the subset itself.
    Greatest,
    /// Least element of the subset itself.
    Least,
}

/// A finite partial order on labeled elements `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    labels: Vec<String>,
    leq: Vec<bool>,
}

impl FinitePoset {
    /// Builds a poset from a full order matrix, checking every poset axiom.
    pub fn from_matrix(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = labels.len();
        check_distinct(&labels)?;
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed(format!("order matrix must be {n}×{n}")));
        }
        let p = FinitePoset {
            labels,
            leq: leq.concat(),
        };
        if let Some(i) = (0..n).find(|&i| !p.leq(i, i)) {
            return Err(Error::Malformed(format!("order is not reflexive at {}", p.labels[i])));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && p.leq(i, j) && p.leq(j, i) {
                    return Err(Error::CycleError {
                        first: p.labels[i].clone(),
                        second: p.labels[j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if p.leq(i, j) && p.leq(j, k) && !p.leq(i, k) {
                        return Err(Error::Malformed(format!(
                            "order is not transitive at ({}, {}, {})",
                            p.labels[i], p.labels[j], p.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(p)
    }

    /// Trusted constructor for matrices already known to be partial orders.
    pub(crate) fn from_flat_unchecked(labels: Vec<String>, leq: Vec<bool>) -> Self {
        debug_assert_eq!(leq.len(), labels.len() * labels.len());
        FinitePoset { labels, leq }
    }

    pub fn antichain(labels: Vec<String>) -> Result<Self> {
        order_closure::<&str>(&[], &labels)
    }

    /// Elements in the given order form a chain, first element least.
    pub fn chain(labels: Vec<String>) -> Result<Self> {
        let pairs: Vec<_> = labels.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        order_closure(&pairs, &labels)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn leq(&self, i: Elem, j: Elem) -> bool {
        self.leq[i * self.labels.len() + j]
    }

    #[inline]
    pub fn lt(&self, i: Elem, j: Elem) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: Elem) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn lookup(&self, label: &str) -> Result<Elem> {
        self.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn matrix(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.leq(i, j)).collect()).collect()
    }

    /// The order restricted to `members`, relabeled in the given order.
    pub fn restrict(&self, members: &[Elem]) -> FinitePoset {
        let labels = members.iter().map(|&m| self.labels[m].clone()).collect();
        let leq = members
            .iter()
            .flat_map(|&i| members.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.leq(i, j))
            .collect();
        FinitePoset::from_flat_unchecked(labels, leq)
    }

    pub fn with_labels(&self, labels: Vec<String>) -> Result<FinitePoset> {
        if labels.len() != self.len() {
            return Err(Error::Malformed("relabeling must keep the carrier size".into()));
        }
        check_distinct(&labels)?;
        Ok(FinitePoset {
            labels,
            leq: self.leq.clone(),
        })
    }

    /// Bound of `subset` of the requested kind, or `None` when it does not exist.
    pub fn extremum(&self, subset: &[Elem], kind: Extremum) -> Option<Elem> {
        let n = self.len();
        match kind {
            Extremum::Greatest => subset
                .iter()
                .copied()
                .find(|&g| subset.iter().all(|&s| self.leq(s, g))),
            Extremum::Least => subset
                .iter()
                .copied()
                .find(|&l| subset.iter().all(|&s| self.leq(l, s))),
            Extremum::Meet => {
                let lower: Vec<Elem> = (0..n)
                    .filter(|&l| subset.iter().all(|&s| self.leq(l, s)))
                    .collect();
                self.extremum(&lower, Extremum::Greatest)
            }
            Extremum::Join => {
                let upper: Vec<Elem> = (0..n)
                    .filter(|&u| subset.iter().all(|&s| self.leq(s, u)))
                    .collect();
                self.extremum(&upper, Extremum::Least)
            }
        }
    }

    pub fn extremum_of_labels(&self, subset: &[&str], kind: Extremum) -> Result<Option<Elem>> {
        let idx = subset.iter().map(|l| self.lookup(l)).collect::<Result<Vec<_>>>()?;
        Ok(self.extremum(&idx, kind))
    }

    pub fn join(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.extremum(&[a, b], Extremum::Join)
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.extremum(&[a, b], Extremum::Meet)
    }

    pub fn least(&self) -> Option<Elem> {
        let all: Vec<Elem> = (0..self.len()).collect();
        self.extremum(&all, Extremum::Least)
    }

    pub fn greatest(&self) -> Option<Elem> {
        let all: Vec<Elem> = (0..self.len()).collect();
        self.extremum(&all, Extremum::Greatest)
    }

    /// Whether every pair has both a meet and a join.
    pub fn is_lattice(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| self.join(a, b).is_some() && self.meet(a, b).is_some()))
    }

    /// Cover pairs `(lower, upper)` of the transitive reduction, ordered by
    /// lower then upper element.
    pub fn hasse(&self) -> Vec<(Elem, Elem)> {
        let n = self.len();
        let mut covers = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) && !(0..n).any(|k| self.lt(i, k) && self.lt(k, j)) {
                    covers.push((i, j));
                }
            }
        }
        covers
    }

    /// Graphviz rendering of the Hasse diagram, lower elements drawn below.
    pub fn dot_export(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {} {{", dot_quote(name));
        out.push_str("  rankdir=BT;\n  node [shape=plaintext];\n");
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label={}];", dot_quote(l));
        }
        for (i, j) in self.hasse() {
            let _ = writeln!(out, "  n{i} -> n{j};");
        }
        out.push_str("}\n");
        out
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn check_distinct(labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::Malformed(format!("duplicate element label `{l}`")));
        }
    }
    Ok(())
}

/// Reflexive-transitive closure of `pairs` over `labels`.
///
/// The pairs may be any generating set of the order, not only covers.
pub fn order_closure<S: AsRef<str>>(pairs: &[(S, S)], labels: &[String]) -> Result<FinitePoset> {
    check_distinct(labels)?;
    let n = labels.len();
    let find = |s: &str| {
        labels
            .iter()
            .position(|l| l == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    };
    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
    }
    for (a, b) in pairs {
        let (i, j) = (find(a.as_ref())?, find(b.as_ref())?);
        leq[i * n + j] = true;
    }
    // Warshall
    for k in 0..n {
        for i in 0..n {
            if leq[i * n + k] {
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if leq[i * n + j] && leq[j * n + i] {
                return Err(Error::CycleError {
                    first: labels[i].clone(),
                    second: labels[j].clone(),
                });
            }
        }
    }
    Ok(FinitePoset::from_flat_unchecked(labels.to_vec(), leq))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn fig1_left() -> FinitePoset {
        let pairs = [("⊥", "a"), ("a", "1"), ("a", "b"), ("1", "p"), ("b", "p"), ("p", "q")];
        order_closure(&pairs, &names(&["⊥", "a", "b", "1", "p", "q"])).unwrap()
    }

    #[test]
    fn singleton_closure_is_identity() {
        let p = order_closure::<&str>(&[], &names(&["x"])).unwrap();
        assert_eq!(p.matrix(), vec![vec![true]]);
    }

    #[test]
    fn fig1_closure() {
        let p = fig1_left();
        assert_eq!(p.len(), 6);
        let (bot, q, one, b) = (p.lookup("⊥").unwrap(), p.lookup("q").unwrap(), p.lookup("1").unwrap(), p.lookup("b").unwrap());
        assert!(p.leq(bot, q));
        assert!(!p.leq(one, b) && !p.leq(b, one));
    }

    #[test]
    fn cycle_is_rejected() {
        let err = order_closure(&[("a", "b"), ("b", "a")], &names(&["a", "b"])).unwrap_err();
        assert!(matches!(err, Error::CycleError { .. }));
    }

    #[test]
    fn unknown_label_is_rejected() {
        let err = order_closure(&[("a", "z")], &names(&["a", "b"])).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel(l) if l == "z"));
        let p = fig1_left();
        assert!(matches!(p.extremum_of_labels(&["zz"], Extremum::Meet), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn join_in_fig1_left_order() {
        let p = fig1_left();
        // oracle: scan all elements for upper bounds of {1, b}, then the minimum
        let (one, b) = (p.lookup("1").unwrap(), p.lookup("b").unwrap());
        let ub: Vec<_> = (0..p.len()).filter(|&u| p.leq(one, u) && p.leq(b, u)).collect();
        let min: Vec<_> = ub.iter().copied().filter(|&u| ub.iter().all(|&v| p.leq(u, v))).collect();
        assert_eq!(min, vec![p.lookup("p").unwrap()]);
        assert_eq!(p.extremum_of_labels(&["1", "b"], Extremum::Join).unwrap(), p.index_of("p"));
        // 1 and b have no common lower bound above a, meet is a
        assert_eq!(p.extremum_of_labels(&["1", "b"], Extremum::Meet).unwrap(), p.index_of("a"));
    }

    #[test]
    fn idempotent_meet() {
        let p = fig1_left();
        for x in 0..p.len() {
            assert_eq!(p.extremum(&[x, x], Extremum::Meet), Some(x));
            assert_eq!(p.extremum(&[x, x], Extremum::Join), Some(x));
        }
    }

    #[test]
    fn partial_extrema_are_none() {
        let p = FinitePoset::antichain(names(&["x", "y"])).unwrap();
        assert_eq!(p.join(0, 1), None);
        assert_eq!(p.extremum(&[0, 1], Extremum::Greatest), None);
        assert_eq!(p.extremum(&[], Extremum::Meet), None);
    }

    #[test]
    fn hasse_small() {
        let c = FinitePoset::chain(names(&["a", "b"])).unwrap();
        assert_eq!(c.hasse(), vec![(0, 1)]);
        let a = FinitePoset::antichain(names(&["a", "b"])).unwrap();
        assert!(a.hasse().is_empty());
    }

    #[test]
    fn hasse_fig1_matches_generating_covers() {
        let p = fig1_left();
        // oracle: a strict pair is a cover iff dropping it from the strict
        // relation leaves it unreachable through the remaining strict pairs
        let n = p.len();
        let strict: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p.lt(i, j))
            .collect();
        let mut oracle = Vec::new();
        for &(i, j) in &strict {
            let mut reach = vec![false; n];
            let mut stack = vec![i];
            while let Some(v) = stack.pop() {
                for &(a, b) in &strict {
                    if a == v && (a, b) != (i, j) && !reach[b] {
                        reach[b] = true;
                        stack.push(b);
                    }
                }
            }
            if !reach[j] {
                oracle.push((i, j));
            }
        }
        let covers = p.hasse();
        assert_eq!(covers, oracle);
        let mut labelled: Vec<_> = covers.iter().map(|&(i, j)| (p.label(i), p.label(j))).collect();
        labelled.sort();
        let mut expected = vec![("⊥", "a"), ("a", "1"), ("a", "b"), ("1", "p"), ("b", "p"), ("p", "q")];
        expected.sort();
        assert_eq!(labelled, expected);
    }

    #[test]
    fn dot_lists_nodes_and_covers() {
        let p = fig1_left();
        let dot = p.dot_export("fig1");
        assert!(dot.starts_with("digraph \"fig1\" {"));
        assert!(dot.contains("rankdir=BT"));
        assert_eq!(dot.matches("->").count(), 6);
        assert_eq!(dot.matches("[label=").count(), 6);
        assert!(dot.contains("n0 -> n1;"));
    }
}

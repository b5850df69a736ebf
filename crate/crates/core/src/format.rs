//! JSON files for algebras and directed systems. Elements are referenced
//! by label; `ld[x][z]` holds `x\z` and `rd[x][y]` holds `x/y`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order_sum::DirectedSystemPair;
use crate::plonka::IndexSemilattice;
use crate::poset::order_closure;
use crate::residuated::{RawAlgebra, ResiduatedPoset};
use crate::signature::Algebra;
use crate::table::{Elem, Table};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub elements: Vec<String>,
    pub unit: String,
    /// Generating pairs `[a, b]` for `a ≤ b`; the reflexive-transitive
    /// closure is taken on load.
    pub leq: Vec<(String, String)>,
    pub mult: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ld: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rd: Option<Vec<Vec<String>>>,
}

fn index_map(elements: &[String]) -> Result<BTreeMap<&str, Elem>> {
    let mut map = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        if map.insert(e.as_str(), i).is_some() {
            return Err(Error::Malformed(format!("duplicate element {e}")));
        }
    }
    Ok(map)
}

fn resolve(map: &BTreeMap<&str, Elem>, label: &str) -> Result<Elem> {
    map.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

fn parse_table(map: &BTreeMap<&str, Elem>, rows: &[Vec<String>], what: &str) -> Result<Table> {
    let n = map.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Malformed(format!("{what} table must be {n}×{n}")));
    }
    let mut t = Table::from_fn(n, |_, _| 0);
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            t.set(i, j, resolve(map, cell)?);
        }
    }
    Ok(t)
}

fn table_rows<A: Algebra + ?Sized>(a: &A, f: impl Fn(Elem, Elem) -> Elem) -> Vec<Vec<String>> {
    (0..a.size())
        .map(|x| (0..a.size()).map(|y| a.label(f(x, y)).to_string()).collect())
        .collect()
}

impl AlgebraFile {
    /// Covers of the order, products, and (optionally) both residual tables.
    pub fn from_algebra(name: impl Into<String>, a: &ResiduatedPoset, with_residuals: bool) -> Self {
        let label = |e: Elem| a.label(e).to_string();
        AlgebraFile {
            name: name.into(),
            elements: a.poset().labels().to_vec(),
            unit: label(a.unit()),
            leq: a.poset().hasse().into_iter().map(|(x, y)| (label(x), label(y))).collect(),
            mult: table_rows(a, |x, y| a.mult(x, y)),
            ld: with_residuals.then(|| table_rows(a, |x, z| a.ld(x, z))),
            rd: with_residuals.then(|| table_rows(a, |z, y| a.rd(z, y))),
        }
    }

    /// Resolves labels and closes the order; residuation is not yet checked.
    pub fn to_raw(&self) -> Result<RawAlgebra> {
        let map = index_map(&self.elements)?;
        let unit = resolve(&map, &self.unit)?;
        let poset = order_closure(&self.leq, &self.elements)?;
        let mult = parse_table(&map, &self.mult, "mult")?;
        let ld = self.ld.as_ref().map(|t| parse_table(&map, t, "ld")).transpose()?;
        let rd = self.rd.as_ref().map(|t| parse_table(&map, t, "rd")).transpose()?;
        Ok(RawAlgebra {
            poset,
            unit,
            mult,
            ld,
            rd,
        })
    }

    pub fn to_algebra(&self) -> Result<ResiduatedPoset> {
        ResiduatedPoset::from_raw(self.to_raw()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra files serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilatticeFile {
    pub elements: Vec<String>,
    pub join: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub least: Option<String>,
}

/// A directed system pair over residuated components. Maps are keyed by
/// `"p<=q"`; diagonal entries may be omitted and default to identities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub semilattice: SemilatticeFile,
    pub components: BTreeMap<String, AlgebraFile>,
    pub phi: BTreeMap<String, BTreeMap<String, String>>,
    pub psi: BTreeMap<String, BTreeMap<String, String>>,
}

fn arrow_key(p: &str, q: &str) -> String {
    format!("{p}<={q}")
}

impl SystemFile {
    pub fn from_system(sys: &DirectedSystemPair<ResiduatedPoset>) -> Self {
        let idx = &sys.index;
        let name = |p: usize| idx.labels[p].clone();
        let maps = |m: &BTreeMap<(usize, usize), Vec<Elem>>| {
            idx.arrows()
                .into_iter()
                .filter(|&(p, q)| p != q)
                .map(|(p, q)| {
                    let (src, dst) = (&sys.components[p], &sys.components[q]);
                    let table = m[&(p, q)]
                        .iter()
                        .enumerate()
                        .map(|(x, &y)| (src.label(x).to_string(), dst.label(y).to_string()))
                        .collect();
                    (arrow_key(&name(p), &name(q)), table)
                })
                .collect()
        };
        SystemFile {
            semilattice: SemilatticeFile {
                elements: idx.labels.clone(),
                join: (0..idx.len())
                    .map(|p| (0..idx.len()).map(|q| name(idx.join(p, q))).collect())
                    .collect(),
                least: idx.least.map(name),
            },
            components: (0..idx.len())
                .map(|p| (name(p), AlgebraFile::from_algebra(name(p), &sys.components[p], false)))
                .collect(),
            phi: maps(&sys.phi),
            psi: maps(&sys.psi),
        }
    }

    pub fn to_system(&self) -> Result<DirectedSystemPair<ResiduatedPoset>> {
        let s = &self.semilattice;
        let map = index_map(&s.elements)?;
        let join = parse_table(&map, &s.join, "join")?;
        let index = IndexSemilattice::new(s.elements.clone(), join)?;
        if let Some(l) = &s.least {
            if index.least != Some(resolve(&map, l)?) {
                return Err(Error::Malformed(format!("{l} is not the least index")));
            }
        }
        let mut components = Vec::new();
        for p in &s.elements {
            let file = self
                .components
                .get(p)
                .ok_or_else(|| Error::Malformed(format!("no component for index {p}")))?;
            components.push(file.to_algebra()?);
        }
        if let Some(extra) = self.components.keys().find(|k| !map.contains_key(k.as_str())) {
            return Err(Error::UnknownLabel(extra.clone()));
        }
        let parse_maps = |given: &BTreeMap<String, BTreeMap<String, String>>, what: &str| {
            let mut out = BTreeMap::new();
            let mut used = HashSet::new();
            for (p, q) in index.arrows() {
                let key = arrow_key(&s.elements[p], &s.elements[q]);
                let (src, dst): (&ResiduatedPoset, &ResiduatedPoset) = (&components[p], &components[q]);
                let table = match given.get(&key) {
                    None if p == q => (0..src.len()).collect(),
                    None => return Err(Error::Malformed(format!("{what} is missing {key}"))),
                    Some(m) => {
                        used.insert(key.clone());
                        if let Some(k) = m.keys().find(|k| src.poset().index_of(k).is_none()) {
                            return Err(Error::UnknownLabel(k.clone()));
                        }
                        (0..src.len())
                            .map(|x| {
                                let image = m.get(src.label(x)).ok_or_else(|| {
                                    Error::Malformed(format!("{what} {key} has no image for {}", src.label(x)))
                                })?;
                                dst.lookup(image)
                            })
                            .collect::<Result<Vec<_>>>()?
                    }
                };
                out.insert((p, q), table);
            }
            if let Some(k) = given.keys().find(|k| !used.contains(*k)) {
                return Err(Error::Malformed(format!("{what} has an entry {k} that is not an arrow")));
            }
            Ok(out)
        };
        let phi = parse_maps(&self.phi, "phi")?;
        let psi = parse_maps(&self.psi, "psi")?;
        Ok(DirectedSystemPair {
            index,
            components,
            phi,
            psi,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system files serialize")
    }
}

/// A monoid given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidFile {
    pub name: String,
    pub elements: Vec<String>,
    pub unit: String,
    pub mult: Vec<Vec<String>>,
}

impl MonoidFile {
    pub fn to_monoid(&self) -> Result<crate::builders::FiniteMonoid> {
        let map = index_map(&self.elements)?;
        let unit = resolve(&map, &self.unit)?;
        let mult = parse_table(&map, &self.mult, "mult")?;
        crate::builders::FiniteMonoid::new(self.elements.clone(), unit, mult)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{example_fig1, pz2};

    #[test]
    fn algebra_roundtrip() {
        for a in [example_fig1(), pz2()] {
            let file = AlgebraFile::from_algebra("x", &a, true);
            let back = AlgebraFile::from_json(&file.to_json()).unwrap().to_algebra().unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn wrong_residual_is_rejected() {
        let mut file = AlgebraFile::from_algebra("pz2", &pz2(), true);
        file.ld.as_mut().unwrap()[3][1] = "⊤".into();
        assert!(file.to_algebra().is_err());
    }

    #[test]
    fn unknown_label_in_table() {
        let mut file = AlgebraFile::from_algebra("pz2", &pz2(), false);
        file.mult[0][0] = "nope".into();
        assert!(matches!(file.to_raw(), Err(Error::UnknownLabel(l)) if l == "nope"));
    }

    #[test]
    fn garbage_is_malformed() {
        assert!(matches!(AlgebraFile::from_json("{\"name\": 3}"), Err(Error::Malformed(_))));
    }
}

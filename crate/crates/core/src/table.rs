//! Dense operation tables and the deterministic tuple order used for witnesses.
//!
//! Every counterexample search in the crate walks argument tuples in
//! colexicographic order: the last argument varies slowest and the first
//! argument fastest. A reported witness is always the first failing tuple in
//! that order.

/// An element of a finite carrier, identified by its index.
pub type Elem = usize;

/// A unary map between finite carriers, stored as its value list.
pub type MapTable = Vec<Elem>;

/// An `n × n` table of a binary operation on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    n: usize,
    cells: Vec<Elem>,
}

impl Table {
    pub fn from_fn(n: usize, mut f: impl FnMut(Elem, Elem) -> Elem) -> Self {
        let mut cells = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                cells.push(f(x, y));
            }
        }
        Table { n, cells }
    }

    /// Builds a table from rows; returns `None` unless the rows form an
    /// `n × n` square with entries in `0..n`.
    pub fn from_rows(rows: &[Vec<Elem>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return None;
        }
        Some(Table {
            n,
            cells: rows.concat(),
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: Elem, y: Elem) -> Elem {
        self.cells[x * self.n + y]
    }

    #[inline]
    pub fn set(&mut self, x: Elem, y: Elem, v: Elem) {
        self.cells[x * self.n + y] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.cells.chunks(self.n.max(1)).map(<[Elem]>::to_vec).take(self.n).collect()
    }
}

/// All pairs `(x, y)` over `0..n`, `y` outermost.
pub fn pairs(n: usize) -> impl Iterator<Item = (Elem, Elem)> {
    (0..n).flat_map(move |y| (0..n).map(move |x| (x, y)))
}

/// All triples `(x, y, z)` over `0..n`, `z` outermost and `x` innermost.
pub fn triples(n: usize) -> impl Iterator<Item = (Elem, Elem, Elem)> {
    (0..n).flat_map(move |z| (0..n).flat_map(move |y| (0..n).map(move |x| (x, y, z))))
}

/// First pair (in [`pairs`] order) on which `ok` fails.
pub fn first_failing_pair(n: usize, mut ok: impl FnMut(Elem, Elem) -> bool) -> Option<(Elem, Elem)> {
    pairs(n).find(|&(x, y)| !ok(x, y))
}

/// First triple (in [`triples`] order) on which `ok` fails.
pub fn first_failing_triple(
    n: usize,
    mut ok: impl FnMut(Elem, Elem, Elem) -> bool,
) -> Option<(Elem, Elem, Elem)> {
    triples(n).find(|&(x, y, z)| !ok(x, y, z))
}

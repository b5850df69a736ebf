use std::fmt;

use crate::table::Elem;

/// Operation symbols of the residuated-poset signature `⟨·, \, /, 1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Unit,
    Mul,
    Ld,
    Rd,
}

impl Symbol {
    pub fn arity(self) -> usize {
        match self {
            Symbol::Unit => 0,
            Symbol::Mul | Symbol::Ld | Symbol::Rd => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Unit => "1",
            Symbol::Mul => "·",
            Symbol::Ld => "\\",
            Symbol::Rd => "/",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which operations are in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Signature {
    #[default]
    Full,
    /// Only `·` and `1`.
    MonoidReduct,
}

impl Signature {
    pub fn symbols(self) -> &'static [Symbol] {
        match self {
            Signature::Full => &[Symbol::Unit, Symbol::Mul, Symbol::Ld, Symbol::Rd],
            Signature::MonoidReduct => &[Symbol::Unit, Symbol::Mul],
        }
    }

    pub fn operations(self) -> impl Iterator<Item = Symbol> {
        self.symbols().iter().copied().filter(|s| s.arity() > 0)
    }
}

/// An algebra of the residuated signature on carrier `0..size()`.
///
/// `ld(x, z)` is `x\z` and `rd(z, y)` is `z/y`.
pub trait Algebra {
    fn size(&self) -> usize;
    fn label(&self, e: Elem) -> &str;
    fn unit(&self) -> Elem;
    fn mult(&self, x: Elem, y: Elem) -> Elem;
    fn ld(&self, x: Elem, z: Elem) -> Elem;
    fn rd(&self, z: Elem, y: Elem) -> Elem;

    fn apply(&self, sym: Symbol, args: &[Elem]) -> Elem {
        match sym {
            Symbol::Unit => self.unit(),
            Symbol::Mul => self.mult(args[0], args[1]),
            Symbol::Ld => self.ld(args[0], args[1]),
            Symbol::Rd => self.rd(args[0], args[1]),
        }
    }

    fn labels_of(&self, elems: &[Elem]) -> Vec<String> {
        elems.iter().map(|&e| self.label(e).to_string()).collect()
    }
}

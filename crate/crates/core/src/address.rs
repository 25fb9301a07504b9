//! Higher addresses: `*` in dimension 0, lists of (n-1)-addresses above.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("the 0-address has no concatenation")]
    AtomConcat,
    #[error("entry of dimension {found} in a {dim}-address")]
    BadEntry { dim: usize, found: usize },
}

/// An n-address. Dimension is explicit, so `[]` is never ambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Address {
    Atom,
    Seq { dim: usize, items: Vec<Address> },
}

impl Address {
    pub fn atom() -> Self {
        Address::Atom
    }

    /// The empty word in dimension `dim`. In dimension 0 this is `*`.
    pub fn empty(dim: usize) -> Self {
        if dim == 0 {
            Address::Atom
        } else {
            Address::Seq { dim, items: Vec::new() }
        }
    }

    pub fn seq(dim: usize, items: Vec<Address>) -> Result<Self, AddressError> {
        if dim == 0 {
            return Err(AddressError::BadEntry { dim: 0, found: 0 });
        }
        for it in &items {
            if it.dim() + 1 != dim {
                return Err(AddressError::BadEntry { dim, found: it.dim() });
            }
        }
        Ok(Address::Seq { dim, items })
    }

    /// `[*^n]`, the 1-address of the n-th node of an opetopic integer.
    pub fn stars(n: usize) -> Self {
        Address::Seq { dim: 1, items: vec![Address::Atom; n] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Address::Atom => 0,
            Address::Seq { dim, .. } => *dim,
        }
    }

    pub fn items(&self) -> &[Address] {
        match self {
            Address::Atom => &[],
            Address::Seq { items, .. } => items,
        }
    }

    pub fn len(&self) -> usize {
        self.items().len()
    }

    pub fn is_empty(&self) -> bool {
        self.items().is_empty()
    }

    /// `[self]`, one dimension up.
    pub fn wrap(&self) -> Address {
        Address::Seq { dim: self.dim() + 1, items: vec![self.clone()] }
    }

    /// `[p e]`: append one entry of dimension `dim - 1`.
    pub fn push(&self, entry: Address) -> Result<Address, AddressError> {
        match self {
            Address::Atom => Err(AddressError::AtomConcat),
            Address::Seq { dim, items } => {
                if entry.dim() + 1 != *dim {
                    return Err(AddressError::BadEntry { dim: *dim, found: entry.dim() });
                }
                let mut items = items.clone();
                items.push(entry);
                Ok(Address::Seq { dim: *dim, items })
            }
        }
    }

    /// Split `[p q]` into `([p], q)`.
    pub fn split_last(&self) -> Option<(Address, &Address)> {
        match self {
            Address::Seq { dim, items } if !items.is_empty() => {
                let (last, init) = items.split_last()?;
                Some((Address::Seq { dim: *dim, items: init.to_vec() }, last))
            }
            _ => None,
        }
    }

    pub fn concat(&self, other: &Address) -> Result<Address, AddressError> {
        if self.dim() != other.dim() {
            return Err(AddressError::DimMismatch(self.dim(), other.dim()));
        }
        match (self, other) {
            (Address::Seq { dim, items }, Address::Seq { items: rest, .. }) => {
                let mut items = items.clone();
                items.extend(rest.iter().cloned());
                Ok(Address::Seq { dim: *dim, items })
            }
            _ => Err(AddressError::AtomConcat),
        }
    }

    /// Concatenation extended to dimension 0, where the only address is `*`.
    pub fn concat_or_atom(&self, other: &Address) -> Result<Address, AddressError> {
        if self.dim() == 0 && other.dim() == 0 {
            Ok(Address::Atom)
        } else {
            self.concat(other)
        }
    }

    pub fn is_prefix(&self, other: &Address) -> Result<bool, AddressError> {
        if self.dim() != other.dim() {
            return Err(AddressError::DimMismatch(self.dim(), other.dim()));
        }
        let (a, b) = (self.items(), other.items());
        Ok(a.len() <= b.len() && a.iter().zip(b).all(|(x, y)| x == y))
    }

    pub fn lex_compare(&self, other: &Address) -> Result<Ordering, AddressError> {
        if self.dim() != other.dim() {
            return Err(AddressError::DimMismatch(self.dim(), other.dim()));
        }
        Ok(self.cmp(other))
    }

    /// Whether some `Atom` occurs inside, so the text form pins the dimension.
    pub fn has_atom(&self) -> bool {
        match self {
            Address::Atom => true,
            Address::Seq { items, .. } => items.iter().any(Address::has_atom),
        }
    }
}

impl Ord for Address {
    /// Dimension first, then lexicographic on entries; all atoms are equal.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.dim().cmp(&other.dim()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (self.items(), other.items());
        for (x, y) in a.iter().zip(b) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Address {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Address::Atom => write!(f, "*"),
            Address::Seq { items, .. } => {
                write!(f, "[")?;
                for it in items {
                    write!(f, "{it}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1(n: usize) -> Address {
        Address::stars(n)
    }

    #[test]
    fn concat_examples() {
        assert_eq!(a1(1).concat(&a1(2)).unwrap(), a1(3));
        assert_eq!(Address::empty(1).concat(&a1(1)).unwrap(), a1(1));
        let x = Address::seq(2, vec![a1(1)]).unwrap();
        let y = Address::seq(2, vec![a1(0), a1(1)]).unwrap();
        let z = Address::seq(2, vec![a1(1), a1(0), a1(1)]).unwrap();
        assert_eq!(x.concat(&y).unwrap(), z);
        assert_eq!(Address::Atom.concat(&Address::Atom), Err(AddressError::AtomConcat));
        assert!(matches!(a1(1).concat(&x), Err(AddressError::DimMismatch(1, 2))));
    }

    #[test]
    fn prefix_and_order() {
        assert!(Address::empty(1).is_prefix(&a1(2)).unwrap());
        assert!(!a1(2).is_prefix(&a1(1)).unwrap());
        let x = Address::seq(2, vec![a1(1)]).unwrap();
        let y = Address::seq(2, vec![a1(1), a1(0)]).unwrap();
        assert!(x.is_prefix(&y).unwrap());
        assert_eq!(Address::empty(1).lex_compare(&a1(1)).unwrap(), Ordering::Less);
        let w = Address::seq(2, vec![a1(1), a1(1)]).unwrap();
        assert_eq!(x.lex_compare(&w).unwrap(), Ordering::Less);
        let u = Address::seq(2, vec![a1(0), a1(1)]).unwrap();
        assert_eq!(u.lex_compare(&x).unwrap(), Ordering::Less);
        assert_eq!(Address::Atom.lex_compare(&Address::Atom).unwrap(), Ordering::Equal);
    }

    #[test]
    fn display() {
        let u = Address::seq(2, vec![a1(0), a1(1)]).unwrap();
        assert_eq!(u.to_string(), "[[][*]]");
        assert_eq!(Address::Atom.to_string(), "*");
        assert_eq!(a1(3).to_string(), "[***]");
    }

    #[test]
    fn bad_entries() {
        assert!(Address::seq(2, vec![Address::Atom]).is_err());
        assert!(Address::seq(0, vec![]).is_err());
        assert!(a1(1).push(a1(0)).is_err());
    }
}

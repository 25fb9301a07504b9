//! Unnamed preopetopes: `♦`, degenerate `{{p}}`, and address-keyed node maps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::address::{Address, AddressError};

/// Leaf-to-node pairing `[l]/[q]` of a sequent.
pub type Readdressing = BTreeMap<Address, Address>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreopetopeError {
    #[error("expected a preopetope with nodes")]
    NotNodes,
    #[error("no node at address {0}")]
    MissingAddress(Address),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("a preopetope with nodes needs at least one")]
    Empty,
    #[error("{0} is not a leaf")]
    NotALeaf(Address),
    #[error("leaves are not defined for 1-dimensional node maps")]
    LeavesOfArrow,
    #[error("address {0} has no preimage in the readdressing")]
    Readdress(Address),
    #[error("substitution produced address {0} twice")]
    Collision(Address),
    #[error(transparent)]
    Address(#[from] AddressError),
}

type Result<T> = std::result::Result<T, PreopetopeError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preopetope {
    Point,
    Degen(Box<Preopetope>),
    Nodes { dim: usize, map: BTreeMap<Address, Preopetope> },
}

impl Preopetope {
    pub fn point() -> Self {
        Preopetope::Point
    }

    pub fn arrow() -> Self {
        Preopetope::corolla(Preopetope::Point)
    }

    pub fn degen(p: Preopetope) -> Self {
        Preopetope::Degen(Box::new(p))
    }

    /// `{[] <- p}`.
    pub fn corolla(p: Preopetope) -> Self {
        let d = p.dim();
        let mut map = BTreeMap::new();
        map.insert(Address::empty(d), p);
        Preopetope::Nodes { dim: d + 1, map }
    }

    /// The opetopic integer `n`: `{{♦}}` for 0, else `n` arrows grafted in a line.
    pub fn integer(n: usize) -> Self {
        if n == 0 {
            return Preopetope::degen(Preopetope::Point);
        }
        let map = (0..n).map(|i| (Address::stars(i), Preopetope::arrow())).collect();
        Preopetope::Nodes { dim: 2, map }
    }

    pub fn from_map(map: BTreeMap<Address, Preopetope>) -> Result<Self> {
        let (k, _) = map.iter().next().ok_or(PreopetopeError::Empty)?;
        let d = k.dim();
        for (k, v) in &map {
            if k.dim() != d {
                return Err(PreopetopeError::DimMismatch { expected: d, found: k.dim() });
            }
            if v.dim() != d {
                return Err(PreopetopeError::DimMismatch { expected: d, found: v.dim() });
            }
        }
        Ok(Preopetope::Nodes { dim: d + 1, map })
    }

    pub fn dim(&self) -> usize {
        match self {
            Preopetope::Point => 0,
            Preopetope::Degen(p) => p.dim() + 2,
            Preopetope::Nodes { dim, .. } => *dim,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Preopetope::Degen(_))
    }

    pub fn map(&self) -> Option<&BTreeMap<Address, Preopetope>> {
        match self {
            Preopetope::Nodes { map, .. } => Some(map),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.map().map_or(0, BTreeMap::len)
    }

    pub fn nodes(&self) -> BTreeSet<Address> {
        self.map().map(|m| m.keys().cloned().collect()).unwrap_or_default()
    }

    pub fn source(&self, a: &Address) -> Result<&Preopetope> {
        let map = self.map().ok_or(PreopetopeError::NotNodes)?;
        map.get(a).ok_or_else(|| PreopetopeError::MissingAddress(a.clone()))
    }

    /// The edge decoration `s_[q] s_[p] p` at `[p[q]]`.
    pub fn edge(&self, l: &Address) -> Result<&Preopetope> {
        let (p, q) = l.split_last().ok_or_else(|| PreopetopeError::NotALeaf(l.clone()))?;
        self.source(&p)?.source(q)
    }

    pub fn leaves(&self) -> Result<BTreeSet<Address>> {
        match self {
            Preopetope::Point => Ok(BTreeSet::new()),
            Preopetope::Degen(p) => Ok(BTreeSet::from([Address::empty(p.dim() + 1)])),
            Preopetope::Nodes { dim: 1, .. } => Err(PreopetopeError::LeavesOfArrow),
            Preopetope::Nodes { map, .. } => {
                let mut out = BTreeSet::new();
                for (p, s) in map {
                    for q in s.nodes() {
                        let l = p.push(q)?;
                        if !map.contains_key(&l) {
                            out.insert(l);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn is_leaf(&self, l: &Address) -> bool {
        let Some(map) = self.map() else { return false };
        if self.dim() < 2 || map.contains_key(l) {
            return false;
        }
        match l.split_last() {
            Some((p, q)) => map.get(&p).is_some_and(|s| s.map().is_some_and(|m| m.contains_key(q))),
            None => false,
        }
    }

    pub fn improper_graft(&self, r: &Address, q: Preopetope) -> Result<Preopetope> {
        let Preopetope::Nodes { dim, map } = self else {
            return Err(PreopetopeError::NotNodes);
        };
        if q.dim() + 1 != *dim {
            return Err(PreopetopeError::DimMismatch { expected: dim - 1, found: q.dim() });
        }
        if !self.is_leaf(r) {
            return Err(PreopetopeError::NotALeaf(r.clone()));
        }
        let mut map = map.clone();
        map.insert(r.clone(), q);
        Ok(Preopetope::Nodes { dim: *dim, map })
    }

    /// Entries in lexicographic order; refolding them by improper grafting rebuilds `self`.
    pub fn decompose(&self) -> Result<Vec<(Address, Preopetope)>> {
        let map = self.map().ok_or(PreopetopeError::NotNodes)?;
        Ok(map.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
    }

    pub fn refold(entries: &[(Address, Preopetope)]) -> Result<Preopetope> {
        let (first, rest) = entries.split_first().ok_or(PreopetopeError::Empty)?;
        let mut p = Preopetope::from_map(BTreeMap::from([first.clone()]))?;
        for (k, v) in rest {
            p = p.improper_graft(k, v.clone())?;
        }
        Ok(p)
    }

    /// `t ▢_[at] q`, rewriting the keys of `t` through the readdressing `ups` of `q`.
    pub fn substitute(&self, at: &Address, q: &Preopetope, ups: &Readdressing) -> Result<Preopetope> {
        let Preopetope::Nodes { dim, map } = self else {
            return Err(PreopetopeError::NotNodes);
        };
        if q.dim() != *dim {
            return Err(PreopetopeError::DimMismatch { expected: *dim, found: q.dim() });
        }
        if !map.contains_key(at) {
            return Err(PreopetopeError::MissingAddress(at.clone()));
        }
        if *dim == 1 {
            return Ok(q.clone());
        }
        if map.len() == 1 && q.is_degenerate() {
            return Ok(q.clone());
        }
        let inverse: BTreeMap<&Address, &Address> = ups.iter().map(|(l, n)| (n, l)).collect();
        let mut out = BTreeMap::new();
        let k0 = at.len();
        for (k, v) in map {
            if k == at {
                continue;
            }
            let key = if at.is_prefix(k)? {
                let b = &k.items()[k0];
                let a = inverse.get(b).ok_or_else(|| PreopetopeError::Readdress(k.clone()))?;
                let mut items = at.items().to_vec();
                items.extend(a.items().iter().cloned());
                items.extend(k.items()[k0 + 1..].iter().cloned());
                Address::seq(*dim - 1, items)?
            } else {
                k.clone()
            };
            if out.insert(key.clone(), v.clone()).is_some() {
                return Err(PreopetopeError::Collision(key));
            }
        }
        if let Some(qmap) = q.map() {
            for (qk, v) in qmap {
                let key = at.concat(qk)?;
                if out.insert(key.clone(), v.clone()).is_some() {
                    return Err(PreopetopeError::Collision(key));
                }
            }
        }
        Preopetope::from_map(out)
    }

    /// Sub-preopetopes reachable through sources, including `self`.
    pub fn subterms(&self) -> Vec<&Preopetope> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            match out[i] {
                Preopetope::Point => {}
                Preopetope::Degen(p) => out.push(p),
                Preopetope::Nodes { map, .. } => out.extend(map.values()),
            }
            i += 1;
        }
        out
    }
}

impl fmt::Display for Preopetope {
    /// Bracket form: `point`, `degen{ p }`, `{ k <- p; ... }`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preopetope::Point => write!(f, "point"),
            Preopetope::Degen(p) => write!(f, "degen{{ {p} }}"),
            Preopetope::Nodes { map, .. } => {
                write!(f, "{{ ")?;
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{k} <- {v}")?;
                }
                write!(f, " }}")
            }
        }
    }
}

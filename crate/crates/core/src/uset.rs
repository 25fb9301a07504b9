//! Shape-annotated contexts: opetopic sets in the unnamed calculus.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::address::Address;
use crate::complex::{Cell, Complex};
use crate::preopetope::Preopetope;
use crate::unnamed::{self, Rejection};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeMismatch {
    pub addr: Address,
    pub name: String,
    pub found: Preopetope,
    pub expected: Preopetope,
}

/// A pasting diagram whose nodes do not agree along an inner edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerMismatch {
    pub addr: Address,
    pub q: Address,
    pub outer: String,
    pub inner: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UsetError {
    #[error("name {0} is already used")]
    Duplicate(String),
    #[error("unknown cell {0}")]
    Unknown(String),
    #[error("shape is not an opetope: {0}")]
    NotOpetope(Rejection),
    #[error("graft needs a non-degenerate shape")]
    DegenerateShape,
    #[error("assignment does not cover node {0}")]
    Missing(Address),
    #[error("{0} is not a node of the shape")]
    Extra(Address),
    #[error("cell {} at {} has shape {}, expected {}", .0.name, .0.addr, .0.found, .0.expected)]
    ShapeMismatch(Box<ShapeMismatch>),
    #[error("Inner fails at {}: t {} = {} but s_{} {} = {}", .0.addr, .0.outer, .0.lhs, .0.q, .0.inner, .0.rhs)]
    Inner(Box<InnerMismatch>),
    #[error("filler {filler} has shape {found}, expected the target {expected}")]
    FillerShape { filler: String, found: Preopetope, expected: Preopetope },
    #[error("Glob1 fails: t s_[] P = {lhs} but t {filler} = {rhs}")]
    Glob1 { filler: String, lhs: String, rhs: String },
    #[error("Glob2 fails at leaf {leaf} (readdressed to {image}): {lhs} versus {rhs}")]
    Glob2 { leaf: Address, image: Address, lhs: String, rhs: String },
    #[error("Degen fails: the source of {filler} is not {{[] <- {target}}}")]
    Degen { filler: String, target: String },
}

type Result<T> = std::result::Result<T, UsetError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UCell {
    pub name: String,
    pub shape: Preopetope,
    pub srcs: BTreeMap<Address, String>,
    pub tgt: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UContext {
    pub cells: Vec<UCell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UPastingDiagram {
    Degenerate(String),
    Nodes { shape: Preopetope, assignment: BTreeMap<Address, String> },
}

impl UContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Result<&UCell> {
        self.cells.iter().find(|c| c.name == name).ok_or_else(|| UsetError::Unknown(name.to_string()))
    }

    fn fresh(&self, name: &str) -> Result<()> {
        match self.cells.iter().any(|c| c.name == name) {
            true => Err(UsetError::Duplicate(name.to_string())),
            false => Ok(()),
        }
    }

    fn target(&self, name: &str) -> Option<&str> {
        self.get(name).ok().and_then(|c| c.tgt.as_deref())
    }

    fn source(&self, name: &str, a: &Address) -> Option<&str> {
        self.get(name).ok().and_then(|c| c.srcs.get(a).map(String::as_str))
    }
}

impl fmt::Display for UContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            write!(f, "{} : ", c.name)?;
            if c.shape == Preopetope::Point {
                writeln!(f, "point")?;
                continue;
            }
            if c.srcs.is_empty() {
                write!(f, "degen")?;
            } else {
                write!(f, "{{")?;
                for (i, (a, s)) in c.srcs.iter().enumerate() {
                    write!(f, "{}{a} <- {s}", if i > 0 { "; " } else { " " })?;
                }
                write!(f, " }}")?;
            }
            writeln!(f, " -> {}", c.tgt.as_deref().unwrap_or("?"))?;
        }
        Ok(())
    }
}

impl UPastingDiagram {
    pub fn shape(&self, ctx: &UContext) -> Result<Preopetope> {
        match self {
            UPastingDiagram::Degenerate(b) => Ok(Preopetope::degen(ctx.get(b)?.shape.clone())),
            UPastingDiagram::Nodes { shape, .. } => Ok(shape.clone()),
        }
    }
}

pub fn u_point(ctx: &UContext, name: &str) -> Result<UContext> {
    ctx.fresh(name)?;
    let mut out = ctx.clone();
    out.cells.push(UCell { name: name.to_string(), shape: Preopetope::Point, srcs: BTreeMap::new(), tgt: None });
    Ok(out)
}

pub fn u_degen(ctx: &UContext, base: &str) -> Result<UPastingDiagram> {
    ctx.get(base)?;
    Ok(UPastingDiagram::Degenerate(base.to_string()))
}

pub fn u_graft(ctx: &UContext, shape: &Preopetope, assignment: &BTreeMap<Address, String>) -> Result<UPastingDiagram> {
    unnamed::derive(shape).map_err(UsetError::NotOpetope)?;
    let Preopetope::Nodes { map, .. } = shape else { return Err(UsetError::DegenerateShape) };
    if let Some(k) = assignment.keys().find(|k| !map.contains_key(*k)) {
        return Err(UsetError::Extra(k.clone()));
    }
    for (addr, psi) in map {
        let name = assignment.get(addr).ok_or_else(|| UsetError::Missing(addr.clone()))?;
        let cell = ctx.get(name)?;
        if &cell.shape != psi {
            return Err(UsetError::ShapeMismatch(Box::new(ShapeMismatch {
                addr: addr.clone(),
                name: name.clone(),
                found: cell.shape.clone(),
                expected: psi.clone(),
            })));
        }
    }
    for (addr, outer) in assignment {
        let Some((p, q)) = addr.split_last() else { continue };
        let inner = &assignment[&p];
        let (lhs, rhs) = (ctx.target(outer), ctx.source(inner, q));
        if lhs != rhs || lhs.is_none() {
            return Err(UsetError::Inner(Box::new(InnerMismatch {
                addr: addr.clone(),
                q: q.clone(),
                outer: outer.clone(),
                inner: inner.clone(),
                lhs: lhs.unwrap_or("?").to_string(),
                rhs: rhs.unwrap_or("?").to_string(),
            })));
        }
    }
    Ok(UPastingDiagram::Nodes { shape: shape.clone(), assignment: assignment.clone() })
}

pub fn u_shift(ctx: &UContext, pd: &UPastingDiagram, filler: &str, name: &str) -> Result<UContext> {
    ctx.fresh(name)?;
    let shape = pd.shape(ctx)?;
    let derived = unnamed::derive(&shape).map_err(UsetError::NotOpetope)?;
    let (tshape, readdr) = (derived.tgt, derived.ctx);
    let x = ctx.get(filler)?;
    let expected = tshape.unwrap_or(Preopetope::Point);
    if x.shape != expected {
        return Err(UsetError::FillerShape { filler: filler.to_string(), found: x.shape.clone(), expected });
    }
    let srcs = match pd {
        UPastingDiagram::Degenerate(_) => {
            let root = Address::empty(x.shape.dim() - 1);
            if x.srcs.len() != 1 || x.srcs.get(&root) != x.tgt.as_ref() {
                return Err(UsetError::Degen {
                    filler: filler.to_string(),
                    target: x.tgt.clone().unwrap_or_default(),
                });
            }
            BTreeMap::new()
        }
        UPastingDiagram::Nodes { assignment, .. } => {
            let n = shape.dim();
            if n >= 2 {
                let root = Address::empty(n - 1);
                let lhs = ctx.target(&assignment[&root]);
                if lhs != x.tgt.as_deref() {
                    return Err(UsetError::Glob1 {
                        filler: filler.to_string(),
                        lhs: lhs.unwrap_or("?").to_string(),
                        rhs: x.tgt.clone().unwrap_or_default(),
                    });
                }
            }
            for leaf in readdr.keys() {
                let Some((p, q)) = leaf.split_last() else { continue };
                let lhs = assignment.get(&p).and_then(|c| ctx.source(c, q));
                let image = readdr[leaf].clone();
                let rhs = ctx.source(filler, &image);
                if lhs != rhs {
                    return Err(UsetError::Glob2 {
                        leaf: leaf.clone(),
                        image,
                        lhs: lhs.unwrap_or("?").to_string(),
                        rhs: rhs.unwrap_or("?").to_string(),
                    });
                }
            }
            assignment.clone()
        }
    };
    let mut out = ctx.clone();
    out.cells.push(UCell { name: name.to_string(), shape, srcs, tgt: Some(filler.to_string()) });
    Ok(out)
}

/// The cells of a context with their faces, in context order.
pub fn u_materialize(ctx: &UContext) -> Complex {
    let index: BTreeMap<&str, usize> = ctx.cells.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect();
    let cells = ctx
        .cells
        .iter()
        .map(|c| Cell {
            names: vec![c.name.clone()],
            dim: c.shape.dim(),
            shape: c.shape.clone(),
            sources: c.srcs.iter().map(|(a, s)| (a.clone(), index[s.as_str()])).collect(),
            target: c.tgt.as_ref().map(|t| index[t.as_str()]),
        })
        .collect();
    Complex { cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::check_identities;

    fn assign(pairs: &[(Address, &str)]) -> BTreeMap<Address, String> {
        pairs.iter().map(|(a, n)| (a.clone(), n.to_string())).collect()
    }

    fn arrow(ctx: &UContext, src: &str, tgt: &str, name: &str) -> Result<UContext> {
        let pd = u_graft(ctx, &Preopetope::arrow(), &assign(&[(Address::atom(), src)]))?;
        u_shift(ctx, &pd, tgt, name)
    }

    #[test]
    fn non_representable_set() {
        let c = u_point(&UContext::new(), "a").unwrap();
        let c = u_point(&c, "b").unwrap();
        assert!(u_point(&c, "a").is_err());
        let c = arrow(&c, "a", "b", "f").unwrap();
        let c = arrow(&c, "a", "b", "g").unwrap();
        let c = arrow(&c, "b", "a", "h").unwrap();
        let one = Preopetope::integer(1);
        let pd = u_graft(&c, &one, &assign(&[(Address::empty(1), "f")])).unwrap();
        assert!(matches!(u_shift(&c, &pd, "h", "beta"), Err(UsetError::Glob1 { .. })));
        let c = u_shift(&c, &pd, "g", "alpha").unwrap();
        let m = u_materialize(&c);
        assert_eq!(m.cells.len(), 6);
        check_identities(&m).unwrap();
    }

    #[test]
    fn inner_violation() {
        let mut c = UContext::new();
        for p in ["a", "b", "c", "d"] {
            c = u_point(&c, p).unwrap();
        }
        let c = arrow(&c, "a", "b", "f").unwrap();
        let c = arrow(&c, "c", "d", "g").unwrap();
        let two = Preopetope::integer(2);
        let bad = assign(&[(Address::empty(1), "f"), (Address::stars(1), "g")]);
        assert!(matches!(u_graft(&c, &two, &bad), Err(UsetError::Inner(_))));
        let good = assign(&[(Address::empty(1), "g"), (Address::stars(1), "f")]);
        assert!(u_graft(&c, &two, &good).is_err());
    }

    #[test]
    fn degenerate_loop() {
        let c = u_point(&UContext::new(), "a").unwrap();
        let c = arrow(&c, "a", "a", "f").unwrap();
        let pd = u_degen(&c, "a").unwrap();
        let c = u_shift(&c, &pd, "f", "z").unwrap();
        let m = u_materialize(&c);
        check_identities(&m).unwrap();
        let c = u_point(&c, "b").unwrap();
        let c = arrow(&c, "a", "b", "g").unwrap();
        assert!(matches!(u_shift(&c, &pd, "g", "y"), Err(UsetError::Degen { .. })));
    }
}

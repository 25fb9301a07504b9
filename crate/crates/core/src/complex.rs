//! Explicit cells with faces, built from an OCMT, plus the opetopic identities and isomorphism.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::address::Address;
use crate::coding::{code_var, CodingError};
use crate::named::{lookup_type, var_address, AddressMode, Var};
use crate::nset::Ocmt;
use crate::preopetope::Preopetope;
use crate::unnamed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("cell {0} has no target in the context")]
    MissingTarget(String),
    #[error("members of one class disagree: {0}")]
    IllDefined(String),
    #[error("identity {law} fails at {cell}")]
    Identity { law: &'static str, cell: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub names: Vec<String>,
    pub dim: usize,
    pub shape: Preopetope,
    /// Node address of the shape to the cell sitting there.
    pub sources: BTreeMap<Address, usize>,
    pub target: Option<usize>,
}

impl Cell {
    pub fn name(&self) -> &str {
        &self.names[0]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Complex {
    pub cells: Vec<Cell>,
}

impl Complex {
    pub fn count_by_dim(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.dim).or_insert(0) += 1;
        }
        m
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.names.iter().any(|n| n == name))
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            write!(f, "{} (dim {}) shape {}", c.names.join(" = "), c.dim, c.shape)?;
            if let Some(t) = c.target {
                write!(f, "; t = {}", self.cells[t].name())?;
            }
            for (a, s) in &c.sources {
                write!(f, "; s{a} = {}", self.cells[*s].name())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

type Faces = (Preopetope, BTreeMap<Address, Var>, Option<Var>);

fn faces_of(o: &Ocmt, v: &Var) -> Result<Faces, ComplexError> {
    let shape = code_var(&o.ctx, &o.theory, v)?;
    let mut sources = BTreeMap::new();
    if let Some(s) = lookup_type(&o.ctx, v).map_err(CodingError::from)?.source() {
        if !s.is_degenerate() {
            for z in s.top_vars() {
                let a = var_address(&o.ctx, &o.theory, s, &z, AddressMode::Node).map_err(CodingError::from)?;
                sources.insert(a, z);
            }
        }
    }
    let target = v.target().filter(|t| o.ctx.contains_key(t));
    Ok((shape, sources, target))
}

/// One cell per class of variables; faces are read off the types.
pub fn materialize(o: &Ocmt) -> Result<Complex, ComplexError> {
    let mut classes: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
    for v in o.ctx.keys() {
        classes.entry(o.theory.find(v)).or_default().push(v.clone());
    }
    let mut order: Vec<(&Var, &Vec<Var>)> = classes.iter().collect();
    order.sort_by(|a, b| (a.0.dim, a.0).cmp(&(b.0.dim, b.0)));
    let index: HashMap<Var, usize> = order.iter().enumerate().map(|(i, (r, _))| ((*r).clone(), i)).collect();
    let id = |v: &Var| index[&o.theory.find(v)];
    let mut cells = Vec::with_capacity(order.len());
    for (rep, members) in order {
        let mut resolved: Option<(Preopetope, BTreeMap<Address, usize>)> = None;
        let mut target: Option<usize> = None;
        for m in members {
            let (shape, srcs, t) = faces_of(o, m)?;
            let srcs: BTreeMap<Address, usize> = srcs.iter().map(|(a, z)| (a.clone(), id(z))).collect();
            match &resolved {
                None => resolved = Some((shape, srcs)),
                Some((s0, f0)) => {
                    if *s0 != shape || *f0 != srcs {
                        return Err(ComplexError::IllDefined(format!("{rep} and {m} have different sources")));
                    }
                }
            }
            if let Some(t) = t {
                let t = id(&t);
                match target {
                    Some(t0) if t0 != t => {
                        return Err(ComplexError::IllDefined(format!("{rep} and {m} have different targets")));
                    }
                    _ => target = Some(t),
                }
            }
        }
        if rep.dim > 0 && target.is_none() {
            return Err(ComplexError::MissingTarget(rep.to_string()));
        }
        let (shape, sources) = resolved.expect("classes are nonempty");
        let mut names: Vec<String> = members.iter().map(ToString::to_string).collect();
        names.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        cells.push(Cell { names, dim: rep.dim, shape, sources, target });
    }
    Ok(Complex { cells })
}

/// Checks face shapes and the four identities relating sources and targets.
pub fn check_identities(c: &Complex) -> Result<(), ComplexError> {
    let fail = |law: &'static str, i: usize| Err(ComplexError::Identity { law, cell: c.cells[i].name().to_string() });
    let t = |i: usize| c.cells[i].target;
    let s = |i: usize, a: &Address| c.cells[i].sources.get(a).copied();
    for (i, cell) in c.cells.iter().enumerate() {
        if cell.dim == 0 {
            continue;
        }
        let (tshape, readdr) = unnamed::target_of(&cell.shape)
            .map_err(|e| ComplexError::IllDefined(format!("{}: {e}", cell.name())))?;
        let Some(ti) = cell.target else { return fail("target", i) };
        if Some(&c.cells[ti].shape) != tshape.as_ref() {
            return fail("target shape", i);
        }
        for (a, si) in &cell.sources {
            if cell.shape.source(a).ok() != Some(&c.cells[*si].shape) {
                return fail("source shape", i);
            }
        }
        if cell.dim < 2 {
            continue;
        }
        if cell.shape.is_degenerate() {
            let root = Address::empty(cell.dim - 2);
            if s(ti, &root) != t(ti) {
                return fail("degeneracy", i);
            }
            continue;
        }
        let root = Address::empty(cell.dim - 1);
        if s(i, &root).and_then(t) != t(ti) {
            return fail("globularity (target)", i);
        }
        for (k, si) in &cell.sources {
            let Some((p, q)) = k.split_last() else { continue };
            if t(*si) != s(i, &p).and_then(|sp| s(sp, q)) {
                return fail("inner edge", i);
            }
        }
        for leaf in cell.shape.leaves().map_err(|e| ComplexError::IllDefined(e.to_string()))? {
            let Some((p, q)) = leaf.split_last() else { continue };
            let lhs = s(i, &p).and_then(|sp| s(sp, q));
            let rhs = readdr.get(&leaf).and_then(|a| s(ti, a));
            if lhs != rhs {
                return fail("globularity (sources)", i);
            }
        }
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    Target,
    Source(Address),
}

/// Joint colour refinement of two complexes viewed as one disjoint union.
fn refine(cells: &[&Cell], offset: usize, mut colors: Vec<u64>) -> Vec<u64> {
    let global = |side: usize, j: usize| if side == 0 { j } else { offset + j };
    let side_of = |i: usize| usize::from(i >= offset);
    let mut cofaces: Vec<Vec<(Role, usize)>> = vec![Vec::new(); cells.len()];
    for (i, c) in cells.iter().enumerate() {
        let sd = side_of(i);
        if let Some(t) = c.target {
            cofaces[global(sd, t)].push((Role::Target, i));
        }
        for (a, s) in &c.sources {
            cofaces[global(sd, *s)].push((Role::Source(a.clone()), i));
        }
    }
    loop {
        type Sig = (u64, Option<u64>, Vec<(Address, u64)>, Vec<(Role, u64)>);
        let sigs: Vec<Sig> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let sd = side_of(i);
                let t = c.target.map(|t| colors[global(sd, t)]);
                let s = c.sources.iter().map(|(a, s)| (a.clone(), colors[global(sd, *s)])).collect();
                let mut co: Vec<(Role, u64)> = cofaces[i].iter().map(|(r, j)| (r.clone(), colors[*j])).collect();
                co.sort();
                (colors[i], t, s, co)
            })
            .collect();
        let mut table: BTreeMap<&Sig, u64> = BTreeMap::new();
        for s in &sigs {
            table.insert(s, 0);
        }
        for (n, v) in table.values_mut().enumerate() {
            *v = n as u64;
        }
        let next: Vec<u64> = sigs.iter().map(|s| table[s]).collect();
        let classes = |v: &[u64]| v.iter().collect::<std::collections::BTreeSet<_>>().len();
        if classes(&next) == classes(&colors) {
            return next;
        }
        colors = next;
    }
}

fn histogram(colors: &[u64]) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for c in colors {
        *h.entry(*c).or_insert(0) += 1;
    }
    h
}

fn is_iso(a: &Complex, b: &Complex, f: &[usize]) -> bool {
    a.cells.iter().enumerate().all(|(i, c)| {
        let d = &b.cells[f[i]];
        c.dim == d.dim
            && c.shape == d.shape
            && c.target.map(|t| f[t]) == d.target
            && c.sources.len() == d.sources.len()
            && c.sources.iter().all(|(k, s)| d.sources.get(k) == Some(&f[*s]))
    })
}

fn search(a: &Complex, b: &Complex, cells: &[&Cell], colors: Vec<u64>) -> Option<Vec<usize>> {
    let n = a.cells.len();
    let colors = refine(cells, n, colors);
    if histogram(&colors[..n]) != histogram(&colors[n..]) {
        return None;
    }
    let h = histogram(&colors[..n]);
    let pick = (0..n).filter(|i| h[&colors[*i]] > 1).min_by_key(|i| (h[&colors[*i]], *i));
    match pick {
        None => {
            let f: Vec<usize> =
                (0..n).map(|i| (n..2 * n).find(|j| colors[*j] == colors[i]).expect("same histogram") - n).collect();
            is_iso(a, b, &f).then_some(f)
        }
        Some(i) => {
            let fresh = colors.iter().max().copied().unwrap_or(0) + 1;
            for j in (n..2 * n).filter(|j| colors[*j] == colors[i]) {
                let mut c = colors.clone();
                c[i] = fresh;
                c[j] = fresh;
                if let Some(f) = search(a, b, cells, c) {
                    return Some(f);
                }
            }
            None
        }
    }
}

/// An isomorphism `a → b` as a map on cell indices, if one exists.
pub fn isomorphism(a: &Complex, b: &Complex) -> Option<Vec<usize>> {
    if a.cells.len() != b.cells.len() {
        return None;
    }
    let cells: Vec<&Cell> = a.cells.iter().chain(&b.cells).collect();
    let mut shapes: BTreeMap<(usize, &Preopetope), u64> = BTreeMap::new();
    for c in &cells {
        shapes.insert((c.dim, &c.shape), 0);
    }
    for (n, v) in shapes.values_mut().enumerate() {
        *v = n as u64;
    }
    let colors = cells.iter().map(|c| shapes[&(c.dim, &c.shape)]).collect();
    search(a, b, &cells, colors)
}

pub fn isomorphic(a: &Complex, b: &Complex) -> bool {
    isomorphism(a, b).is_some()
}

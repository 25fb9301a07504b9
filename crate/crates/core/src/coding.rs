//! Translations between named sequents and preopetopes.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::address::Address;
use crate::named::{
    lookup_type, source_of, var_address, AddressMode, Context, EqTheory, NamedError, Sequent, Term, Var,
};
use crate::nderiv::{n_degen_shift, n_graft, n_point, n_shift};
use crate::preopetope::{Preopetope, PreopetopeError};
use crate::unnamed::{self, Rejection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error(transparent)]
    Named(#[from] NamedError),
    #[error(transparent)]
    Preopetope(#[from] PreopetopeError),
    #[error("not an opetope: {0}")]
    Rejected(Rejection),
    #[error("cannot align sub-derivation: {0}")]
    Align(String),
}

type Result<T> = std::result::Result<T, CodingError>;

/// Deterministic fresh names `{prefix}{dim}_{n}`.
#[derive(Debug, Clone)]
pub struct Namer {
    prefix: String,
    counters: BTreeMap<usize, usize>,
}

impl Namer {
    pub fn new(prefix: &str) -> Self {
        Namer { prefix: prefix.to_string(), counters: BTreeMap::new() }
    }

    pub fn fresh(&mut self, dim: usize) -> String {
        let c = self.counters.entry(dim).or_insert(0);
        let name = format!("{}{}_{}", self.prefix, dim, c);
        *c += 1;
        name
    }
}

impl Default for Namer {
    fn default() -> Self {
        Namer::new("v")
    }
}

/// The pasting diagram of a term `t ∈ T_n`, an (n+1)-preopetope.
pub fn code_term(ctx: &Context, th: &EqTheory, t: &Term) -> Result<Preopetope> {
    match t {
        Term::Degen(x) => Ok(Preopetope::degen(code_var(ctx, th, x)?)),
        Term::Node { .. } => {
            let mut map = BTreeMap::new();
            for z in t.top_vars() {
                let addr = var_address(ctx, th, t, &z, AddressMode::Node)?;
                map.insert(addr, code_var(ctx, th, &z)?);
            }
            Ok(Preopetope::from_map(map)?)
        }
    }
}

/// The shape of a cell: `♦` for points, otherwise the pasting diagram of its source.
pub fn code_var(ctx: &Context, th: &EqTheory, x: &Var) -> Result<Preopetope> {
    match source_of(ctx, x)? {
        None => Ok(Preopetope::Point),
        Some(s) => code_term(ctx, th, s),
    }
}

pub fn to_preopetope(s: &Sequent) -> Result<Preopetope> {
    match s.term.as_var() {
        Some(x) => code_var(&s.ctx, &s.theory, x),
        None => code_term(&s.ctx, &s.theory, &s.term),
    }
}

/// A named derivation tree, replayable through the rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedDerivation {
    Point(String),
    Shift(Box<NamedDerivation>, String),
    DegenShift(Box<NamedDerivation>, String),
    Graft(Box<NamedDerivation>, String, Box<NamedDerivation>),
}

impl NamedDerivation {
    pub fn rename(&self, m: &BTreeMap<String, String>) -> NamedDerivation {
        let r = |n: &String| m.get(n).cloned().unwrap_or_else(|| n.clone());
        match self {
            NamedDerivation::Point(n) => NamedDerivation::Point(r(n)),
            NamedDerivation::Shift(d, n) => NamedDerivation::Shift(Box::new(d.rename(m)), r(n)),
            NamedDerivation::DegenShift(d, n) => NamedDerivation::DegenShift(Box::new(d.rename(m)), r(n)),
            NamedDerivation::Graft(d, a, x) => {
                NamedDerivation::Graft(Box::new(d.rename(m)), r(a), Box::new(x.rename(m)))
            }
        }
    }

    pub fn replay(&self) -> Result<Sequent> {
        Ok(match self {
            NamedDerivation::Point(n) => n_point(n),
            NamedDerivation::Shift(d, n) => n_shift(&d.replay()?, n)?,
            NamedDerivation::DegenShift(d, n) => n_degen_shift(&d.replay()?, n)?,
            NamedDerivation::Graft(d, a, x) => {
                let s = d.replay()?;
                let av = s.find_var(a).ok_or_else(|| CodingError::Align(format!("no variable {a}")))?;
                n_graft(&s, &av, &x.replay()?)?
            }
        })
    }
}

/// A derivable sequent on a fresh variable whose shape is `p`.
pub fn to_named(p: &Preopetope, namer: &mut Namer) -> Result<Sequent> {
    Ok(to_named_derivation(p, namer)?.0)
}

/// Like [`to_named`], also returning the derivation that produced it.
pub fn to_named_derivation(p: &Preopetope, namer: &mut Namer) -> Result<(Sequent, NamedDerivation)> {
    unnamed::derive(p).map_err(CodingError::Rejected)?;
    named_of(p, namer)
}

fn named_of(p: &Preopetope, namer: &mut Namer) -> Result<(Sequent, NamedDerivation)> {
    match p {
        Preopetope::Point => {
            let n = namer.fresh(0);
            Ok((n_point(&n), NamedDerivation::Point(n)))
        }
        Preopetope::Degen(q) => {
            let (inner, d) = named_of(q, namer)?;
            let n = namer.fresh(p.dim());
            Ok((n_degen_shift(&inner, &n)?, NamedDerivation::DegenShift(Box::new(d), n)))
        }
        Preopetope::Nodes { dim, map } => {
            let mut entries = map.iter();
            let (_, first) = entries.next().ok_or(PreopetopeError::Empty)?;
            let (mut pd, mut d) = named_of(first, namer)?;
            for (k, psi) in entries {
                let a = leaf_var(&pd, k)?;
                let (x, dx) = named_of(psi, namer)?;
                let m = align(&x, &pd, &a)?;
                let x = x.rename(&|v: &Var| m.get(v).cloned().unwrap_or_else(|| v.clone()));
                let names = m.iter().map(|(u, w)| (u.name.to_string(), w.name.to_string())).collect();
                pd = n_graft(&pd, &a, &x)?;
                d = NamedDerivation::Graft(Box::new(d), a.name.to_string(), Box::new(dx.rename(&names)));
            }
            let n = namer.fresh(*dim);
            Ok((n_shift(&pd, &n)?, NamedDerivation::Shift(Box::new(d), n)))
        }
    }
}

/// The variable of `s t` sitting at leaf `k` of the pasting diagram `t`.
fn leaf_var(pd: &Sequent, k: &Address) -> Result<Var> {
    let st = pd.ty.source().ok_or_else(|| CodingError::Align("point has no leaves".into()))?;
    for a in st.top_vars() {
        if let Ok(addr) = var_address(&pd.ctx, &pd.theory, &pd.term, &a, AddressMode::Leaf) {
            if &addr == k {
                return Ok(a);
            }
        }
    }
    Err(CodingError::Align(format!("no leaf variable at {k}")))
}

/// The renaming of `x` that makes `s s x` literally `s a` in `pd`.
fn align(x: &Sequent, pd: &Sequent, a: &Var) -> Result<BTreeMap<Var, Var>> {
    let pattern = x.ty.0.get(1);
    let target = lookup_type(&pd.ctx, a)?.source();
    let mut m: BTreeMap<Var, Var> = BTreeMap::new();
    match (pattern, target) {
        (None, None) => {}
        (Some(p), Some(t)) => match_terms(x, pd, p, t, &mut m)?,
        _ => return Err(CodingError::Align("dimension mismatch".into())),
    }
    Ok(m)
}

fn match_terms(x: &Sequent, pd: &Sequent, p: &Term, t: &Term, m: &mut BTreeMap<Var, Var>) -> Result<()> {
    match (p, t) {
        (Term::Degen(u), Term::Degen(w)) => bind(x, pd, u, w, m),
        (Term::Node { .. }, Term::Node { .. }) => {
            let tv = t.top_vars();
            for z in p.top_vars() {
                let addr = var_address(&x.ctx, &x.theory, p, &z, AddressMode::Node)?;
                let w = tv
                    .iter()
                    .find(|w| {
                        var_address(&pd.ctx, &pd.theory, t, w, AddressMode::Node).ok().as_ref() == Some(&addr)
                    })
                    .ok_or_else(|| CodingError::Align(format!("no counterpart at {addr}")))?;
                bind(x, pd, &z, w, m)?;
            }
            Ok(())
        }
        _ => Err(CodingError::Align(format!("{p} against {t}"))),
    }
}

fn bind(x: &Sequent, pd: &Sequent, u: &Var, w: &Var, m: &mut BTreeMap<Var, Var>) -> Result<()> {
    if let Some(prev) = m.get(u) {
        if prev == w || pd.theory.eq(prev, w) {
            return Ok(());
        }
        return Err(CodingError::Align(format!("{u} bound to both {prev} and {w}")));
    }
    m.insert(u.clone(), w.clone());
    let (tu, tw) = (lookup_type(&x.ctx, u)?.clone(), lookup_type(&pd.ctx, w)?.clone());
    if tu.0.len() != tw.0.len() {
        return Err(CodingError::Align(format!("{u} and {w} differ in dimension")));
    }
    for (a, b) in tu.0.iter().zip(&tw.0) {
        match_terms(x, pd, a, b, m)?;
    }
    Ok(())
}

/// Whether the second source of a variable codes to the target of its shape.
pub fn target_consistency(s: &Sequent) -> Result<bool> {
    let Some(x) = s.term.as_var() else { return Ok(false) };
    let shape = code_var(&s.ctx, &s.theory, x)?;
    let (tgt, _) = unnamed::target_of(&shape).map_err(|e| CodingError::Align(e.to_string()))?;
    let ss = match s.ty.0.get(1) {
        Some(t) => Some(code_term(&s.ctx, &s.theory, t)?),
        None if s.ty.0.len() == 1 => Some(Preopetope::Point),
        None => None,
    };
    Ok(ss == tgt)
}

/// `&_{s̄ r} b = ℘(&_r b)` for every leaf variable `b` of a pasting-diagram term `r`.
pub fn check_named_readdressing(ctx: &Context, th: &EqTheory, r: &Term) -> Result<bool> {
    let mut th2 = th.clone();
    let Some(sr) = crate::named::source_bar(ctx, &mut th2, r)? else { return Ok(true) };
    let code = code_term(ctx, th, r)?;
    if code.dim() < 2 {
        return Ok(true);
    }
    let (_, ctx_p) = unnamed::target_of(&code).map_err(|e| CodingError::Align(e.to_string()))?;
    for b in sr.top_vars() {
        let leaf = var_address(ctx, th, r, &b, AddressMode::Leaf)?;
        let node = var_address(ctx, &th2, &sr, &b, AddressMode::Node)?;
        if ctx_p.get(&leaf) != Some(&node) {
            return Ok(false);
        }
    }
    Ok(true)
}

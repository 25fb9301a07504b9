//! Opetopic contexts modulo theory: the repr/zero/sum/glue rules and the mixed system.

use std::collections::BTreeSet;
use std::fmt;

use crate::named::{lookup_type, Context, EqTheory, NamedError, Result, Sequent, Term, Type, Var};
use crate::nderiv::{graft_union, n_degen};

/// A finite opetopic set presented by a context and a theory.
#[derive(Debug, Clone, Default)]
pub struct Ocmt {
    pub theory: EqTheory,
    pub ctx: Context,
}

impl Ocmt {
    pub fn find_var(&self, name: &str) -> Option<Var> {
        crate::named::find_var(&self.ctx, name)
    }

    pub fn base_names(&self) -> BTreeSet<String> {
        self.ctx.keys().map(|v| v.name.to_string()).collect()
    }
}

impl fmt::Display for Ocmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |> ", self.theory)?;
        let mut entries: Vec<(&Var, &Type)> = self.ctx.iter().collect();
        entries.sort_by(|a, b| (b.0.dim, a.0).cmp(&(a.0.dim, b.0)));
        for (i, (v, t)) in entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} : {t}")?;
        }
        Ok(())
    }
}

/// Adds `t^k a` for every untagged `a` and `1 ≤ k ≤ dim a`, typed by the tail of `a`'s chain.
fn add_tags(ctx: &mut Context, vars: &[Var]) {
    for a in vars {
        let ty = ctx[a].clone();
        for k in 1..=a.dim {
            let tk = a.nth_target(k).expect("k <= dim");
            ctx.entry(tk).or_insert_with(|| Type(ty.0[k..].to_vec()));
        }
    }
}

/// `a = b ⇒ t a = t b`, to a fixpoint.
pub fn close_under_targets(ctx: &Context, th: &mut EqTheory) {
    loop {
        let mut changed = false;
        for v in ctx.keys() {
            let r = th.find(v);
            if &r == v {
                continue;
            }
            if let (Some(tv), Some(tr)) = (v.target(), r.target()) {
                if ctx.contains_key(&tv) && ctx.contains_key(&tr) && th.union(&tv, &tr) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// `t h = b` for every argument `b <- h(...)` in `t`.
fn argument_equations(t: &Term, th: &mut EqTheory) {
    if let Term::Node { args, .. } = t {
        for (b, u) in args {
            if let Some(h) = u.head().and_then(Var::target) {
                th.union(&h, b);
            }
            argument_equations(u, th);
        }
    }
}

/// Completes a sequent on a variable with all iterated targets.
pub fn os_repr(s: &Sequent) -> Result<Ocmt> {
    s.term.as_var().ok_or_else(|| NamedError::NotVariable(s.term.clone()))?;
    let mut ctx = s.ctx.clone();
    let untagged: Vec<Var> = ctx.keys().filter(|v| v.tags == 0).cloned().collect();
    add_tags(&mut ctx, &untagged);
    let mut th = s.theory.clone();
    for ty in ctx.values() {
        for t in &ty.0 {
            argument_equations(t, &mut th);
        }
    }
    for (a, ty) in &ctx {
        match ty.source() {
            Some(Term::Node { head, .. }) if a.dim >= 2 => {
                let (tta, ty_) = (a.nth_target(2), head.target());
                if let (Some(x), Some(y)) = (tta, ty_) {
                    th.union(&x, &y);
                }
            }
            Some(Term::Degen(b)) => {
                if let Some(x) = a.nth_target(2) {
                    th.union(&x, b);
                }
            }
            _ => {}
        }
    }
    close_under_targets(&ctx, &mut th);
    Ok(Ocmt { theory: th, ctx })
}

pub fn os_zero() -> Ocmt {
    Ocmt::default()
}

pub fn os_sum(a: &Ocmt, b: &Ocmt) -> Result<Ocmt> {
    let (na, nb) = (a.base_names(), b.base_names());
    if let Some(n) = na.intersection(&nb).next() {
        return Err(NamedError::NameClash(n.clone()));
    }
    let mut ctx = a.ctx.clone();
    ctx.extend(b.ctx.iter().map(|(k, v)| (k.clone(), v.clone())));
    let mut theory = a.theory.clone();
    theory.extend(&b.theory);
    Ok(Ocmt { theory, ctx })
}

/// Unbiased sum of any number of OCMTs.
pub fn os_usum(parts: &[Ocmt]) -> Result<Ocmt> {
    parts.iter().try_fold(os_zero(), |acc, p| os_sum(&acc, p))
}

/// Identifies two parallel cells.
pub fn os_glue(o: &Ocmt, a: &Var, b: &Var) -> Result<Ocmt> {
    if a.dim != b.dim {
        return Err(NamedError::DimMismatch(a.clone(), b.clone()));
    }
    let (ta, tb) = (lookup_type(&o.ctx, a)?, lookup_type(&o.ctx, b)?);
    let th = &o.theory;
    if !th.opt_terms_eq(ta.source(), tb.source()) {
        return Err(NamedError::SourceMismatch(format!("s {a} differs from s {b}")));
    }
    if let (Some(x), Some(y)) = (a.target(), b.target()) {
        if !th.eq(&x, &y) {
            return Err(NamedError::SourceMismatch(format!("t {a} differs from t {b}")));
        }
    }
    let mut theory = o.theory.clone();
    theory.union(a, b);
    close_under_targets(&o.ctx, &mut theory);
    Ok(Ocmt { theory, ctx: o.ctx.clone() })
}

pub fn m_point(name: &str) -> Ocmt {
    Ocmt { theory: EqTheory::new(), ctx: Context::from([(Var::new(name, 0), Type::default())]) }
}

/// The pasting diagram made of the single cell `x`.
pub fn m_pd(o: &Ocmt, x: &Var) -> Result<Sequent> {
    let ty = lookup_type(&o.ctx, x)?.clone();
    Ok(Sequent { theory: o.theory.clone(), ctx: o.ctx.clone(), term: Term::var(x.clone()), ty })
}

pub fn m_degen(o: &Ocmt, x: &Var) -> Result<Sequent> {
    n_degen(&m_pd(o, x)?)
}

pub fn m_graft(s: &Sequent, a: &Var, x: &Sequent) -> Result<Sequent> {
    graft_union(s, a, x)
}

/// Fills a pasting diagram with a new cell, adding its target tower and equations.
pub fn m_shift(s: &Sequent, name: &str) -> Result<Ocmt> {
    if crate::nderiv::name_used(&s.ctx, name) {
        return Err(NamedError::NameClash(name.to_string()));
    }
    let n = s.term.dim();
    let x = Var::new(name, n + 1);
    let mut chain = vec![s.term.clone()];
    chain.extend(s.ty.0.iter().cloned());
    let mut ctx = s.ctx.clone();
    ctx.insert(x.clone(), Type(chain));
    add_tags(&mut ctx, std::slice::from_ref(&x));
    let mut th = s.theory.clone();
    match &s.term {
        Term::Degen(a) => {
            for i in 0..=a.dim {
                if let (Some(l), Some(r)) = (x.nth_target(i + 2), a.nth_target(i)) {
                    th.union(&l, &r);
                }
            }
        }
        Term::Node { head, .. } => {
            if n >= 1 {
                if let (Some(l), Some(r)) = (x.nth_target(2), head.target()) {
                    th.union(&l, &r);
                }
            }
            argument_equations(&s.term, &mut th);
        }
    }
    close_under_targets(&ctx, &mut th);
    Ok(Ocmt { theory: th, ctx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nderiv::{n_degen_shift, n_point, n_shift};

    #[test]
    fn repr_of_arrow_adds_target_only() {
        let f = n_shift(&n_point("a"), "f").unwrap();
        let o = os_repr(&f).unwrap();
        assert_eq!(o.ctx.len(), 3);
        assert!(o.theory.generators().is_empty());
    }

    #[test]
    fn repr_of_zero() {
        let z = n_degen_shift(&n_point("a"), "n0").unwrap();
        let o = os_repr(&z).unwrap();
        let n0 = o.find_var("n0").unwrap();
        assert!(o.theory.eq(&n0.nth_target(2).unwrap(), &o.find_var("a").unwrap()));
    }

    #[test]
    fn glue_requires_parallel_cells() {
        let f = os_repr(&n_shift(&n_point("a"), "f").unwrap()).unwrap();
        let g = os_repr(&n_shift(&n_point("b"), "g").unwrap()).unwrap();
        let s = os_sum(&f, &g).unwrap();
        let (fv, gv) = (s.find_var("f").unwrap(), s.find_var("g").unwrap());
        assert!(os_glue(&s, &fv, &gv).is_err());
        assert!(os_sum(&f, &f).is_err());
        let (a, b) = (s.find_var("a").unwrap(), s.find_var("b").unwrap());
        let s = os_glue(&s, &a, &b).unwrap();
        let (tf, tg) = (s.find_var("tf").unwrap(), s.find_var("tg").unwrap());
        let s = os_glue(&s, &tf, &tg).unwrap();
        assert!(os_glue(&s, &fv, &gv).is_ok());
    }

    #[test]
    fn mixed_shift_over_degenerate() {
        let o = m_point("a");
        let a = o.find_var("a").unwrap();
        let o = m_shift(&m_degen(&o, &a).unwrap(), "x").unwrap();
        let x = o.find_var("x").unwrap();
        assert!(o.theory.eq(&x.nth_target(2).unwrap(), &a));
    }
}

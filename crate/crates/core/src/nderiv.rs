//! The named sequent calculus: point, degen, shift, graft, and degen-shift.

use std::collections::{BTreeMap, BTreeSet};

use crate::named::{
    graft_notation, lookup_type, substitute, Context, EqTheory, NamedError, Result, Sequent, Term,
    Type, Var,
};

pub fn n_point(name: &str) -> Sequent {
    let x = Var::new(name, 0);
    Sequent {
        theory: EqTheory::new(),
        ctx: Context::from([(x.clone(), Type::default())]),
        term: Term::var(x),
        ty: Type::default(),
    }
}

pub fn n_degen(s: &Sequent) -> Result<Sequent> {
    let x = s.term.as_var().ok_or_else(|| NamedError::NotVariable(s.term.clone()))?.clone();
    let mut chain = vec![Term::var(x.clone())];
    chain.extend(s.ty.0.iter().cloned());
    Ok(Sequent { theory: s.theory.clone(), ctx: s.ctx.clone(), term: Term::Degen(x), ty: Type(chain) })
}

pub fn name_used(ctx: &Context, name: &str) -> bool {
    ctx.keys().any(|v| &*v.name == name)
}

pub fn n_shift(s: &Sequent, name: &str) -> Result<Sequent> {
    if name_used(&s.ctx, name) {
        return Err(NamedError::NameClash(name.to_string()));
    }
    let x = Var::new(name, s.term.dim() + 1);
    let mut chain = vec![s.term.clone()];
    chain.extend(s.ty.0.iter().cloned());
    let ty = Type(chain);
    let mut ctx = s.ctx.clone();
    ctx.insert(x.clone(), ty.clone());
    Ok(Sequent { theory: s.theory.clone(), ctx, term: Term::var(x), ty })
}

pub fn n_degen_shift(s: &Sequent, name: &str) -> Result<Sequent> {
    n_shift(&n_degen(s)?, name)
}

/// `a` together with every variable of its iterated sources.
pub fn source_closure(ctx: &Context, a: &Var) -> Result<BTreeSet<Var>> {
    let mut seen = BTreeSet::from([a.clone()]);
    let mut todo = vec![a.clone()];
    while let Some(v) = todo.pop() {
        let mut vars = BTreeSet::new();
        for t in &lookup_type(ctx, &v)?.0 {
            t.all_vars(&mut vars);
        }
        for w in vars {
            if seen.insert(w.clone()) {
                todo.push(w);
            }
        }
    }
    Ok(seen)
}

fn fresh_name(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    (1..).map(|i| format!("{base}_{i}")).find(|n| !taken(n)).expect("unbounded supply")
}

/// Renames the variables of `x` that clash with `ctx` outside `keep`.
pub fn rename_apart(x: &Sequent, ctx: &Context, keep: &BTreeSet<Var>) -> Sequent {
    let clashing: BTreeSet<String> = x
        .ctx
        .keys()
        .filter(|v| !keep.contains(v) && name_used(ctx, &v.name))
        .map(|v| v.name.to_string())
        .collect();
    if clashing.is_empty() {
        return x.clone();
    }
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for n in &clashing {
        let taken = |c: &str| name_used(ctx, c) || name_used(&x.ctx, c) || map.values().any(|m| m == c);
        let fresh = fresh_name(n, &taken);
        map.insert(n.clone(), fresh);
    }
    x.rename(&|v: &Var| match map.get(&*v.name) {
        Some(n) if !keep.contains(v) => Var { name: n.as_str().into(), tags: v.tags, dim: v.dim },
        _ => v.clone(),
    })
}

/// `t(a <- x)`, with `s a = s s x` modulo the merged theory.
pub fn n_graft(s: &Sequent, a: &Var, x: &Sequent) -> Result<Sequent> {
    graft_with(s, a, x, true)
}

/// `t(a <- x)` over the plain union of both contexts: shared names must agree.
pub fn graft_union(s: &Sequent, a: &Var, x: &Sequent) -> Result<Sequent> {
    graft_with(s, a, x, false)
}

fn graft_with(s: &Sequent, a: &Var, x: &Sequent, apart: bool) -> Result<Sequent> {
    if s.term.is_degenerate() {
        return Err(NamedError::Degenerate(s.term.clone()));
    }
    let xv = x.term.as_var().ok_or_else(|| NamedError::NotVariable(x.term.clone()))?.clone();
    if xv.dim != s.term.dim() {
        return Err(NamedError::DimMismatch(xv, s.term.head().cloned().expect("non-degenerate")));
    }
    let st = s.ty.source().ok_or_else(|| NamedError::NotGraftable(a.clone()))?;
    if !s.theory.contains(&st.top_vars(), a) {
        return Err(NamedError::NotGraftable(a.clone()));
    }
    let x = match apart {
        true => rename_apart(x, &s.ctx, &source_closure(&s.ctx, a)?),
        false => x.clone(),
    };
    let mut th = s.theory.clone();
    th.extend(&x.theory);
    let sa = lookup_type(&s.ctx, a)?.source();
    let ssx = x.ty.0.get(1);
    if !th.opt_terms_eq(sa, ssx) {
        let show = |t: Option<&Term>| t.map_or("0".to_string(), ToString::to_string);
        return Err(NamedError::SourceMismatch(format!("s {a} = {} but s s {xv} = {}", show(sa), show(ssx))));
    }
    let mut ctx = s.ctx.clone();
    for (v, ty) in &x.ctx {
        match s.ctx.get(v) {
            Some(mine) if !th.types_eq(mine, ty) => {
                return Err(NamedError::Incompatible(format!("{v} : {mine} versus {v} : {ty}")));
            }
            Some(_) => {}
            None => {
                if let Some(w) = s.ctx.keys().find(|w| w.name == v.name) {
                    return Err(NamedError::Incompatible(format!("{v} clashes with {w}")));
                }
                ctx.insert(v.clone(), ty.clone());
            }
        }
    }
    let term = graft_notation(&ctx, &th, &s.term, a, &Term::var(xv.clone()))?;
    let sx = x.ty.source().ok_or_else(|| NamedError::NotGraftable(a.clone()))?;
    let s1 = substitute(&ctx, &mut th, st, a, sx)?;
    let mut chain = vec![s1];
    chain.extend(s.ty.0[1..].iter().cloned());
    Ok(Sequent { theory: th, ctx, term, ty: Type(chain) })
}

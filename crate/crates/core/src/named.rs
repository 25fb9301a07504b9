//! Named terms, types, contexts and equational theories.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::address::{Address, AddressError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NamedError {
    #[error("variable {0} is not typed in the context")]
    Untyped(Var),
    #[error("expected a variable, found {0}")]
    NotVariable(Term),
    #[error("expected a non-degenerate term, found {0}")]
    Degenerate(Term),
    #[error("{0} does not occur in the source")]
    NotGraftable(Var),
    #[error("{0} does not occur in the term")]
    Absent(Var),
    #[error("name {0} is already used")]
    NameClash(String),
    #[error("source mismatch: {0}")]
    SourceMismatch(String),
    #[error("incompatible contexts: {0}")]
    Incompatible(String),
    #[error("malformed term: {0}")]
    Malformed(String),
    #[error("variables {0} and {1} have different dimensions")]
    DimMismatch(Var, Var),
    #[error(transparent)]
    Address(#[from] AddressError),
}

pub type Result<T> = std::result::Result<T, NamedError>;

/// A graded variable. `tags = k` marks the iterated target `t^k name`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Arc<str>,
    pub tags: usize,
    pub dim: usize,
}

impl Var {
    pub fn new(name: &str, dim: usize) -> Self {
        Var { name: Arc::from(name), tags: 0, dim }
    }

    /// `t self`, one dimension down.
    pub fn target(&self) -> Option<Var> {
        (self.dim > 0).then(|| Var { name: self.name.clone(), tags: self.tags + 1, dim: self.dim - 1 })
    }

    pub fn nth_target(&self, k: usize) -> Option<Var> {
        (k <= self.dim).then(|| Var { name: self.name.clone(), tags: self.tags + k, dim: self.dim - k })
    }

    /// The untagged variable this one is an iterated target of.
    pub fn base(&self) -> Var {
        Var { name: self.name.clone(), tags: 0, dim: self.dim + self.tags }
    }

    /// Internal form `t^k:a`.
    pub fn tagged_name(&self) -> String {
        if self.tags == 0 {
            self.name.to_string()
        } else {
            format!("t^{}:{}", self.tags, self.name)
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.tags {
            write!(f, "t")?;
        }
        write!(f, "{}", self.name)
    }
}

/// `x(y1 <- u1, ...)` or the degenerate `_x`. Arguments form a set keyed by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Node { head: Var, args: BTreeMap<Var, Term> },
    Degen(Var),
}

impl Term {
    pub fn var(v: Var) -> Self {
        Term::Node { head: v, args: BTreeMap::new() }
    }

    pub fn app(head: Var, args: impl IntoIterator<Item = (Var, Term)>) -> Self {
        Term::Node { head, args: args.into_iter().collect() }
    }

    pub fn dim(&self) -> usize {
        match self {
            Term::Node { head, .. } => head.dim,
            Term::Degen(v) => v.dim + 1,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Node { head, args } if args.is_empty() => Some(head),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&Var> {
        match self {
            Term::Node { head, .. } => Some(head),
            Term::Degen(_) => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Term::Degen(_))
    }

    /// Top-dimensional variables `t•`.
    pub fn top_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_top(&mut out);
        out
    }

    fn collect_top(&self, out: &mut Vec<Var>) {
        if let Term::Node { head, args } = self {
            out.push(head.clone());
            for u in args.values() {
                u.collect_top(out);
            }
        }
    }

    /// Every variable occurring anywhere, argument keys included.
    pub fn all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Degen(v) => {
                out.insert(v.clone());
            }
            Term::Node { head, args } => {
                out.insert(head.clone());
                for (k, u) in args {
                    out.insert(k.clone());
                    u.all_vars(out);
                }
            }
        }
    }

    pub fn rename(&self, f: &dyn Fn(&Var) -> Var) -> Term {
        match self {
            Term::Degen(v) => Term::Degen(f(v)),
            Term::Node { head, args } => Term::Node {
                head: f(head),
                args: args.iter().map(|(k, u)| (f(k), u.rename(f))).collect(),
            },
        }
    }

    /// Every variable replaced by its class representative.
    pub fn normalize(&self, th: &EqTheory) -> Term {
        self.rename(&|v| th.find(v))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Degen(v) => write!(f, "_{v}"),
            Term::Node { head, args } => {
                write!(f, "{head}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, (k, u)) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{k} <- {u}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// The chain `s1 ~> s2 ~> ... ~> sn ~> 0`; empty for points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Type(pub Vec<Term>);

impl Type {
    pub fn source(&self) -> Option<&Term> {
        self.0.first()
    }

    pub fn rename(&self, f: &dyn Fn(&Var) -> Var) -> Type {
        Type(self.0.iter().map(|t| t.rename(f)).collect())
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{t} ~> ")?;
        }
        write!(f, "0")
    }
}

/// Generated equivalence on variables, closed by union-find.
/// The representative of a class is its least member.
#[derive(Debug, Clone, Default)]
pub struct EqTheory {
    parent: BTreeMap<Var, Var>,
    gens: Vec<(Var, Var)>,
}

impl EqTheory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn find(&self, v: &Var) -> Var {
        let mut cur = v;
        while let Some(p) = self.parent.get(cur) {
            cur = p;
        }
        cur.clone()
    }

    pub fn eq(&self, a: &Var, b: &Var) -> bool {
        a == b || self.find(a) == self.find(b)
    }

    /// Adds `a = b`; returns whether two classes merged.
    pub fn union(&mut self, a: &Var, b: &Var) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.gens.push((a.clone(), b.clone()));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(hi, lo);
        true
    }

    pub fn extend(&mut self, other: &EqTheory) {
        for (a, b) in &other.gens {
            self.union(a, b);
        }
    }

    pub fn generators(&self) -> &[(Var, Var)] {
        &self.gens
    }

    pub fn rename(&self, f: &dyn Fn(&Var) -> Var) -> EqTheory {
        let mut out = EqTheory::new();
        for (a, b) in &self.gens {
            out.union(&f(a), &f(b));
        }
        out
    }

    /// Non-singleton classes, each sorted, in order of representative.
    pub fn classes(&self) -> Vec<Vec<Var>> {
        let mut by_rep: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
        for v in self.parent.keys() {
            by_rep.entry(self.find(v)).or_default().push(v.clone());
        }
        by_rep
            .into_iter()
            .map(|(r, mut vs)| {
                vs.push(r);
                vs.sort();
                vs
            })
            .collect()
    }

    pub fn same_partition(&self, other: &EqTheory) -> bool {
        self.parent.keys().all(|v| other.eq(v, &self.find(v)))
            && other.parent.keys().all(|v| self.eq(v, &other.find(v)))
    }

    pub fn terms_eq(&self, a: &Term, b: &Term) -> bool {
        a.normalize(self) == b.normalize(self)
    }

    pub fn opt_terms_eq(&self, a: Option<&Term>, b: Option<&Term>) -> bool {
        match (a, b) {
            (None, None) => true,
            (Some(a), Some(b)) => self.terms_eq(a, b),
            _ => false,
        }
    }

    pub fn types_eq(&self, a: &Type, b: &Type) -> bool {
        a.0.len() == b.0.len() && a.0.iter().zip(&b.0).all(|(x, y)| self.terms_eq(x, y))
    }

    pub fn contains(&self, vars: &[Var], v: &Var) -> bool {
        vars.iter().any(|w| self.eq(w, v))
    }
}

impl fmt::Display for EqTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eq {{")?;
        for (i, c) in self.classes().iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            let names: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, " {}", names.join(" = "))?;
        }
        write!(f, " }}")
    }
}

pub type Context = BTreeMap<Var, Type>;

pub fn lookup_type<'a>(ctx: &'a Context, v: &Var) -> Result<&'a Type> {
    ctx.get(v).ok_or_else(|| NamedError::Untyped(v.clone()))
}

/// `s v`, or `None` for points.
pub fn source_of<'a>(ctx: &'a Context, v: &Var) -> Result<Option<&'a Term>> {
    Ok(lookup_type(ctx, v)?.source())
}

/// `E ▷ Γ ⊢ t : T`.
#[derive(Debug, Clone)]
pub struct Sequent {
    pub theory: EqTheory,
    pub ctx: Context,
    pub term: Term,
    pub ty: Type,
}

impl Sequent {
    pub fn dim(&self) -> usize {
        self.term.dim()
    }

    pub fn subject_var(&self) -> Option<&Var> {
        self.term.as_var()
    }

    pub fn rename(&self, f: &dyn Fn(&Var) -> Var) -> Sequent {
        Sequent {
            theory: self.theory.rename(f),
            ctx: self.ctx.iter().map(|(v, t)| (f(v), t.rename(f))).collect(),
            term: self.term.rename(f),
            ty: self.ty.rename(f),
        }
    }

    pub fn find_var(&self, name: &str) -> Option<Var> {
        find_var(&self.ctx, name)
    }
}

/// Resolves a name, falling back to reading a `t...t` prefix as target tags.
pub fn find_var(ctx: &Context, name: &str) -> Option<Var> {
    if let Some(v) = ctx.keys().find(|v| v.tags == 0 && &*v.name == name) {
        return Some(v.clone());
    }
    if let Some((k, base)) = name.strip_prefix("t^").and_then(|r| r.split_once(':')) {
        let k: usize = k.parse().ok()?;
        return ctx.keys().find(|v| v.tags == k && &*v.name == base).cloned();
    }
    let stripped = name.trim_start_matches('t');
    let k = name.len() - stripped.len();
    for i in (1..=k).rev() {
        let base = &name[i..];
        if let Some(v) = ctx.keys().find(|v| v.tags == i && &*v.name == base) {
            return Some(v.clone());
        }
    }
    None
}

impl fmt::Display for Sequent {
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
        write!(f, " |- {} : {}", self.term, self.ty)
    }
}

/// The source function `s̄`: `x ↦ s x`, `_x ↦ x`, `x(y_i <- u_i) ↦ (s x)[s̄ u_i / y_i]`.
/// Equations forced by degenerate substitutions are added to `th`.
pub fn source_bar(ctx: &Context, th: &mut EqTheory, t: &Term) -> Result<Option<Term>> {
    match t {
        Term::Degen(x) => Ok(Some(Term::var(x.clone()))),
        Term::Node { head, args } => {
            let Some(base) = source_of(ctx, head)? else {
                if args.is_empty() {
                    return Ok(None);
                }
                return Err(NamedError::Malformed(format!("point {head} applied to arguments")));
            };
            let mut cur = base.clone();
            for (y, u) in args {
                let w = source_bar(ctx, th, u)?
                    .ok_or_else(|| NamedError::Malformed(format!("argument {u} has no source")))?;
                cur = substitute(ctx, th, &cur, y, &w)?;
            }
            Ok(Some(cur))
        }
    }
}

/// Named substitution `u[w/a]`.
pub fn substitute(ctx: &Context, th: &mut EqTheory, u: &Term, a: &Var, w: &Term) -> Result<Term> {
    match w {
        Term::Node { .. } => subst_nondegen(ctx, th, u, a, w),
        Term::Degen(b) => subst_degen(th, u, a, b),
    }
}

fn subst_nondegen(ctx: &Context, th: &mut EqTheory, u: &Term, a: &Var, w: &Term) -> Result<Term> {
    match u {
        Term::Degen(_) => Ok(u.clone()),
        Term::Node { head, args } if th.eq(head, a) => {
            let mut r = w.clone();
            for (z, v) in args {
                r = graft_notation(ctx, th, &r, z, v)?;
            }
            Ok(r)
        }
        Term::Node { head, args } => {
            let mut out = BTreeMap::new();
            for (z, v) in args {
                out.insert(z.clone(), subst_nondegen(ctx, th, v, a, w)?);
            }
            Ok(Term::Node { head: head.clone(), args: out })
        }
    }
}

fn single_arg(args: &BTreeMap<Var, Term>) -> Result<Option<&Term>> {
    match args.len() {
        0 => Ok(None),
        1 => Ok(args.values().next()),
        _ => Err(NamedError::Malformed("degenerate substitution into a multi-argument head".into())),
    }
}

fn subst_degen(th: &mut EqTheory, u: &Term, a: &Var, b: &Var) -> Result<Term> {
    match u {
        Term::Degen(_) => Ok(u.clone()),
        Term::Node { head, args } if th.eq(head, a) => match single_arg(args)? {
            None => Ok(Term::Degen(b.clone())),
            Some(r) => Ok(r.clone()),
        },
        Term::Node { head, args } => {
            let mut out = BTreeMap::new();
            for (z, v) in args {
                match v {
                    Term::Node { head: h, args: vargs } if th.eq(h, a) => {
                        th.union(b, z);
                        if let Some(r) = single_arg(vargs)? {
                            out.insert(z.clone(), r.clone());
                        }
                    }
                    _ => {
                        out.insert(z.clone(), subst_degen(th, v, a, b)?);
                    }
                }
            }
            Ok(Term::Node { head: head.clone(), args: out })
        }
    }
}

/// Graft notation `t(a <- x)`: attach `x` where `a` occurs in the source of a head.
pub fn graft_notation(ctx: &Context, th: &EqTheory, t: &Term, a: &Var, x: &Term) -> Result<Term> {
    match push_graft(ctx, th, t, a, x)? {
        Some(r) => Ok(r),
        None => Err(NamedError::NotGraftable(a.clone())),
    }
}

fn push_graft(ctx: &Context, th: &EqTheory, t: &Term, a: &Var, x: &Term) -> Result<Option<Term>> {
    let Term::Node { head, args } = t else { return Ok(None) };
    let free = match source_of(ctx, head)? {
        Some(s) => th.contains(&s.top_vars(), a) && !args.keys().any(|k| th.eq(k, a)),
        None => false,
    };
    if free {
        let mut args = args.clone();
        args.insert(a.clone(), x.clone());
        return Ok(Some(Term::Node { head: head.clone(), args }));
    }
    for (z, v) in args {
        if let Some(v2) = push_graft(ctx, th, v, a, x)? {
            let mut args = args.clone();
            args.insert(z.clone(), v2);
            return Ok(Some(Term::Node { head: head.clone(), args }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddressMode {
    Node,
    Leaf,
}

/// `&_t z`: the address of a node variable of `t`, or of a leaf variable of `s t`.
pub fn var_address(ctx: &Context, th: &EqTheory, t: &Term, z: &Var, mode: AddressMode) -> Result<Address> {
    let found = match mode {
        AddressMode::Node => node_address(ctx, th, t, z)?,
        AddressMode::Leaf => leaf_address(ctx, th, t, z)?,
    };
    found.ok_or_else(|| NamedError::Absent(z.clone()))
}

fn node_address(ctx: &Context, th: &EqTheory, t: &Term, z: &Var) -> Result<Option<Address>> {
    let Term::Node { head, args } = t else { return Ok(None) };
    if th.eq(head, z) {
        return Ok(Some(Address::empty(head.dim)));
    }
    for (y, u) in args {
        if let Some(rest) = node_address(ctx, th, u, z)? {
            let s = source_of(ctx, head)?.ok_or_else(|| NamedError::Malformed(t.to_string()))?;
            let step = node_address(ctx, th, s, y)?.ok_or_else(|| NamedError::Absent(y.clone()))?;
            return Ok(Some(step.wrap().concat(&rest)?));
        }
    }
    Ok(None)
}

fn leaf_address(ctx: &Context, th: &EqTheory, t: &Term, a: &Var) -> Result<Option<Address>> {
    match t {
        Term::Degen(x) => Ok(th.eq(x, a).then(|| Address::empty(t.dim()))),
        Term::Node { head, args } => {
            let Some(s) = source_of(ctx, head)? else { return Ok(None) };
            if !args.keys().any(|k| th.eq(k, a)) {
                if let Some(p) = node_address(ctx, th, s, a)? {
                    return Ok(Some(p.wrap()));
                }
            }
            for (y, u) in args {
                if let Some(rest) = leaf_address(ctx, th, u, a)? {
                    let step = node_address(ctx, th, s, y)?.ok_or_else(|| NamedError::Absent(y.clone()))?;
                    return Ok(Some(step.wrap().concat(&rest)?));
                }
            }
            Ok(None)
        }
    }
}

/// Checks `s_k = s̄^k t` along the subject chain and along every context typing.
pub fn check_coherence(s: &Sequent) -> std::result::Result<(), String> {
    let mut chains: Vec<(String, Vec<Term>)> = Vec::new();
    let mut subject = vec![s.term.clone()];
    subject.extend(s.ty.0.iter().cloned());
    chains.push((format!("{}", s.term), subject));
    for (v, ty) in &s.ctx {
        let mut chain = vec![Term::var(v.clone())];
        chain.extend(ty.0.iter().cloned());
        chains.push((v.to_string(), chain));
    }
    for (label, chain) in chains {
        for i in 0..chain.len() {
            let mut th = s.theory.clone();
            let next = source_bar(&s.ctx, &mut th, &chain[i]).map_err(|e| format!("{label}: {e}"))?;
            if !th.opt_terms_eq(next.as_ref(), chain.get(i + 1)) {
                let shown = next.map_or("0".to_string(), |t| t.to_string());
                let stored = chain.get(i + 1).map_or("0".to_string(), ToString::to_string);
                return Err(format!("{label}: source of entry {i} is {shown}, stored {stored}"));
            }
            if !th.same_partition(&s.theory) {
                return Err(format!("{label}: source of entry {i} forces new equations"));
            }
        }
    }
    Ok(())
}

/// A name-independent rendering; two sequents are α-equivalent iff these agree.
/// Variables are compared up to the theory: terms mention classes, and each class
/// records the multiset of its members' types.
pub fn canonical_form(s: &Sequent) -> String {
    let th = &s.theory;
    let mut ids: BTreeMap<Var, usize> = BTreeMap::new();
    let mut queue: VecDeque<Var> = VecDeque::new();
    let mut members: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
    for v in s.ctx.keys() {
        members.entry(th.find(v)).or_default().push(v.clone());
    }
    let assign = |v: &Var, ids: &mut BTreeMap<Var, usize>, queue: &mut VecDeque<Var>| {
        let r = th.find(v);
        if !ids.contains_key(&r) {
            let n = ids.len();
            ids.insert(r.clone(), n);
            queue.push_back(r);
        }
    };
    let visit = |t: &Term, ids: &mut BTreeMap<Var, usize>, queue: &mut VecDeque<Var>| {
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            match t {
                Term::Degen(v) => assign(&v, ids, queue),
                Term::Node { head, args } => {
                    assign(&head, ids, queue);
                    let mut ordered: Vec<(Option<Address>, Var, Term)> = args
                        .into_iter()
                        .map(|(k, u)| {
                            let addr = source_of(&s.ctx, &head)
                                .ok()
                                .flatten()
                                .and_then(|src| node_address(&s.ctx, th, src, &k).ok().flatten());
                            (addr, k, u)
                        })
                        .collect();
                    ordered.sort_by(|a, b| a.0.cmp(&b.0));
                    for (_, k, u) in ordered.into_iter().rev() {
                        stack.push(u);
                        stack.push(Term::var(k));
                    }
                }
            }
        }
    };
    visit(&s.term, &mut ids, &mut queue);
    for t in &s.ty.0 {
        visit(t, &mut ids, &mut queue);
    }
    loop {
        while let Some(r) = queue.pop_front() {
            for m in members.get(&r).cloned().unwrap_or_default() {
                if let Some(ty) = s.ctx.get(&m) {
                    for t in &ty.0 {
                        visit(t, &mut ids, &mut queue);
                    }
                }
            }
        }
        let rest = members.keys().find(|r| !ids.contains_key(*r)).cloned();
        match rest {
            Some(r) => assign(&r, &mut ids, &mut queue),
            None => break,
        }
    }
    let name = |v: &Var| -> Var {
        let r = th.find(v);
        let id = ids.get(&r).copied().unwrap_or(usize::MAX);
        Var { name: Arc::from(format!("#{id}").as_str()), tags: 0, dim: v.dim }
    };
    let render = |t: &Term| -> String { render_sorted(&t.rename(&name)) };
    let mut out = String::new();
    out.push_str(&render(&s.term));
    for t in &s.ty.0 {
        out.push_str(" ~> ");
        out.push_str(&render(t));
    }
    let mut classes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (v, ty) in &s.ctx {
        let id = ids[&th.find(v)];
        let tys: Vec<String> = ty.0.iter().map(&render).collect();
        classes.entry(id).or_default().push(format!("{}:{}", v.dim, tys.join(" ~> ")));
    }
    for (id, mut tys) in classes {
        tys.sort();
        out.push_str(&format!("\n#{id} = [{}]", tys.join(", ")));
    }
    out
}

fn render_sorted(t: &Term) -> String {
    match t {
        Term::Degen(v) => format!("_{}", v.name),
        Term::Node { head, args } => {
            if args.is_empty() {
                return head.name.to_string();
            }
            let mut parts: Vec<String> =
                args.iter().map(|(k, u)| format!("{}<-{}", k.name, render_sorted(u))).collect();
            parts.sort();
            format!("{}({})", head.name, parts.join(","))
        }
    }
}

pub fn alpha_equivalent(a: &Sequent, b: &Sequent) -> bool {
    a.dim() == b.dim() && canonical_form(a) == canonical_form(b)
}

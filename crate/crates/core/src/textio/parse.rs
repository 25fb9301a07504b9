//! Addresses, preopetopes, named terms and OCMT literals.

use std::collections::{BTreeMap, HashMap};

use super::lexer::{Cursor, Tok};
use super::{Pos, TextError};
use crate::address::Address;
use crate::named::{Context, EqTheory, Term, Type, Var};
use crate::nset::Ocmt;
use crate::preopetope::Preopetope;

/// An address before its dimension is known: `[]` alone is ambiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawAddress {
    Star,
    Seq(Vec<RawAddress>),
}

impl RawAddress {
    /// The dimension, when some `*` pins it down.
    pub fn inferred_dim(&self) -> Result<Option<usize>, String> {
        match self {
            RawAddress::Star => Ok(Some(0)),
            RawAddress::Seq(items) => {
                let mut dim = None;
                for it in items {
                    if let Some(d) = it.inferred_dim()? {
                        match dim {
                            Some(e) if e != d => return Err(format!("entries of dimensions {e} and {d}")),
                            _ => dim = Some(d),
                        }
                    }
                }
                Ok(dim.map(|d| d + 1))
            }
        }
    }

    pub fn resolve(&self, dim: usize) -> Result<Address, String> {
        match (self, dim) {
            (RawAddress::Star, 0) => Ok(Address::Atom),
            (RawAddress::Star, d) => Err(format!("`*` where a {d}-address is expected")),
            (RawAddress::Seq(_), 0) => Err("a bracketed address in dimension 0".into()),
            (RawAddress::Seq(items), d) => {
                let items = items.iter().map(|it| it.resolve(d - 1)).collect::<Result<Vec<_>, _>>()?;
                Address::seq(d, items).map_err(|e| e.to_string())
            }
        }
    }
}

pub fn raw_address(c: &mut Cursor) -> Result<RawAddress, TextError> {
    if c.eat(&Tok::Star) {
        return Ok(RawAddress::Star);
    }
    c.expect(&Tok::LBrack)?;
    let mut items = Vec::new();
    while !c.eat(&Tok::RBrack) {
        if c.at_end() {
            return Err(c.unexpected("`]`"));
        }
        items.push(raw_address(c)?);
    }
    Ok(RawAddress::Seq(items))
}

/// An address with an optional `:k` dimension annotation, resolved against `expected` if given.
pub fn address_in(c: &mut Cursor, expected: Option<usize>) -> Result<Address, TextError> {
    let pos = c.pos();
    let raw = raw_address(c)?;
    let annotated = if c.peek() == Some(&Tok::Colon) && matches!(c.peek2(), Some(Tok::Num(_))) {
        c.next();
        Some(c.num()?)
    } else {
        None
    };
    let inferred = raw.inferred_dim().map_err(|e| TextError::parse(pos, e))?;
    let dim = match (annotated, inferred, expected) {
        (Some(a), Some(i), _) if a != i => {
            return Err(TextError::parse(pos, format!("annotation :{a} but the address has dimension {i}")))
        }
        (Some(a), _, Some(e)) if a != e => {
            return Err(TextError::parse(pos, format!("annotation :{a} but a {e}-address is expected")))
        }
        (Some(a), _, _) => a,
        (None, Some(i), _) => i,
        (None, None, Some(e)) => e,
        (None, None, None) => {
            return Err(TextError::parse(pos, "ambiguous address: add a dimension annotation such as `[]:1`"))
        }
    };
    raw.resolve(dim).map_err(|e| TextError::parse(pos, e))
}

pub fn parse_address(text: &str) -> Result<Address, TextError> {
    let mut c = Cursor::new(text)?;
    let a = address_in(&mut c, None)?;
    c.finish()?;
    Ok(a)
}

pub fn serialize_address(a: &Address) -> String {
    match a.has_atom() {
        true => a.to_string(),
        false => format!("{a}:{}", a.dim()),
    }
}

/// Preopetope syntax with names still unresolved.
#[derive(Debug, Clone)]
pub enum PreAst {
    Ref(String, Pos),
    Integer(usize),
    Degen(Box<PreAst>),
    Nodes(Pos, Vec<(Pos, RawAddress, PreAst)>),
}

pub fn pre_ast(c: &mut Cursor) -> Result<PreAst, TextError> {
    let pos = c.pos();
    match c.peek() {
        Some(Tok::LBrace) => {
            c.next();
            if c.peek() == Some(&Tok::LBrace) {
                c.next();
                let inner = pre_ast(c)?;
                c.expect(&Tok::RBrace)?;
                c.expect(&Tok::RBrace)?;
                return Ok(PreAst::Degen(Box::new(inner)));
            }
            let mut entries = Vec::new();
            loop {
                if c.eat(&Tok::RBrace) {
                    break;
                }
                let kpos = c.pos();
                let k = raw_address(c)?;
                c.expect(&Tok::LArrow)?;
                entries.push((kpos, k, pre_ast(c)?));
                if !c.eat(&Tok::Semi) {
                    c.expect(&Tok::RBrace)?;
                    break;
                }
            }
            Ok(PreAst::Nodes(pos, entries))
        }
        Some(Tok::Ident(name)) => {
            let name = name.clone();
            c.next();
            match name.as_str() {
                "degen" => {
                    let close = if c.eat(&Tok::LBrace) {
                        Tok::RBrace
                    } else {
                        c.expect(&Tok::LParen)?;
                        Tok::RParen
                    };
                    let inner = pre_ast(c)?;
                    c.expect(&close)?;
                    Ok(PreAst::Degen(Box::new(inner)))
                }
                "integer" => {
                    c.expect(&Tok::LParen)?;
                    let n = c.num()?;
                    c.expect(&Tok::RParen)?;
                    Ok(PreAst::Integer(n))
                }
                _ => Ok(PreAst::Ref(name, pos)),
            }
        }
        _ => Err(c.unexpected("a preopetope")),
    }
}

pub fn resolve_pre(ast: &PreAst, env: &dyn Fn(&str) -> Option<Preopetope>) -> Result<Preopetope, TextError> {
    match ast {
        PreAst::Ref(name, pos) => env(name).ok_or_else(|| TextError::parse(*pos, format!("unknown preopetope {name}"))),
        PreAst::Integer(n) => Ok(Preopetope::integer(*n)),
        PreAst::Degen(inner) => Ok(Preopetope::degen(resolve_pre(inner, env)?)),
        PreAst::Nodes(pos, entries) => {
            let mut resolved = Vec::with_capacity(entries.len());
            for (kpos, k, v) in entries {
                resolved.push((*kpos, k, resolve_pre(v, env)?));
            }
            let Some(dim) = resolved.first().map(|(_, _, v)| v.dim()) else {
                return Err(TextError::parse(*pos, "a preopetope needs at least one node"));
            };
            let mut map = BTreeMap::new();
            for (kpos, k, v) in resolved {
                if v.dim() != dim {
                    return Err(TextError::parse(kpos, format!("node of dimension {} among {dim}-dimensional ones", v.dim())));
                }
                let k = k.resolve(dim).map_err(|e| TextError::parse(kpos, e))?;
                if map.insert(k.clone(), v).is_some() {
                    return Err(TextError::parse(kpos, format!("duplicate address {k}")));
                }
            }
            Preopetope::from_map(map).map_err(|e| TextError::parse(*pos, e.to_string()))
        }
    }
}

pub fn builtin_preopetope(name: &str) -> Option<Preopetope> {
    match name {
        "point" => Some(Preopetope::Point),
        "arrow" => Some(Preopetope::arrow()),
        _ => None,
    }
}

/// A `.popt` text: `let NAME = P` lines followed by one preopetope.
pub fn parse_preopetope(text: &str) -> Result<Preopetope, TextError> {
    let mut c = Cursor::new(text)?;
    let mut env: HashMap<String, Preopetope> = HashMap::new();
    while c.peek() == Some(&Tok::Ident("let".into())) {
        c.next();
        let name = c.ident()?;
        c.expect(&Tok::Eq)?;
        let ast = pre_ast(&mut c)?;
        let p = resolve_pre(&ast, &|n| env.get(n).cloned().or_else(|| builtin_preopetope(n)))?;
        env.insert(name, p);
    }
    let ast = pre_ast(&mut c)?;
    let p = resolve_pre(&ast, &|n| env.get(n).cloned().or_else(|| builtin_preopetope(n)))?;
    c.finish()?;
    Ok(p)
}

pub fn serialize_preopetope(p: &Preopetope) -> String {
    p.to_string()
}

/// Names as written, before dimensions are known.
#[derive(Debug, Clone)]
pub enum RawTerm {
    Degen(String, Pos),
    Node { head: String, pos: Pos, args: Vec<(String, Pos, RawTerm)> },
}

pub fn raw_term(c: &mut Cursor) -> Result<RawTerm, TextError> {
    let pos = c.pos();
    let name = c.ident()?;
    if let Some(base) = name.strip_prefix('_') {
        return Ok(RawTerm::Degen(base.to_string(), pos));
    }
    let mut args = Vec::new();
    if c.eat(&Tok::LParen) {
        loop {
            let kpos = c.pos();
            let k = c.ident()?;
            c.expect(&Tok::LArrow)?;
            args.push((k, kpos, raw_term(c)?));
            if !c.eat(&Tok::Comma) {
                c.expect(&Tok::RParen)?;
                break;
            }
        }
    }
    Ok(RawTerm::Node { head: name, pos, args })
}

/// `T ~> T ~> ... ~> 0`, or just `0` for points.
pub fn raw_type(c: &mut Cursor) -> Result<Vec<RawTerm>, TextError> {
    let mut out = Vec::new();
    loop {
        if c.eat(&Tok::Num(0)) {
            return Ok(out);
        }
        out.push(raw_term(c)?);
        c.expect(&Tok::Squig)?;
    }
}

/// Declared names mapped to variables, with `t...ta` read as a target of `a` when `a` is declared.
struct Scope {
    vars: BTreeMap<String, Var>,
}

impl Scope {
    fn new(decls: &[(String, Pos, Vec<RawTerm>)]) -> Result<Scope, TextError> {
        let names: BTreeMap<&str, usize> = decls.iter().map(|(n, _, t)| (n.as_str(), t.len())).collect();
        let mut vars = BTreeMap::new();
        for (n, pos, ty) in decls {
            let mut v = Var::new(n, ty.len());
            let stripped = n.trim_start_matches('t');
            for k in (1..=n.len() - stripped.len()).rev() {
                let base = &n[k..];
                if let Some(d) = names.get(base) {
                    if *d < k || *d - k != ty.len() {
                        return Err(TextError::parse(*pos, format!("{n} reads as t^{k} {base} but has the wrong length of type")));
                    }
                    v = Var { name: base.into(), tags: k, dim: ty.len() };
                    break;
                }
            }
            if vars.insert(n.clone(), v).is_some() {
                return Err(TextError::parse(*pos, format!("{n} is declared twice")));
            }
        }
        Ok(Scope { vars })
    }

    fn get(&self, n: &str, pos: Pos) -> Result<Var, TextError> {
        self.vars.get(n).cloned().ok_or_else(|| TextError::parse(pos, format!("undeclared variable {n}")))
    }

    fn term(&self, t: &RawTerm) -> Result<Term, TextError> {
        match t {
            RawTerm::Degen(n, pos) => Ok(Term::Degen(self.get(n, *pos)?)),
            RawTerm::Node { head, pos, args } => {
                let mut out = BTreeMap::new();
                for (k, kpos, u) in args {
                    out.insert(self.get(k, *kpos)?, self.term(u)?);
                }
                Ok(Term::app(self.get(head, *pos)?, out))
            }
        }
    }
}

/// `ocmt { eq { a = b = c; ... } ctx { a : 0; f : a ~> 0; ... } }`; the `ocmt` keyword is already consumed.
pub fn ocmt_body(c: &mut Cursor) -> Result<Ocmt, TextError> {
    c.expect(&Tok::LBrace)?;
    let mut eqs: Vec<Vec<(String, Pos)>> = Vec::new();
    let mut decls: Vec<(String, Pos, Vec<RawTerm>)> = Vec::new();
    while !c.eat(&Tok::RBrace) {
        let section = c.ident()?;
        c.expect(&Tok::LBrace)?;
        match section.as_str() {
            "eq" => {
                while !c.eat(&Tok::RBrace) {
                    let mut chain = vec![(c.pos(), c.ident()?)];
                    while c.eat(&Tok::Eq) {
                        chain.push((c.pos(), c.ident()?));
                    }
                    eqs.push(chain.into_iter().map(|(p, n)| (n, p)).collect());
                    if !c.eat(&Tok::Semi) {
                        c.expect(&Tok::RBrace)?;
                        break;
                    }
                }
            }
            "ctx" => {
                while !c.eat(&Tok::RBrace) {
                    let pos = c.pos();
                    let n = c.binder()?;
                    c.expect(&Tok::Colon)?;
                    decls.push((n, pos, raw_type(c)?));
                    if !c.eat(&Tok::Semi) {
                        c.expect(&Tok::RBrace)?;
                        break;
                    }
                }
            }
            other => return Err(TextError::parse(c.pos(), format!("unknown section {other}, expected eq or ctx"))),
        }
    }
    let scope = Scope::new(&decls)?;
    let mut ctx = Context::new();
    for (n, pos, ty) in &decls {
        let ty = Type(ty.iter().map(|t| scope.term(t)).collect::<Result<_, _>>()?);
        ctx.insert(scope.get(n, *pos)?, ty);
    }
    let mut theory = EqTheory::new();
    for chain in &eqs {
        let vs = chain.iter().map(|(n, p)| scope.get(n, *p)).collect::<Result<Vec<_>, _>>()?;
        for w in vs.windows(2) {
            if w[0].dim != w[1].dim {
                return Err(TextError::parse(chain[0].1, format!("{} and {} differ in dimension", w[0], w[1])));
            }
            theory.union(&w[0], &w[1]);
        }
    }
    crate::nset::close_under_targets(&ctx, &mut theory);
    Ok(Ocmt { theory, ctx })
}

pub fn parse_ocmt(text: &str) -> Result<Ocmt, TextError> {
    let mut c = Cursor::new(text)?;
    if !c.eat(&Tok::Ident("ocmt".into())) {
        return Err(c.unexpected("`ocmt`"));
    }
    let o = ocmt_body(&mut c)?;
    c.finish()?;
    Ok(o)
}

pub fn serialize_ocmt(o: &Ocmt) -> String {
    let mut s = String::from("ocmt {\n  eq {");
    for (i, class) in o.theory.classes().iter().enumerate() {
        s.push_str(if i > 0 { ";\n    " } else { "\n    " });
        s.push_str(&class.iter().map(ToString::to_string).collect::<Vec<_>>().join(" = "));
    }
    s.push_str("\n  }\n  ctx {");
    let mut entries: Vec<(&Var, &Type)> = o.ctx.iter().collect();
    entries.sort_by_key(|(v, _)| (std::cmp::Reverse(v.dim), (*v).clone()));
    for (i, (v, t)) in entries.iter().enumerate() {
        s.push_str(if i > 0 { ";\n    " } else { "\n    " });
        s.push_str(&format!("{v} : {t}"));
    }
    s.push_str("\n  }\n}\n");
    s
}

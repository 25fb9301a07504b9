//! Derivation scripts in five dialects, one per calculus.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use super::lexer::{check_binder, Cursor, Tok};
use super::parse::{builtin_preopetope, ocmt_body, pre_ast, raw_address, resolve_pre, serialize_ocmt, PreAst, RawAddress};
use super::{Pos, TextError};
use crate::address::Address;
use crate::coding::NamedDerivation;
use crate::named::Sequent;
use crate::nderiv::{n_degen, n_degen_shift, n_graft, n_point, n_shift};
use crate::nset::{m_degen, m_graft, m_pd, m_point, m_shift, os_glue, os_repr, os_sum, os_zero, Ocmt};
use crate::preopetope::Preopetope;
use crate::unnamed::{self, rule_degen, rule_graft, rule_point, rule_shift, UnnamedSequent};
use crate::uset::{u_degen, u_graft, u_point, u_shift, UContext, UPastingDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    /// `opt?`: unnamed opetopes.
    Unnamed,
    /// `opt!`: named opetopes.
    Named,
    /// `optset!`: repr, zero, sum and glue.
    NamedSet,
    /// `optset!m`: the mixed system.
    Mixed,
    /// `optset?`: shape-annotated contexts.
    UnnamedSet,
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "opt?" => Ok(Dialect::Unnamed),
            "opt!" => Ok(Dialect::Named),
            "optset!" => Ok(Dialect::NamedSet),
            "optset!m" | "optset!_m" | "optset!M" => Ok(Dialect::Mixed),
            "optset?" => Ok(Dialect::UnnamedSet),
            _ => Err(format!("unknown dialect {s}; expected opt?, opt!, optset!, optset!m or optset?")),
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Unnamed => "opt?",
            Dialect::Named => "opt!",
            Dialect::NamedSet => "optset!",
            Dialect::Mixed => "optset!m",
            Dialect::UnnamedSet => "optset?",
        })
    }
}

/// The conclusion of a script, or an intermediate binding.
#[derive(Debug, Clone)]
pub enum Value {
    Preopetope(Preopetope),
    Unnamed(UnnamedSequent),
    Named(Sequent),
    Set(Ocmt),
    Context(UContext),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Preopetope(p) => write!(f, "{p}"),
            Value::Unnamed(s) => write!(f, "{s}"),
            Value::Named(s) => write!(f, "{s}"),
            Value::Set(o) => write!(f, "{}", serialize_ocmt(o).trim_end()),
            Value::Context(c) => write!(f, "{}", c.to_string().trim_end()),
        }
    }
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Preopetope(_) => "a preopetope",
            Value::Unnamed(_) => "an unnamed sequent",
            Value::Named(_) => "a named sequent",
            Value::Set(_) => "an OCMT",
            Value::Context(_) => "a context",
        }
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Call { name: String, pos: Pos, args: Vec<Arg> },
    Ref(String, Pos),
    Pre(PreAst, Pos),
    Ocmt(Ocmt),
}

#[derive(Debug, Clone)]
enum Arg {
    Expr(Expr),
    Addr(RawAddress, Option<usize>, Pos),
}

#[derive(Debug, Clone)]
enum Stmt {
    Let(String, Expr),
    Expr(Expr),
    Point(String, Pos),
    Degen(String, Pos),
    Graft { shape: Expr, pos: Pos, entries: Vec<(Pos, RawAddress, String)> },
    Shift { filler: String, name: String, pos: Pos },
}

/// A parsed script; [`Script::run`] evaluates it.
#[derive(Debug, Clone)]
pub struct Script {
    pub dialect: Dialect,
    stmts: Vec<Stmt>,
}

fn header(text: &str) -> Result<Dialect, TextError> {
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix("#dialect") {
            return rest.trim().parse().map_err(|e| TextError::parse(Pos { line: i + 1, col: 1 }, e));
        }
        if t.starts_with('#') {
            continue;
        }
        break;
    }
    Err(TextError::parse(Pos { line: 1, col: 1 }, "missing `#dialect` header"))
}

/// Parses a script whose dialect is given by its `#dialect` header line.
pub fn parse_script(text: &str) -> Result<Script, TextError> {
    parse_script_as(header(text)?, text)
}

pub fn parse_script_as(dialect: Dialect, text: &str) -> Result<Script, TextError> {
    let mut c = Cursor::new(text)?;
    let mut stmts = Vec::new();
    let kw = |c: &Cursor, k: &str| matches!(c.peek(), Some(Tok::Ident(s)) if s == k);
    while !c.at_end() {
        if kw(&c, "let") {
            c.next();
            let name = c.ident()?;
            c.expect(&Tok::Eq)?;
            stmts.push(Stmt::Let(name, expr(&mut c, dialect)?));
            continue;
        }
        if dialect != Dialect::UnnamedSet {
            stmts.push(Stmt::Expr(expr(&mut c, dialect)?));
            c.finish()?;
            break;
        }
        let pos = c.pos();
        let word = c.ident()?;
        match word.as_str() {
            "point" => stmts.push(Stmt::Point(c.binder()?, pos)),
            "degen" => stmts.push(Stmt::Degen(c.binder()?, pos)),
            "shift" => {
                let filler = c.ident()?;
                stmts.push(Stmt::Shift { filler, name: c.binder()?, pos });
            }
            "graft" => {
                let shape = expr(&mut c, dialect)?;
                c.expect(&Tok::LBrace)?;
                let mut entries = Vec::new();
                while !c.eat(&Tok::RBrace) {
                    let kpos = c.pos();
                    let k = raw_address(&mut c)?;
                    c.expect(&Tok::LArrow)?;
                    entries.push((kpos, k, c.ident()?));
                    if !c.eat(&Tok::Semi) {
                        c.expect(&Tok::RBrace)?;
                        break;
                    }
                }
                stmts.push(Stmt::Graft { shape, pos, entries });
            }
            other => {
                return Err(TextError::parse(pos, format!("unknown statement {other}; expected point, degen, graft, shift or let")))
            }
        }
    }
    Ok(Script { dialect, stmts })
}

fn takes_name_sugar(dialect: Dialect, f: &str) -> bool {
    match dialect {
        Dialect::Named | Dialect::NamedSet => f == "point",
        Dialect::Mixed => f == "mpoint" || f == "point",
        _ => false,
    }
}

fn expr(c: &mut Cursor, dialect: Dialect) -> Result<Expr, TextError> {
    let pos = c.pos();
    match (c.peek(), c.peek2()) {
        (Some(Tok::LBrace), _) => return Ok(Expr::Pre(pre_ast(c)?, pos)),
        (Some(Tok::Ident(s)), Some(Tok::LBrace)) if s == "degen" => return Ok(Expr::Pre(pre_ast(c)?, pos)),
        (Some(Tok::Ident(s)), _) if s == "integer" => return Ok(Expr::Pre(pre_ast(c)?, pos)),
        (Some(Tok::Ident(s)), Some(Tok::LBrace)) if s == "ocmt" => {
            c.next();
            return Ok(Expr::Ocmt(ocmt_body(c)?));
        }
        _ => {}
    }
    let name = c.ident()?;
    if c.eat(&Tok::LParen) {
        let mut args = Vec::new();
        if !c.eat(&Tok::RParen) {
            loop {
                args.push(arg(c, dialect)?);
                if !c.eat(&Tok::Comma) {
                    c.expect(&Tok::RParen)?;
                    break;
                }
            }
        }
        return Ok(Expr::Call { name, pos, args });
    }
    if takes_name_sugar(dialect, &name) {
        if let Some(Tok::Ident(n)) = c.peek() {
            if n != "let" {
                let apos = c.pos();
                let n = c.ident()?;
                return Ok(Expr::Call { name, pos, args: vec![Arg::Expr(Expr::Ref(n, apos))] });
            }
        }
    }
    Ok(Expr::Ref(name, pos))
}

fn arg(c: &mut Cursor, dialect: Dialect) -> Result<Arg, TextError> {
    match c.peek() {
        Some(Tok::LBrack) | Some(Tok::Star) => {
            let pos = c.pos();
            let raw = raw_address(c)?;
            let ann = if c.eat(&Tok::Colon) { Some(c.num()?) } else { None };
            Ok(Arg::Addr(raw, ann, pos))
        }
        _ => Ok(Arg::Expr(expr(c, dialect)?)),
    }
}

fn resolve_addr(raw: &RawAddress, ann: Option<usize>, pos: Pos, expected: usize) -> Result<Address, TextError> {
    if let Some(a) = ann {
        if a != expected {
            return Err(TextError::parse(pos, format!("annotation :{a} but a {expected}-address is expected")));
        }
    }
    raw.resolve(expected).map_err(|e| TextError::parse(pos, e))
}

fn allowed(dialect: Dialect, f: &str) -> bool {
    const OPT_U: &[&str] = &["point", "degen", "shift", "graft"];
    const OPT_N: &[&str] = &["point", "degen", "shift", "degenshift", "graft"];
    const SET: &[&str] = &["repr", "zero", "sum", "usum", "glue"];
    const MIXED: &[&str] = &["mpoint", "point", "mpd", "mdegen", "mgraft", "mshift", "zero", "sum", "usum", "glue"];
    match dialect {
        Dialect::Unnamed | Dialect::UnnamedSet => OPT_U.contains(&f),
        Dialect::Named => OPT_N.contains(&f),
        Dialect::NamedSet => OPT_N.contains(&f) || SET.contains(&f),
        Dialect::Mixed => MIXED.contains(&f),
    }
}

struct Eval<'a> {
    dialect: Dialect,
    env: &'a HashMap<String, Value>,
}

fn as_preopetope(v: &Value) -> Option<Preopetope> {
    match v {
        Value::Preopetope(p) => Some(p.clone()),
        Value::Unnamed(s) => Some(s.src.clone()),
        _ => None,
    }
}

impl Eval<'_> {
    fn eval(&self, e: &Expr) -> Result<Value, TextError> {
        match e {
            Expr::Ocmt(o) => Ok(Value::Set(o.clone())),
            Expr::Pre(ast, _) => {
                let env = |n: &str| self.env.get(n).and_then(as_preopetope).or_else(|| builtin_preopetope(n));
                Ok(Value::Preopetope(resolve_pre(ast, &env)?))
            }
            Expr::Ref(name, pos) => {
                if let Some(v) = self.env.get(name) {
                    return Ok(v.clone());
                }
                match (self.dialect, name.as_str()) {
                    (Dialect::Unnamed | Dialect::UnnamedSet, "point") => Ok(Value::Unnamed(rule_point())),
                    (Dialect::NamedSet | Dialect::Mixed, "zero") => Ok(Value::Set(os_zero())),
                    (_, n) => builtin_preopetope(n)
                        .map(Value::Preopetope)
                        .ok_or_else(|| TextError::parse(*pos, format!("unknown name {name}"))),
                }
            }
            Expr::Call { name, pos, args } => {
                if !allowed(self.dialect, name) {
                    return Err(TextError::parse(*pos, format!("{name} is not a rule of {}", self.dialect)));
                }
                self.call(name, *pos, args)
            }
        }
    }

    fn value(&self, args: &[Arg], i: usize, pos: Pos) -> Result<Value, TextError> {
        match args.get(i) {
            Some(Arg::Expr(e)) => self.eval(e),
            Some(Arg::Addr(_, _, p)) => Err(TextError::parse(*p, "expected a derivation, found an address")),
            None => Err(TextError::parse(pos, format!("missing argument {}", i + 1))),
        }
    }

    fn name(&self, args: &[Arg], i: usize, pos: Pos) -> Result<String, TextError> {
        match args.get(i) {
            Some(Arg::Expr(Expr::Ref(n, p))) => check_binder(n, *p).map(|_| n.clone()),
            Some(Arg::Expr(Expr::Call { pos, .. } | Expr::Pre(_, pos))) => Err(TextError::parse(*pos, "expected a name")),
            Some(Arg::Expr(Expr::Ocmt(_))) => Err(TextError::parse(pos, "expected a name")),
            Some(Arg::Addr(_, _, p)) => Err(TextError::parse(*p, "expected a name, found an address")),
            None => Err(TextError::parse(pos, format!("missing argument {}", i + 1))),
        }
    }

    fn unnamed(&self, args: &[Arg], i: usize, pos: Pos) -> Result<UnnamedSequent, TextError> {
        match self.value(args, i, pos)? {
            Value::Unnamed(s) => Ok(s),
            Value::Preopetope(p) => unnamed::derive(&p).map_err(|e| TextError::rule(pos, format!("not an opetope: {e}"))),
            v => Err(TextError::rule(pos, format!("expected an unnamed sequent, found {}", v.kind()))),
        }
    }

    fn named(&self, args: &[Arg], i: usize, pos: Pos) -> Result<Sequent, TextError> {
        match self.value(args, i, pos)? {
            Value::Named(s) => Ok(s),
            v => Err(TextError::rule(pos, format!("expected a named sequent, found {}", v.kind()))),
        }
    }

    fn set(&self, args: &[Arg], i: usize, pos: Pos) -> Result<Ocmt, TextError> {
        match self.value(args, i, pos)? {
            Value::Set(o) => Ok(o),
            v => Err(TextError::rule(pos, format!("expected an OCMT, found {}", v.kind()))),
        }
    }

    fn arity(args: &[Arg], n: usize, name: &str, pos: Pos) -> Result<(), TextError> {
        if args.len() != n {
            return Err(TextError::parse(pos, format!("{name} takes {n} arguments, found {}", args.len())));
        }
        Ok(())
    }

    fn call(&self, name: &str, pos: Pos, args: &[Arg]) -> Result<Value, TextError> {
        let rule = |e: &dyn fmt::Display| TextError::rule(pos, format!("{name}: {e}"));
        let unnamed_dialect = matches!(self.dialect, Dialect::Unnamed | Dialect::UnnamedSet);
        let var = |s: &Sequent, n: &str| s.find_var(n).ok_or_else(|| rule(&format!("no variable {n} in the sequent")));
        let ovar = |o: &Ocmt, n: &str| o.find_var(n).ok_or_else(|| rule(&format!("no variable {n} in the OCMT")));
        if unnamed_dialect {
            return match name {
                "point" => {
                    Self::arity(args, 0, name, pos)?;
                    Ok(Value::Unnamed(rule_point()))
                }
                "degen" => {
                    Self::arity(args, 1, name, pos)?;
                    Ok(Value::Unnamed(rule_degen(&self.unnamed(args, 0, pos)?)))
                }
                "shift" => {
                    Self::arity(args, 1, name, pos)?;
                    Ok(Value::Unnamed(rule_shift(&self.unnamed(args, 0, pos)?)))
                }
                "graft" => {
                    Self::arity(args, 3, name, pos)?;
                    let s = self.unnamed(args, 0, pos)?;
                    let Some(Arg::Addr(raw, ann, apos)) = args.get(1) else {
                        return Err(TextError::parse(pos, "graft expects an address as second argument"));
                    };
                    let dim = s.src.dim().checked_sub(1).ok_or_else(|| rule(&"cannot graft on a point"))?;
                    let at = resolve_addr(raw, *ann, *apos, dim)?;
                    let q = self.unnamed(args, 2, pos)?;
                    rule_graft(&s, &at, &q).map(Value::Unnamed).map_err(|e| rule(&e))
                }
                _ => unreachable!("filtered by allowed"),
            };
        }
        match name {
            "point" | "mpoint" => {
                Self::arity(args, 1, name, pos)?;
                let n = self.name(args, 0, pos)?;
                Ok(match self.dialect {
                    Dialect::Mixed => Value::Set(m_point(&n)),
                    _ => Value::Named(n_point(&n)),
                })
            }
            "degen" => {
                Self::arity(args, 1, name, pos)?;
                n_degen(&self.named(args, 0, pos)?).map(Value::Named).map_err(|e| rule(&e))
            }
            "shift" => {
                Self::arity(args, 2, name, pos)?;
                let n = self.name(args, 1, pos)?;
                n_shift(&self.named(args, 0, pos)?, &n).map(Value::Named).map_err(|e| rule(&e))
            }
            "degenshift" => {
                Self::arity(args, 2, name, pos)?;
                let n = self.name(args, 1, pos)?;
                n_degen_shift(&self.named(args, 0, pos)?, &n).map(Value::Named).map_err(|e| rule(&e))
            }
            "graft" | "mgraft" => {
                Self::arity(args, 3, name, pos)?;
                let s = self.named(args, 0, pos)?;
                let a = var(&s, &self.name(args, 1, pos)?)?;
                let x = self.named(args, 2, pos)?;
                let r = if name == "graft" { n_graft(&s, &a, &x) } else { m_graft(&s, &a, &x) };
                r.map(Value::Named).map_err(|e| rule(&e))
            }
            "repr" => {
                Self::arity(args, 1, name, pos)?;
                os_repr(&self.named(args, 0, pos)?).map(Value::Set).map_err(|e| rule(&e))
            }
            "zero" => {
                Self::arity(args, 0, name, pos)?;
                Ok(Value::Set(os_zero()))
            }
            "sum" => {
                Self::arity(args, 2, name, pos)?;
                let (a, b) = (self.set(args, 0, pos)?, self.set(args, 1, pos)?);
                os_sum(&a, &b).map(Value::Set).map_err(|e| rule(&e))
            }
            "usum" => {
                let mut acc = os_zero();
                for i in 0..args.len() {
                    acc = os_sum(&acc, &self.set(args, i, pos)?).map_err(|e| rule(&e))?;
                }
                Ok(Value::Set(acc))
            }
            "glue" => {
                Self::arity(args, 3, name, pos)?;
                let o = self.set(args, 0, pos)?;
                let a = ovar(&o, &self.name(args, 1, pos)?)?;
                let b = ovar(&o, &self.name(args, 2, pos)?)?;
                os_glue(&o, &a, &b).map(Value::Set).map_err(|e| rule(&e))
            }
            "mpd" | "mdegen" => {
                Self::arity(args, 2, name, pos)?;
                let o = self.set(args, 0, pos)?;
                let x = ovar(&o, &self.name(args, 1, pos)?)?;
                let r = if name == "mpd" { m_pd(&o, &x) } else { m_degen(&o, &x) };
                r.map(Value::Named).map_err(|e| rule(&e))
            }
            "mshift" => {
                Self::arity(args, 2, name, pos)?;
                let n = self.name(args, 1, pos)?;
                m_shift(&self.named(args, 0, pos)?, &n).map(Value::Set).map_err(|e| rule(&e))
            }
            _ => unreachable!("filtered by allowed"),
        }
    }
}

impl Script {
    /// Evaluates the statements in order; the conclusion is the last value produced.
    pub fn run(&self) -> Result<Value, TextError> {
        let mut env: HashMap<String, Value> = HashMap::new();
        let mut last: Option<Value> = None;
        let mut ctx = UContext::new();
        let mut pending: Option<(UPastingDiagram, Pos)> = None;
        let rule = |pos: Pos, e: &dyn fmt::Display| TextError::rule(pos, e.to_string());
        for st in &self.stmts {
            let ev = Eval { dialect: self.dialect, env: &env };
            match st {
                Stmt::Let(n, e) => {
                    let v = ev.eval(e)?;
                    env.insert(n.clone(), v.clone());
                    last = Some(v);
                }
                Stmt::Expr(e) => last = Some(ev.eval(e)?),
                Stmt::Point(n, pos) => {
                    ctx = u_point(&ctx, n).map_err(|e| rule(*pos, &e))?;
                    last = Some(Value::Context(ctx.clone()));
                }
                Stmt::Degen(n, pos) => {
                    if let Some((_, p)) = pending {
                        return Err(TextError::rule(p, "pasting diagram never shifted"));
                    }
                    pending = Some((u_degen(&ctx, n).map_err(|e| rule(*pos, &e))?, *pos));
                }
                Stmt::Graft { shape, pos, entries } => {
                    if let Some((_, p)) = pending {
                        return Err(TextError::rule(p, "pasting diagram never shifted"));
                    }
                    let shape = match ev.eval(shape)? {
                        v @ (Value::Preopetope(_) | Value::Unnamed(_)) => as_preopetope(&v).expect("convertible"),
                        v => return Err(TextError::rule(*pos, format!("graft needs a shape, found {}", v.kind()))),
                    };
                    let dim = shape.dim().checked_sub(1).ok_or_else(|| TextError::rule(*pos, "cannot graft a point"))?;
                    let mut assignment = BTreeMap::new();
                    for (kpos, raw, n) in entries {
                        let k = raw.resolve(dim).map_err(|e| TextError::parse(*kpos, e))?;
                        if assignment.insert(k.clone(), n.clone()).is_some() {
                            return Err(TextError::parse(*kpos, format!("duplicate address {k}")));
                        }
                    }
                    pending = Some((u_graft(&ctx, &shape, &assignment).map_err(|e| rule(*pos, &e))?, *pos));
                }
                Stmt::Shift { filler, name, pos } => {
                    let (pd, _) = pending.take().ok_or_else(|| TextError::rule(*pos, "shift needs a pasting diagram"))?;
                    ctx = u_shift(&ctx, &pd, filler, name).map_err(|e| rule(*pos, &e))?;
                    last = Some(Value::Context(ctx.clone()));
                }
            }
        }
        if let Some((_, p)) = pending {
            return Err(TextError::rule(p, "pasting diagram never shifted"));
        }
        match (self.dialect, last) {
            (Dialect::UnnamedSet, _) => Ok(Value::Context(ctx)),
            (_, Some(v)) => Ok(v),
            (_, None) => Err(TextError::parse(Pos { line: 1, col: 1 }, "empty script")),
        }
    }
}

pub fn run_script(text: &str) -> Result<Value, TextError> {
    parse_script(text)?.run()
}

/// An `opt!` script that replays a named derivation.
pub fn named_script(d: &NamedDerivation) -> String {
    fn emit(d: &NamedDerivation, lines: &mut Vec<String>) -> String {
        match d {
            NamedDerivation::Point(n) => format!("point {n}"),
            NamedDerivation::Shift(inner, n) => {
                let e = emit(inner, lines);
                lines.push(format!("let {n} = shift({e}, {n})"));
                n.clone()
            }
            NamedDerivation::DegenShift(inner, n) => {
                let e = emit(inner, lines);
                lines.push(format!("let {n} = degenshift({e}, {n})"));
                n.clone()
            }
            NamedDerivation::Graft(s, a, x) => {
                let (s, x) = (emit(s, lines), emit(x, lines));
                format!("graft({s}, {a}, {x})")
            }
        }
    }
    let mut lines = vec!["#dialect opt!".to_string()];
    let last = emit(d, &mut lines);
    lines.push(last);
    lines.join("\n") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unnamed_omega() {
        let text = "#dialect opt?\nlet two = graft(shift(shift(point)), [*], shift(point))\ngraft(shift(two), [[*]], two)\n";
        let Value::Unnamed(s) = run_script(text).unwrap() else { panic!() };
        assert_eq!(s.tgt, Some(Preopetope::integer(3)));
    }

    #[test]
    fn named_classic() {
        let text = "#dialect opt!
let f = shift(point a, f)
let g = shift(point b, g)
let h = shift(point c, h)
let i = shift(point a, i)
let alpha = shift(graft(g, b, f), alpha)
let beta = shift(graft(h, c, i), beta)
shift(graft(beta, i, alpha), A)
";
        let Value::Named(s) = run_script(text).unwrap() else { panic!() };
        assert_eq!(s.ty.to_string(), "beta(i <- alpha) ~> h(c <- g(b <- f)) ~> a ~> 0");
    }

    #[test]
    fn errors_are_located() {
        let e = run_script("#dialect opt!\nlet f = shift(point a, f)\nshift(f, a)\n").unwrap_err();
        assert!(matches!(e, TextError::Rule { pos: Pos { line: 3, col: 1 }, .. }), "{e}");
        let e = run_script("#dialect opt!\nshift(point a f)\n").unwrap_err();
        assert!(e.is_parse());
        assert!(run_script("shift(point)").unwrap_err().is_parse());
        let e = run_script("#dialect opt?\nrepr(point)\n").unwrap_err();
        assert!(e.is_parse());
        let e = run_script("#dialect opt!\nshift(point _a, f)\n").unwrap_err();
        assert!(matches!(e, TextError::Parse { pos: Pos { line: 2, col: 13 }, .. }), "{e}");
        assert!(run_script("#dialect optset?\npoint _a\n").unwrap_err().is_parse());
    }

    #[test]
    fn unnamed_set_statements() {
        let text = "#dialect optset?
point a
point b
graft arrow { * <- a }
shift b f
graft arrow { * <- b }
shift a g
graft arrow { * <- a }
shift a h
graft integer(2) { [] <- g; [*] <- f }
shift h alpha
";
        let Value::Context(c) = run_script(text).unwrap() else { panic!() };
        assert_eq!(c.cells.len(), 6);
        let bad = text.replace("shift h alpha", "shift f alpha");
        let e = run_script(&bad).unwrap_err();
        assert!(matches!(e, TextError::Rule { pos: Pos { line: 11, .. }, .. }), "{e}");
        let dangling = text.replace("shift h alpha", "");
        assert!(run_script(&dangling).is_err());
    }
}

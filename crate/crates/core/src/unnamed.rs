//! The unnamed sequent calculus: rules, targets, the decision procedure, and a generator.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::address::Address;
use crate::preopetope::{Preopetope, PreopetopeError, Readdressing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("{0} is not a leaf of the source")]
    NotALeaf(Address),
    #[error("graft needs a source of dimension at least 2 with nodes")]
    BadGraftSource,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("inner edge mismatch at {leaf}: edge is {edge}, grafted target is {target}")]
    InnerEdge { leaf: Address, edge: Preopetope, target: String },
    #[error("not an opetope: {0}")]
    Rejected(Rejection),
    #[error(transparent)]
    Preopetope(#[from] PreopetopeError),
}

type Result<T> = std::result::Result<T, DerivationError>;

/// `Γ ⊢ p → t`. A `None` target is the (-1)-dimensional `∅` of the point rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnnamedSequent {
    pub ctx: Readdressing,
    pub src: Preopetope,
    pub tgt: Option<Preopetope>,
}

impl fmt::Display for UnnamedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, n)) in self.ctx.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}/{n}")?;
        }
        write!(f, "}} |- {} -> ", self.src)?;
        match &self.tgt {
            Some(t) => write!(f, "{t}"),
            None => write!(f, "0"),
        }
    }
}

pub fn rule_point() -> UnnamedSequent {
    UnnamedSequent { ctx: Readdressing::new(), src: Preopetope::Point, tgt: None }
}

pub fn rule_degen(s: &UnnamedSequent) -> UnnamedSequent {
    let d = s.src.dim();
    UnnamedSequent {
        ctx: Readdressing::from([(Address::empty(d + 1), Address::empty(d))]),
        src: Preopetope::degen(s.src.clone()),
        tgt: Some(Preopetope::corolla(s.src.clone())),
    }
}

pub fn rule_shift(s: &UnnamedSequent) -> UnnamedSequent {
    let ctx = s.src.nodes().into_iter().map(|p| (p.wrap(), p)).collect();
    UnnamedSequent { ctx, src: Preopetope::corolla(s.src.clone()), tgt: Some(s.src.clone()) }
}

pub fn rule_graft(s: &UnnamedSequent, at: &Address, q: &UnnamedSequent) -> Result<UnnamedSequent> {
    let n = s.src.dim();
    if n < 2 || s.src.map().is_none() {
        return Err(DerivationError::BadGraftSource);
    }
    if q.src.dim() + 1 != n {
        return Err(DerivationError::DimMismatch { expected: n - 1, found: q.src.dim() });
    }
    let r = s.ctx.get(at).ok_or_else(|| DerivationError::NotALeaf(at.clone()))?.clone();
    let edge = s.src.edge(at)?;
    if Some(edge) != q.tgt.as_ref() {
        return Err(DerivationError::InnerEdge {
            leaf: at.clone(),
            edge: edge.clone(),
            target: q.tgt.as_ref().map_or("0".into(), ToString::to_string),
        });
    }
    let src = s.src.improper_graft(at, q.src.clone())?;
    let old_tgt = s.tgt.as_ref().ok_or(DerivationError::BadGraftSource)?;
    let tgt = old_tgt.substitute(&r, &q.src, &q.ctx)?;
    let inverse: BTreeMap<&Address, &Address> = q.ctx.iter().map(|(l, n)| (n, l)).collect();
    let mut ctx = Readdressing::new();
    for (a, b) in &s.ctx {
        if a == at {
            continue;
        }
        let b2 = if b != &r && r.is_prefix(b).map_err(PreopetopeError::from)? {
            let k0 = r.len();
            let y = &b.items()[k0];
            let x = inverse.get(y).ok_or_else(|| PreopetopeError::Readdress(b.clone()))?;
            let mut items = r.items().to_vec();
            items.extend(x.items().iter().cloned());
            items.extend(b.items()[k0 + 1..].iter().cloned());
            Address::seq(b.dim(), items).map_err(PreopetopeError::from)?
        } else {
            b.clone()
        };
        ctx.insert(a.clone(), b2);
    }
    for sj in q.src.nodes() {
        let leaf = at.push(sj.clone()).map_err(PreopetopeError::from)?;
        let node = r.concat_or_atom(&sj).map_err(PreopetopeError::from)?;
        ctx.insert(leaf, node);
    }
    Ok(UnnamedSequent { ctx, src, tgt: Some(tgt) })
}

/// Why a preopetope is not derivable, located by the chain of source addresses leading to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub path: Vec<Address>,
    pub reason: Box<RejectReason>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    BadArrow,
    NoRoot,
    Orphan(Address),
    NotAnEdge { key: Address, parent: Address, entry: Address },
    InnerEdge { key: Address, edge: Preopetope, target: Option<Preopetope> },
    Replay(String),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.path.is_empty() {
            write!(f, "in source ")?;
            for p in &self.path {
                write!(f, "{p} ")?;
            }
            write!(f, "- ")?;
        }
        match &*self.reason {
            RejectReason::BadArrow => write!(f, "the only 1-preopetope is {{* <- point}}"),
            RejectReason::NoRoot => write!(f, "no root node []"),
            RejectReason::Orphan(k) => write!(f, "{k} has no parent node"),
            RejectReason::NotAnEdge { key, parent, entry } => {
                write!(f, "{key}: {entry} is not a node of the source at {parent}")
            }
            RejectReason::InnerEdge { key, edge, target } => {
                let t = target.as_ref().map_or("0".to_string(), ToString::to_string);
                write!(f, "{key}: edge {edge} differs from the target {t} of the grafted source")
            }
            RejectReason::Replay(e) => write!(f, "replay failed: {e}"),
        }
    }
}

fn reject(path: &[Address], reason: RejectReason) -> Rejection {
    Rejection { path: path.to_vec(), reason: Box::new(reason) }
}

/// Memoizes the sequents of sub-preopetopes during deconstruction and replay.
#[derive(Default)]
pub struct Deriver {
    cache: HashMap<Preopetope, UnnamedSequent>,
}

impl Deriver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Deconstructs `p`: checks the root, then peels keys in reverse lexicographic
    /// order as graft instances, then replays the rules to produce the sequent.
    pub fn derive(&mut self, p: &Preopetope) -> std::result::Result<UnnamedSequent, Rejection> {
        let mut path = Vec::new();
        self.derive_at(p, &mut path)
    }

    fn derive_at(
        &mut self,
        p: &Preopetope,
        path: &mut Vec<Address>,
    ) -> std::result::Result<UnnamedSequent, Rejection> {
        if let Some(s) = self.cache.get(p) {
            return Ok(s.clone());
        }
        let s = match p {
            Preopetope::Point => rule_point(),
            Preopetope::Degen(q) => rule_degen(&self.derive_at(q, path)?),
            Preopetope::Nodes { dim: 1, map } => {
                if map.len() != 1 || map.values().next() != Some(&Preopetope::Point) {
                    return Err(reject(path, RejectReason::BadArrow));
                }
                rule_shift(&rule_point())
            }
            Preopetope::Nodes { dim, map } => {
                let root = Address::empty(dim - 1);
                if !map.contains_key(&root) {
                    return Err(reject(path, RejectReason::NoRoot));
                }
                let mut subs = BTreeMap::new();
                for (k, v) in map {
                    path.push(k.clone());
                    let sub = self.derive_at(v, path);
                    path.pop();
                    subs.insert(k, sub?);
                }
                for k in map.keys().rev() {
                    if *k == root {
                        continue;
                    }
                    let Some((parent, entry)) = k.split_last() else {
                        return Err(reject(path, RejectReason::Orphan(k.clone())));
                    };
                    let Some(ps) = map.get(&parent) else {
                        return Err(reject(path, RejectReason::Orphan(k.clone())));
                    };
                    let Ok(edge) = ps.source(entry) else {
                        let reason =
                            RejectReason::NotAnEdge { key: k.clone(), parent, entry: entry.clone() };
                        return Err(reject(path, reason));
                    };
                    if subs[k].tgt.as_ref() != Some(edge) {
                        let reason = RejectReason::InnerEdge {
                            key: k.clone(),
                            edge: edge.clone(),
                            target: subs[k].tgt.clone(),
                        };
                        return Err(reject(path, reason));
                    }
                }
                let order: Vec<Address> = map.keys().cloned().collect();
                replay(&subs, &order).map_err(|e| reject(path, RejectReason::Replay(e.to_string())))?
            }
        };
        self.cache.insert(p.clone(), s.clone());
        Ok(s)
    }
}

fn replay(subs: &BTreeMap<&Address, UnnamedSequent>, order: &[Address]) -> Result<UnnamedSequent> {
    let (first, rest) = order.split_first().ok_or(PreopetopeError::Empty)?;
    let mut s = rule_shift(&subs[first]);
    for k in rest {
        s = rule_graft(&s, k, &subs[k])?;
    }
    Ok(s)
}

/// The derived sequent `Γ ⊢ p → t p`, or the reason `p` is not an opetope.
pub fn derive(p: &Preopetope) -> std::result::Result<UnnamedSequent, Rejection> {
    Deriver::new().derive(p)
}

pub fn is_opetope(p: &Preopetope) -> bool {
    derive(p).is_ok()
}

/// `(t p, ℘_p)`.
pub fn target_of(p: &Preopetope) -> Result<(Option<Preopetope>, Readdressing)> {
    let s = derive(p).map_err(DerivationError::Rejected)?;
    Ok((s.tgt, s.ctx))
}

/// A random linear extension of the parent order on the keys of `map`.
pub fn random_order(map: &BTreeMap<Address, Preopetope>, rng: &mut dyn RngCore) -> Vec<Address> {
    let mut children: BTreeMap<Address, Vec<Address>> = BTreeMap::new();
    let mut roots = Vec::new();
    for k in map.keys() {
        match k.split_last() {
            Some((parent, _)) if map.contains_key(&parent) => {
                children.entry(parent).or_default().push(k.clone())
            }
            _ => roots.push(k.clone()),
        }
    }
    let mut available = roots;
    let mut out = Vec::new();
    while !available.is_empty() {
        let i = rng.gen_range(0..available.len());
        let k = available.swap_remove(i);
        if let Some(c) = children.remove(&k) {
            available.extend(c);
        }
        out.push(k);
    }
    out
}

/// Replays `p` through the rules, grafting in a random legal order at every level.
pub fn derive_in_random_order(p: &Preopetope, rng: &mut dyn RngCore) -> Result<UnnamedSequent> {
    match p {
        Preopetope::Point => Ok(rule_point()),
        Preopetope::Degen(q) => Ok(rule_degen(&derive_in_random_order(q, rng)?)),
        Preopetope::Nodes { dim: 1, .. } => {
            if p != &Preopetope::arrow() {
                return Err(DerivationError::Rejected(reject(&[], RejectReason::BadArrow)));
            }
            Ok(rule_shift(&rule_point()))
        }
        Preopetope::Nodes { map, .. } => {
            let mut subs = BTreeMap::new();
            for (k, v) in map {
                subs.insert(k, derive_in_random_order(v, rng)?);
            }
            let order = random_order(map, rng);
            replay(&subs, &order)
        }
    }
}

/// The structural invariants every derived sequent satisfies.
pub fn check_sequent(s: &UnnamedSequent) -> std::result::Result<(), String> {
    let n = s.src.dim();
    match &s.tgt {
        None if n != 0 => return Err("only the point has the empty target".into()),
        Some(t) if t.dim() + 1 != n => {
            return Err(format!("dim src {} but dim tgt {}", n, t.dim()));
        }
        _ => {}
    }
    if n >= 2 {
        let leaves = s.src.leaves().map_err(|e| e.to_string())?;
        let keys: BTreeSet<Address> = s.ctx.keys().cloned().collect();
        if keys != leaves {
            return Err("context keys differ from the leaves of the source".into());
        }
        let values: BTreeSet<Address> = s.ctx.values().cloned().collect();
        let nodes = s.tgt.as_ref().map(Preopetope::nodes).unwrap_or_default();
        if values.len() != s.ctx.len() || values != nodes {
            return Err("context is not a bijection onto the nodes of the target".into());
        }
    }
    if let Some(t) = &s.tgt {
        if let Err(r) = derive(t) {
            return Err(format!("target is not an opetope: {r}"));
        }
    }
    Ok(())
}

/// The readdressing of a shifted sequent over `p`.
pub fn corolla_readdressing(p: &Preopetope) -> Readdressing {
    p.nodes().into_iter().map(|q| (q.wrap(), q)).collect()
}

/// `q`'s address `addr` as seen after substituting at `at` with readdressing `ups`.
pub fn transport(addr: &Address, at: &Address, ups: &Readdressing) -> Result<Address> {
    if addr == at || !at.is_prefix(addr).map_err(PreopetopeError::from)? {
        return Ok(addr.clone());
    }
    let k0 = at.len();
    let b = &addr.items()[k0];
    let a = ups
        .iter()
        .find(|(_, n)| *n == b)
        .map(|(l, _)| l)
        .ok_or_else(|| PreopetopeError::Readdress(addr.clone()))?;
    let mut items = at.items().to_vec();
    items.extend(a.items().iter().cloned());
    items.extend(addr.items()[k0 + 1..].iter().cloned());
    Ok(Address::seq(addr.dim(), items).map_err(PreopetopeError::from)?)
}

/// Both orders of substituting at two distinct nodes `e`, `f` of `t` agree.
pub fn check_disjoint(
    t: &Preopetope,
    e: &Address,
    q1: &UnnamedSequent,
    f: &Address,
    q2: &UnnamedSequent,
) -> Result<bool> {
    let lhs = t
        .substitute(e, &q1.src, &q1.ctx)?
        .substitute(&transport(f, e, &q1.ctx)?, &q2.src, &q2.ctx)?;
    let rhs = t
        .substitute(f, &q2.src, &q2.ctx)?
        .substitute(&transport(e, f, &q2.ctx)?, &q1.src, &q1.ctx)?;
    Ok(lhs == rhs)
}

/// Substituting `q1` at `e` then `q2` at `e·f` equals substituting `q1 ▢_f q2` at `e`.
pub fn check_nested(
    t: &Preopetope,
    e: &Address,
    q1: &UnnamedSequent,
    f: &Address,
    q2: &UnnamedSequent,
) -> Result<bool> {
    let ef = e.concat(f).map_err(PreopetopeError::from)?;
    let lhs = t.substitute(e, &q1.src, &q1.ctx)?.substitute(&ef, &q2.src, &q2.ctx)?;
    let inner = q1.src.substitute(f, &q2.src, &q2.ctx)?;
    let inner_seq = derive(&inner).map_err(DerivationError::Rejected)?;
    if inner_seq.tgt != q1.tgt {
        return Ok(false);
    }
    let rhs = t.substitute(e, &inner, &inner_seq.ctx)?;
    Ok(lhs == rhs)
}

/// Left unit `Y_{t T} ▢_[] T = T` and right unit `T ▢_p Y_{s_p T} = T` at every node.
pub fn check_units(s: &UnnamedSequent) -> Result<bool> {
    let (Some(b), Some(map)) = (&s.tgt, s.src.map()) else {
        return Ok(true);
    };
    let y = Preopetope::corolla(b.clone());
    if y.substitute(&Address::empty(b.dim()), &s.src, &s.ctx)? != s.src {
        return Ok(false);
    }
    for (p, sp) in map {
        let unit = Preopetope::corolla(sp.clone());
        if s.src.substitute(p, &unit, &corolla_readdressing(sp))? != s.src {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Grows derivable preopetopes by random rule application.
pub struct Generator {
    rng: ChaCha8Rng,
    deriver: Deriver,
    pool: HashMap<Preopetope, Vec<UnnamedSequent>>,
    pub degen_rate: f64,
}

const POOL_CAP: usize = 12;

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            deriver: Deriver::new(),
            pool: HashMap::new(),
            degen_rate: 0.15,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A derived sequent whose source has dimension `n` and at most `size` nodes.
    pub fn sequent(&mut self, n: usize, size: usize) -> UnnamedSequent {
        let size = size.max(1);
        let s = match n {
            0 => rule_point(),
            1 => rule_shift(&rule_point()),
            _ if self.rng.gen_bool(self.degen_rate) => {
                let inner = self.sequent(n - 2, size);
                rule_degen(&inner)
            }
            _ => {
                let base = self.sequent(n - 1, size);
                let mut s = rule_shift(&base);
                let extra = self.rng.gen_range(0..size);
                for _ in 0..extra {
                    let leaves: Vec<Address> = s.ctx.keys().cloned().collect();
                    let Some(l) = leaves.choose(&mut self.rng).cloned() else { break };
                    let edge = s.src.edge(&l).expect("leaf has an edge").clone();
                    let q = self.with_target(&edge, size);
                    s = rule_graft(&s, &l, &q).expect("generated graft is legal");
                }
                s
            }
        };
        if let Some(t) = &s.tgt {
            let bucket = self.pool.entry(t.clone()).or_default();
            if bucket.len() < POOL_CAP && !bucket.contains(&s) {
                bucket.push(s.clone());
            }
        }
        s
    }

    pub fn preopetope(&mut self, n: usize, size: usize) -> Preopetope {
        self.sequent(n, size).src
    }

    /// A sequent `⊢ q → target`, drawn from the pool, a corolla, or a degeneracy.
    fn with_target(&mut self, target: &Preopetope, size: usize) -> UnnamedSequent {
        let mut options: Vec<UnnamedSequent> = Vec::new();
        if let Some(b) = self.pool.get(target) {
            options.extend(b.iter().filter(|s| s.src.node_count() <= size).cloned());
        }
        let base = self.deriver.derive(target).expect("edge decorations are derivable");
        options.push(rule_shift(&base));
        if let Some(map) = target.map() {
            if let (1, Some((k, phi))) = (map.len(), map.iter().next()) {
                if *k == Address::empty(phi.dim()) {
                    let inner = self.deriver.derive(phi).expect("derivable");
                    options.push(rule_degen(&inner));
                }
            }
        }
        options.choose(&mut self.rng).cloned().expect("at least the corolla")
    }
}

pub fn generate_random(n: usize, size: usize, seed: u64) -> Preopetope {
    Generator::new(seed).preopetope(n, size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_seq() -> UnnamedSequent {
        let one = rule_shift(&rule_shift(&rule_point()));
        rule_graft(&one, &Address::stars(1), &rule_shift(&rule_point())).unwrap()
    }

    #[test]
    fn two_and_omega() {
        let two = two_seq();
        assert_eq!(two.src, Preopetope::integer(2));
        assert_eq!(two.tgt, Some(Preopetope::arrow()));
        assert_eq!(two.ctx, Readdressing::from([(Address::stars(2), Address::Atom)]));
        let omega = rule_graft(&rule_shift(&two), &Address::stars(1).wrap(), &two).unwrap();
        assert_eq!(omega.tgt, Some(Preopetope::integer(3)));
        check_sequent(&omega).unwrap();
        assert_eq!(omega.ctx.len(), 3);
    }

    #[test]
    fn shift_at_dimension_one_has_empty_context() {
        let a = rule_shift(&rule_point());
        assert_eq!(a.src, Preopetope::arrow());
        assert!(a.ctx.is_empty());
    }

    #[test]
    fn degen_point() {
        let z = rule_degen(&rule_point());
        assert_eq!(z.tgt, Some(Preopetope::arrow()));
        assert_eq!(z.ctx, Readdressing::from([(Address::empty(1), Address::Atom)]));
        assert!(is_opetope(&Preopetope::degen(Preopetope::degen(Preopetope::Point))));
    }

    #[test]
    fn graft_errors() {
        let two = two_seq();
        let at_node = Address::empty(2);
        assert!(matches!(
            rule_graft(&rule_shift(&two), &at_node, &two),
            Err(DerivationError::NotALeaf(_))
        ));
        let omega = rule_graft(&rule_shift(&two), &Address::stars(1).wrap(), &two).unwrap();
        let one = rule_shift(&rule_shift(&rule_point()));
        let leaf = Address::empty(2).wrap();
        let wrong = rule_graft(&rule_shift(&omega), &leaf, &rule_shift(&one));
        assert!(matches!(wrong, Err(DerivationError::InnerEdge { .. })));
    }

    #[test]
    fn non_examples() {
        let mut map = BTreeMap::new();
        map.insert(Address::stars(0), Preopetope::arrow());
        map.insert(Address::stars(5), Preopetope::arrow());
        assert!(!is_opetope(&Preopetope::from_map(map).unwrap()));
        let mut map = BTreeMap::new();
        map.insert(Address::stars(1), Preopetope::arrow());
        let r = derive(&Preopetope::from_map(map).unwrap()).unwrap_err();
        assert_eq!(*r.reason, RejectReason::NoRoot);
    }

    #[test]
    fn targets_of_integers() {
        let (t, ctx) = target_of(&Preopetope::integer(3)).unwrap();
        assert_eq!(t, Some(Preopetope::arrow()));
        assert_eq!(ctx, Readdressing::from([(Address::stars(3), Address::Atom)]));
        let (t, _) = target_of(&Preopetope::integer(0)).unwrap();
        assert_eq!(t, Some(Preopetope::arrow()));
    }

    #[test]
    fn generator_outputs_are_opetopes() {
        for seed in 0..40 {
            for n in 0..5 {
                let s = Generator::new(seed).sequent(n, 5);
                check_sequent(&s).unwrap();
                assert_eq!(derive(&s.src).unwrap(), s);
                assert!(s.src.node_count() <= 5);
            }
        }
    }
}

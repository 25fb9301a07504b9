//! Number of faces of the representable opetopic set on an opetope.

use std::collections::HashMap;

use thiserror::Error;

use crate::coding::{to_named, CodingError, Namer};
use crate::complex::{materialize, ComplexError};
use crate::nset::os_repr;
use crate::preopetope::Preopetope;
use crate::unnamed::{self, Rejection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("not an opetope: {0}")]
    Rejected(Rejection),
    #[error("the two counting formulas disagree: {0} vs {1}")]
    Disagree(u64, u64),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// `#ω`, computed by grafting increments and cross-checked against the closed sum.
pub fn count(p: &Preopetope) -> Result<u64, CountError> {
    unnamed::derive(p).map_err(CountError::Rejected)?;
    let mut memo = HashMap::new();
    let a = count_by_grafts(p, &mut memo);
    let b = count_by_sum(p, &mut HashMap::new());
    if a != b {
        return Err(CountError::Disagree(a, b));
    }
    Ok(a)
}

/// `#ν∘Y_ψ = #ν + #ψ − #e_[l]ν`, starting from `#Y_ψ = 2 + #ψ`.
pub fn count_by_grafts(p: &Preopetope, memo: &mut HashMap<Preopetope, u64>) -> u64 {
    if let Some(&n) = memo.get(p) {
        return n;
    }
    let n = match p {
        Preopetope::Point => 1,
        Preopetope::Degen(q) => 2 + count_by_grafts(q, memo),
        Preopetope::Nodes { dim: 1, .. } => 3,
        Preopetope::Nodes { map, .. } => {
            let mut it = map.iter();
            let (_, first) = it.next().expect("nonempty");
            let mut total = 2 + count_by_grafts(first, memo);
            for (k, psi) in it {
                let edge = p.edge(k).expect("inner edge");
                total = total + count_by_grafts(psi, memo) - count_by_grafts(edge, memo);
            }
            total
        }
    };
    memo.insert(p.clone(), n);
    n
}

/// `#ω = 2 + Σ #s_[p]ω − Σ_{[p[q]] ∈ ω•} #s_[q]s_[p]ω`.
pub fn count_by_sum(p: &Preopetope, memo: &mut HashMap<Preopetope, u64>) -> u64 {
    if let Some(&n) = memo.get(p) {
        return n;
    }
    let n = match p {
        Preopetope::Point => 1,
        Preopetope::Degen(q) => 2 + count_by_sum(q, memo),
        Preopetope::Nodes { dim: 1, .. } => 3,
        Preopetope::Nodes { map, .. } => {
            let plus: u64 = map.values().map(|s| count_by_sum(s, memo)).sum();
            let minus: u64 = map
                .keys()
                .filter(|k| !k.is_empty())
                .map(|k| count_by_sum(p.edge(k).expect("inner edge"), memo))
                .sum();
            2 + plus - minus
        }
    };
    memo.insert(p.clone(), n);
    n
}

/// Independent count: materialize the representable built from the named calculus.
pub fn count_oracle(p: &Preopetope) -> Result<u64, CountError> {
    let s = to_named(p, &mut Namer::default())?;
    let o = os_repr(&s).map_err(CodingError::from)?;
    Ok(materialize(&o)?.cells.len() as u64)
}

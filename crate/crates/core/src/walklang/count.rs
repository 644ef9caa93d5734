//! Exact counting of anonymous walks and typed anonymous walks.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::AnonWalk;
use crate::error::{Error, Result};

/// Longest walk length the enumerators accept (B_10 = 115975 walks).
pub const MAX_ENUMERATION_LENGTH: usize = 10;

/// Bell number via `B_l = sum_k C(l-1, k) B_k`.
pub fn bell(l: usize) -> BigUint {
    let mut b: Vec<BigUint> = vec![BigUint::one()];
    // binomial row C(n-1, .) for the current n
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for n in 1..=l {
        if n > 1 {
            let mut next = vec![BigUint::one(); n];
            for k in 1..n - 1 {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
        }
        let bn = row.iter().zip(&b).fold(BigUint::zero(), |acc, (c, bk)| acc + c * bk);
        b.push(bn);
    }
    b.pop().unwrap()
}

fn check_guard(l: usize) -> Result<()> {
    if !(1..=MAX_ENUMERATION_LENGTH).contains(&l) {
        return Err(Error::invalid(format!(
            "walk length {l} outside enumerable range 1..={MAX_ENUMERATION_LENGTH}"
        )));
    }
    Ok(())
}

/// Every anonymous walk with `l` steps, in lexicographic order.
pub fn enumerate_aws(l: usize) -> Result<Vec<AnonWalk>> {
    check_guard(l)?;
    let mut out = Vec::new();
    let mut cur = vec![0usize];
    extend(&mut cur, 0, l + 1, &mut out);
    Ok(out)
}

fn extend(cur: &mut Vec<usize>, max: usize, len: usize, out: &mut Vec<AnonWalk>) {
    if cur.len() == len {
        out.push(AnonWalk { positions: cur.clone() });
        return;
    }
    let last = *cur.last().unwrap();
    for next in 0..=max + 1 {
        if next == last {
            continue;
        }
        cur.push(next);
        extend(cur, max.max(next), len, out);
        cur.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HawCount {
    /// Number of distinct typed anonymous walks: every distinct position of
    /// an anonymous walk independently takes one of the types.
    pub exact: BigUint,
    /// `num_types^l * B_l`, as stated for the typed-walk count.
    pub bound: BigUint,
}

pub fn count_haws(l: usize, num_types: usize) -> Result<HawCount> {
    if num_types < 1 {
        return Err(Error::invalid("need at least one node type"));
    }
    let aws = enumerate_aws(l)?;
    let t = BigUint::from(num_types);
    let exact = aws
        .iter()
        .fold(BigUint::zero(), |acc, aw| acc + t.pow(aw.distinct() as u32));
    let bound = t.pow(l as u32) * bell(l);
    Ok(HawCount { exact, bound })
}

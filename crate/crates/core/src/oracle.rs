//! Brute-force reference implementations for testing.
//!
//! Everything here is deliberately simple and exponential: restrictions are
//! enumerated by subset, supports are counted by scanning position arrays,
//! and no state is shared with the mining modules, so the two paths have no
//! common failure mode. Inputs beyond the configured caps are refused.

use std::collections::BTreeSet;

use crate::rank::{RankDatabase, Ranking};
use crate::{Error, Result};

/// Input caps for the brute-force operations.
#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    pub max_k: usize,
    pub max_n: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_k: 7, max_n: 500 }
    }
}

impl OracleLimits {
    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.max_k {
            return Err(Error::LimitExceeded(format!("K = {k} > {}", self.max_k)));
        }
        Ok(())
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::LimitExceeded(format!("N = {n} > {}", self.max_n)));
        }
        Ok(())
    }
}

/// Containment by position-array comparison only.
fn contains(pattern: &Ranking, tx: &Ranking) -> bool {
    let mut prev = 0usize;
    for &it in pattern.order() {
        let p = tx.positions()[it];
        if p == 0 || p < prev {
            return false;
        }
        prev = p;
    }
    true
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(items.len());
    fn rec(rest: &[usize], acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let mut next = rest.to_vec();
            let x = next.remove(i);
            acc.push(x);
            rec(&next, acc, out);
            acc.pop();
        }
    }
    rec(items, &mut acc, &mut out);
    out
}

/// All restrictions of `tx` with at least two items, as order sequences.
fn all_restrictions(tx: &Ranking) -> Vec<Vec<usize>> {
    let ord = tx.order();
    let k = ord.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let sub: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).map(|i| ord[i]).collect();
        out.push(sub);
    }
    out
}

/// All complete rankings extending `pattern`, by filtering every permutation
/// of the universe.
pub fn linear_extensions(pattern: &Ranking, limits: &OracleLimits) -> Result<Vec<Ranking>> {
    let k = pattern.universe_size();
    limits.check_k(k)?;
    let items: Vec<usize> = (0..k).collect();
    Ok(permutations(&items)
        .into_iter()
        .map(|o| Ranking::from_order(k, &o).expect("permutation is valid"))
        .filter(|p| contains(pattern, p))
        .collect())
}

/// Every ranking of length in `2..=k` over a `k`-item universe.
pub fn enumerate_all_rankings(k: usize, limits: &OracleLimits) -> Result<Vec<Ranking>> {
    limits.check_k(k)?;
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let items: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        for perm in permutations(&items) {
            out.push(Ranking::from_order(k, &perm).expect("valid order"));
        }
    }
    Ok(out)
}

/// Exact frequent set by enumerating every restriction of every transaction
/// and counting supports with a containment scan.
pub fn brute_frequent(
    db: &RankDatabase,
    delta: usize,
    limits: &OracleLimits,
) -> Result<Vec<(Ranking, usize)>> {
    limits.check_k(db.k())?;
    limits.check_n(db.n())?;
    if delta < 1 {
        return Err(Error::InvalidThreshold("threshold must be at least 1".into()));
    }
    let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
    for tx in db.transactions() {
        for sub in all_restrictions(tx) {
            candidates.insert(sub);
        }
    }
    let mut out = Vec::new();
    for ord in candidates {
        let pattern = Ranking::from_order(db.k(), &ord).expect("restriction is valid");
        let supp = db
            .transactions()
            .iter()
            .filter(|t| contains(&pattern, t))
            .count();
        if supp >= delta {
            out.push((pattern, supp));
        }
    }
    out.sort_by(|a, b| (a.0.len(), a.0.order()).cmp(&(b.0.len(), b.0.order())));
    Ok(out)
}

/// Exact closed set: a frequent ranking is dropped iff some frequent proper
/// superranking has equal support. (A superranking with equal support is
/// itself frequent, so filtering within the frequent set is exact.)
pub fn brute_closed(
    db: &RankDatabase,
    delta: usize,
    limits: &OracleLimits,
) -> Result<Vec<(Ranking, usize)>> {
    let frequent = brute_frequent(db, delta, limits)?;
    Ok(frequent
        .iter()
        .filter(|(r, s)| {
            !frequent
                .iter()
                .any(|(r2, s2)| r2.len() > r.len() && s2 == s && contains(r, r2))
        })
        .cloned()
        .collect())
}

/// All common subrankings of the given transactions that are not properly
/// contained in another common subranking.
pub fn brute_max_intersection(
    transactions: &[Ranking],
    limits: &OracleLimits,
) -> Result<Vec<Ranking>> {
    if transactions.is_empty() {
        return Err(Error::EmptyTransactionSet);
    }
    limits.check_n(transactions.len())?;
    let k = transactions[0].universe_size();
    limits.check_k(k)?;
    let mut common: Vec<Ranking> = Vec::new();
    for sub in all_restrictions(&transactions[0]) {
        let pattern = Ranking::from_order(k, &sub).expect("restriction is valid");
        if transactions.iter().all(|t| contains(&pattern, t)) {
            common.push(pattern);
        }
    }
    let maximal: Vec<Ranking> = common
        .iter()
        .filter(|r| {
            !common
                .iter()
                .any(|r2| r2.len() > r.len() && contains(r, r2))
        })
        .cloned()
        .collect();
    Ok(maximal)
}

/// Number of complete and incomplete rankings of a `k`-item universe:
/// the sum over lengths 2..=k of k!/(k-len)!.
pub fn count_all_rankings(k: usize) -> Result<u64> {
    if k > 12 {
        return Err(Error::LimitExceeded(format!("K = {k} > 12")));
    }
    let mut total: u64 = 0;
    for len in 2..=k as u64 {
        let mut term: u64 = 1;
        for i in 0..len {
            term = term
                .checked_mul(k as u64 - i)
                .ok_or_else(|| Error::Overflow("ranking count".into()))?;
        }
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::Overflow("ranking count".into()))?;
    }
    Ok(total)
}

//! Domain types for rank data: item universes, (incomplete) rankings and
//! their databases, plus the fundamental relations between rankings:
//! restriction, containment, tail extension and consistent combination.
//!
//! A ranking over a universe of `K` items is stored as a position array of
//! length `K`: entry `i` holds the 1-based position of item `i`, or 0 when
//! the item is unranked. The inverse order view (the item sequence by
//! increasing position) is derived at construction and cached, since the
//! mining code consumes the order form.

use std::collections::HashMap;

use crate::{Error, Result};

/// The fixed, ordered set of items that rankings are drawn from.
///
/// Every item has a stable dense index in `0..k`; the index is what all
/// hot-path code works with, names are restored by the I/O layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItemUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl ItemUniverse {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::InvalidUniverse(format!(
                "need at least 2 items, got {}",
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::InvalidUniverse("empty item name".into()));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidUniverse(format!("duplicate item name `{n}`")));
            }
        }
        Ok(Self { names, index })
    }

    /// Universe with items named `"1"`..`"k"`, the default for bare matrix files.
    pub fn numbered(k: usize) -> Result<Self> {
        Self::new((1..=k).map(|i| i.to_string()).collect())
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, item: usize) -> &str {
        &self.names[item]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

/// A total order over a subset of the item universe.
///
/// Rankings of length 0 or 1 can be produced by [`Ranking::restrict`] but are
/// degenerate: they are rejected as transactions at database construction and
/// as patterns at store insertion (see [`Ranking::is_pattern`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ranking {
    positions: Vec<usize>,
    order: Vec<usize>,
}

impl Ranking {
    /// Build from an item sequence (most preferred first).
    pub fn from_order(k: usize, order: &[usize]) -> Result<Self> {
        let mut positions = vec![0usize; k];
        for (pos, &item) in order.iter().enumerate() {
            if item >= k {
                return Err(Error::InvalidRanking(format!(
                    "item index {item} out of range for universe of {k}"
                )));
            }
            if positions[item] != 0 {
                return Err(Error::InvalidRanking(format!("item {item} ranked twice")));
            }
            positions[item] = pos + 1;
        }
        Ok(Self {
            positions,
            order: order.to_vec(),
        })
    }

    /// Build from a position array; nonzero entries must be exactly `{1..k}`.
    pub fn from_positions(positions: Vec<usize>) -> Result<Self> {
        let ranked = positions.iter().filter(|&&p| p != 0).count();
        let mut order = vec![usize::MAX; ranked];
        for (item, &p) in positions.iter().enumerate() {
            if p == 0 {
                continue;
            }
            if p > ranked {
                return Err(Error::InvalidRanking(format!(
                    "position {p} present but only {ranked} items ranked"
                )));
            }
            if order[p - 1] != usize::MAX {
                return Err(Error::InvalidRanking(format!("position {p} assigned twice")));
            }
            order[p - 1] = item;
        }
        Ok(Self { positions, order })
    }

    /// Number of ranked items.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// True when the ranking is usable as a pattern or transaction
    /// (the pattern space starts at length 2).
    pub fn is_pattern(&self) -> bool {
        self.order.len() >= 2
    }

    /// Size `K` of the underlying universe.
    pub fn universe_size(&self) -> usize {
        self.positions.len()
    }

    /// Ranked items by increasing position.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position array; 0 means unranked.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// 1-based position of `item`, or `None` when unranked.
    pub fn position_of(&self, item: usize) -> Option<usize> {
        match self.positions.get(item) {
            None | Some(0) => None,
            Some(&p) => Some(p),
        }
    }

    pub fn contains_item(&self, item: usize) -> bool {
        self.positions.get(item).is_some_and(|&p| p != 0)
    }

    /// Item on the last position.
    pub fn last(&self) -> Option<usize> {
        self.order.last().copied()
    }

    /// Restriction to the given item set, preserving relative order.
    ///
    /// All `items` must be ranked by `self`. Restrictions to fewer than two
    /// items are allowed but yield degenerate non-pattern rankings.
    pub fn restrict(&self, items: &[usize]) -> Result<Ranking> {
        let mut keep = vec![false; self.positions.len()];
        for &it in items {
            if it >= self.positions.len() || !self.contains_item(it) {
                return Err(Error::ItemNotRanked(it));
            }
            keep[it] = true;
        }
        let sub: Vec<usize> = self.order.iter().copied().filter(|&it| keep[it]).collect();
        Ranking::from_order(self.positions.len(), &sub)
    }

    /// Containment test: `self ⊂ other`, i.e. `other` ranks all of `self`'s
    /// items in the same relative order. Reflexive.
    pub fn is_subranking_of(&self, other: &Ranking) -> bool {
        debug_assert_eq!(self.positions.len(), other.positions.len());
        let mut prev = 0usize;
        for &it in &self.order {
            let p = other.positions[it];
            if p == 0 || p < prev {
                return false;
            }
            prev = p;
        }
        true
    }

    /// Append `item` after the current last position.
    pub fn tail_extend(&self, item: usize) -> Result<Ranking> {
        if item >= self.positions.len() {
            return Err(Error::InvalidRanking(format!(
                "item index {item} out of range for universe of {}",
                self.positions.len()
            )));
        }
        if self.contains_item(item) {
            return Err(Error::DuplicateItem(item));
        }
        let mut positions = self.positions.clone();
        positions[item] = self.order.len() + 1;
        let mut order = self.order.clone();
        order.push(item);
        Ok(Self { positions, order })
    }
}

/// All consistent combinations of two rankings: every ranking over the union
/// of their item sets whose restrictions to either side reproduce that side.
/// The result is empty exactly when the two rankings are inconsistent.
///
/// Enumerated by merge recursion over the two order sequences with shared
/// items pinned, which avoids filtering all permutations of the union.
pub fn oplus(a: &Ranking, b: &Ranking) -> Vec<Ranking> {
    debug_assert_eq!(a.universe_size(), b.universe_size());
    let k = a.universe_size();
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(a.len() + b.len());
    merge_rec(a.order(), b.order(), a, b, &mut acc, &mut out);
    out.into_iter()
        .map(|ord| Ranking::from_order(k, &ord).expect("merge yields valid orders"))
        .collect()
}

fn merge_rec(
    rest_a: &[usize],
    rest_b: &[usize],
    a: &Ranking,
    b: &Ranking,
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if rest_a.is_empty() && rest_b.is_empty() {
        out.push(acc.clone());
        return;
    }
    if let Some(&x) = rest_a.first() {
        if !b.contains_item(x) {
            acc.push(x);
            merge_rec(&rest_a[1..], rest_b, a, b, acc, out);
            acc.pop();
        } else if rest_b.first() == Some(&x) {
            // shared head: consume from both sides at once
            acc.push(x);
            merge_rec(&rest_a[1..], &rest_b[1..], a, b, acc, out);
            acc.pop();
        }
    }
    if let Some(&y) = rest_b.first() {
        if !a.contains_item(y) {
            acc.push(y);
            merge_rec(rest_a, &rest_b[1..], a, b, acc, out);
            acc.pop();
        }
    }
}

/// Absolute and relative support of a pattern in a database.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Support {
    pub absolute: usize,
    pub relative: f64,
}

/// Support by direct containment scan. The bit-vector path used by the
/// miners lives in [`crate::tesma`]; this is the plain reference route.
pub fn support(db: &RankDatabase, pattern: &Ranking) -> Support {
    let absolute = db
        .transactions()
        .iter()
        .filter(|t| pattern.is_subranking_of(t))
        .count();
    Support {
        absolute,
        relative: absolute as f64 / db.n() as f64,
    }
}

/// An immutable collection of ranking transactions over a fixed universe.
#[derive(Clone, Debug)]
pub struct RankDatabase {
    universe: ItemUniverse,
    transactions: Vec<Ranking>,
}

impl RankDatabase {
    pub fn new(universe: ItemUniverse, transactions: Vec<Ranking>) -> Result<Self> {
        if transactions.is_empty() {
            return Err(Error::InvalidDatabase("no transactions".into()));
        }
        for (i, t) in transactions.iter().enumerate() {
            if t.universe_size() != universe.k() {
                return Err(Error::InvalidDatabase(format!(
                    "transaction {} is over a universe of {} items, expected {}",
                    i + 1,
                    t.universe_size(),
                    universe.k()
                )));
            }
            if !t.is_pattern() {
                return Err(Error::InvalidDatabase(format!(
                    "transaction {} ranks {} item(s); at least 2 required",
                    i + 1,
                    t.len()
                )));
            }
        }
        Ok(Self {
            universe,
            transactions,
        })
    }

    pub fn universe(&self) -> &ItemUniverse {
        &self.universe
    }

    /// Number of transactions.
    pub fn n(&self) -> usize {
        self.transactions.len()
    }

    /// Number of items in the universe.
    pub fn k(&self) -> usize {
        self.universe.k()
    }

    pub fn transactions(&self) -> &[Ranking] {
        &self.transactions
    }

    pub fn transaction(&self, i: usize) -> &Ranking {
        &self.transactions[i]
    }
}

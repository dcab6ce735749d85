//! Frequent-subranking mining by depth-first tail extension (TESMA).
//!
//! The database is turned into a vertical representation: for every frequent
//! ordered item pair `(i, j)` the set of transactions containing it is kept
//! as a bit vector. A pattern's transaction set is then the bitwise AND of
//! its prefix's set with the pair set of its last two items, so support
//! counting never rescans the database. Search proceeds depth first over
//! prefix trees rooted at the frequent 2-rankings; by support monotonicity a
//! candidate whose last pair is missing from the index cannot be frequent,
//! which prunes whole subtrees before any bit work.

use crate::io::PatternStore;
use crate::par::map_roots;
use crate::rank::{RankDatabase, Ranking};
use crate::{Error, Result};

/// A subset of transactions as a word-packed bit vector of fixed width `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransactionSet {
    words: Vec<u64>,
    len: usize,
}

impl TransactionSet {
    pub fn empty(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut t = Self::empty(len);
        for &i in indices {
            t.insert(i);
        }
        t
    }

    /// Width of the vector (the database size it was built for).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Number of set bits, via hardware population count.
    pub fn cardinality(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len, other.len);
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn and_cardinality(&self, other: &Self) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `self ⊇ other`.
    pub fn is_superset_of(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == *b)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }
}

/// Support threshold, either a fraction of the database or an absolute count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    Relative(f64),
    Absolute(usize),
}

/// Mining configuration; holds the user-defined support threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MiningConfig {
    pub threshold: Threshold,
}

impl MiningConfig {
    pub fn relative(f: f64) -> Result<Self> {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidThreshold(format!(
                "relative threshold must be in (0, 1], got {f}"
            )));
        }
        Ok(Self {
            threshold: Threshold::Relative(f),
        })
    }

    pub fn absolute(c: usize) -> Result<Self> {
        if c < 1 {
            return Err(Error::InvalidThreshold(
                "absolute threshold must be at least 1".into(),
            ));
        }
        Ok(Self {
            threshold: Threshold::Absolute(c),
        })
    }

    /// Absolute threshold for a database of `n` transactions. Relative
    /// thresholds convert to the smallest count whose fraction still meets
    /// them, so no pattern below the requested fraction is ever admitted.
    pub fn delta_for(&self, n: usize) -> usize {
        match self.threshold {
            Threshold::Absolute(c) => c,
            Threshold::Relative(f) => {
                let nf = n as f64;
                let mut d = (f * nf).ceil() as usize;
                while d > 1 && (d - 1) as f64 / nf >= f {
                    d -= 1;
                }
                while (d as f64) / nf < f {
                    d += 1;
                }
                d.max(1)
            }
        }
    }
}

/// Vertical index of the frequent 2-rankings: entry `(i, j)` holds the exact
/// transaction set of the pair `(o_i, o_j)` when that pair meets the
/// threshold, and is absent otherwise. Iteration is by ascending item index
/// so mining output is deterministic.
#[derive(Clone, Debug)]
pub struct PairIndex {
    k: usize,
    cells: Vec<Option<TransactionSet>>,
}

impl PairIndex {
    pub fn build(db: &RankDatabase, delta: usize) -> Self {
        let k = db.k();
        let n = db.n();
        let mut cells: Vec<Option<TransactionSet>> = vec![None; k * k];
        for (ti, tx) in db.transactions().iter().enumerate() {
            let ord = tx.order();
            for a in 0..ord.len() {
                for b in a + 1..ord.len() {
                    cells[ord[a] * k + ord[b]]
                        .get_or_insert_with(|| TransactionSet::empty(n))
                        .insert(ti);
                }
            }
        }
        for cell in &mut cells {
            if cell.as_ref().is_some_and(|t| t.cardinality() < delta) {
                *cell = None;
            }
        }
        Self { k, cells }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&TransactionSet> {
        self.cells[i * self.k + j].as_ref()
    }

    /// Frequent successors of item `i`, ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &TransactionSet)> {
        self.cells[i * self.k..(i + 1) * self.k]
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.as_ref().map(|t| (j, t)))
    }

    /// All entries as `(i, j, transactions)`, ascending by `(i, j)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &TransactionSet)> {
        let k = self.k;
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(c, cell)| cell.as_ref().map(|t| (c / k, c % k, t)))
    }

    pub fn entry_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

/// Builds the frequent-pair index for the configured threshold.
pub fn build_pair_index(db: &RankDatabase, cfg: &MiningConfig) -> PairIndex {
    PairIndex::build(db, cfg.delta_for(db.n()))
}

/// Operation counters for the search, used by instrumentation tests: the
/// number of candidate bit-AND operations is bounded by (frequent patterns)
/// times (K - 1).
#[derive(Clone, Copy, Debug, Default)]
pub struct MiningStats {
    pub and_ops: u64,
}

/// Mine every frequent subranking of length >= 2 with its exact support.
pub fn mine_frequent(db: &RankDatabase, cfg: &MiningConfig) -> PatternStore {
    mine_frequent_with_stats(db, cfg).0
}

pub fn mine_frequent_with_stats(db: &RankDatabase, cfg: &MiningConfig) -> (PatternStore, MiningStats) {
    let delta = cfg.delta_for(db.n());
    let index = PairIndex::build(db, delta);
    let mut store = PatternStore::new();
    let mut stats = MiningStats::default();
    for (i, j, t) in index.entries() {
        let seed = Ranking::from_order(db.k(), &[i, j]).expect("distinct pair");
        store.push(seed.clone(), t.cardinality());
        extend_depth_first(&seed, t, &index, delta, &mut store, &mut stats);
    }
    (store, stats)
}

/// Same output as [`mine_frequent`], mining the root prefix trees on
/// `threads` workers. Fragments merge in root order, so the result is
/// identical to the sequential run.
pub fn mine_frequent_parallel(db: &RankDatabase, cfg: &MiningConfig, threads: usize) -> PatternStore {
    if threads <= 1 {
        return mine_frequent(db, cfg);
    }
    let delta = cfg.delta_for(db.n());
    let index = PairIndex::build(db, delta);
    let roots: Vec<(usize, usize)> = index.entries().map(|(i, j, _)| (i, j)).collect();
    let fragments = map_roots(threads, roots.len(), |ri| {
        let (i, j) = roots[ri];
        let t = index.get(i, j).expect("root pair present");
        let mut store = PatternStore::new();
        let mut stats = MiningStats::default();
        let seed = Ranking::from_order(db.k(), &[i, j]).expect("distinct pair");
        store.push(seed.clone(), t.cardinality());
        extend_depth_first(&seed, t, &index, delta, &mut store, &mut stats);
        store
    });
    let mut store = PatternStore::new();
    for frag in fragments {
        store.absorb(frag);
    }
    store
}

/// Depth-first expansion of `rho` by tail extension. Every frequent proper
/// tail extension is appended to the store and expanded recursively; the
/// child's transaction set is the AND of the parent's set with the pair set
/// of (last(rho), o). Items without an index entry for the last pair are
/// skipped without bit work.
pub fn extend_depth_first(
    rho: &Ranking,
    t_rho: &TransactionSet,
    index: &PairIndex,
    delta: usize,
    store: &mut PatternStore,
    stats: &mut MiningStats,
) {
    let last = rho.last().expect("pattern is non-empty");
    for (o, t_pair) in index.row(last) {
        if rho.contains_item(o) {
            continue;
        }
        stats.and_ops += 1;
        let t_child = t_rho.and(t_pair);
        let card = t_child.cardinality();
        if card < delta {
            continue;
        }
        let child = rho.tail_extend(o).expect("o is unranked in rho");
        store.push(child.clone(), card);
        extend_depth_first(&child, &t_child, index, delta, store, stats);
    }
}

/// Keep only patterns with no frequent proper superranking in the store.
/// Requires a complete frequent set: any frequent proper superranking then
/// implies one that is exactly one item longer, so checking the next-length
/// list suffices.
pub fn extract_maximal(store: &PatternStore) -> PatternStore {
    let mut out = PatternStore::new();
    for (len, list) in store.lists() {
        let next = store.of_length(len + 1);
        for (r, s) in list {
            if !next.iter().any(|(sup, _)| r.is_subranking_of(sup)) {
                out.push(r.clone(), *s);
            }
        }
    }
    out
}

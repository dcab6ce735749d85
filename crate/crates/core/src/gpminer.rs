//! Closed-subranking mining via prefix generators (GPMiner).
//!
//! The search is the same depth-first tail extension as in [`crate::tesma`],
//! with one extra pruning step: a frequent candidate survives only if it is a
//! prefix of its c-closure. The closure of a candidate's transaction set is
//! kept as a pairwise-preference matrix (the s1p matrix) that grows
//! incrementally along the search path, is turned into a forest whose
//! root-to-leaf paths are the maximal common subrankings, and is probed by a
//! recursive prefix test. A candidate whose transaction set equals its
//! parent's reuses the parent's forest and only needs a single-step descent
//! from the stored postfix node; it also proves the parent non-closed, so the
//! parent is deleted from the result once all its extensions are explored.

use crate::io::PatternStore;
use crate::par::map_roots;
use crate::rank::{RankDatabase, Ranking};
use crate::tesma::{MiningConfig, PairIndex, TransactionSet};
use crate::{Error, Result};

/// Boolean item-by-item matrix of the pairwise preferences shared by every
/// transaction of a set: `cell(j, i)` is set iff `o_i` precedes `o_j` in all
/// of them. The encoded relation is a strict partial order and, when built
/// from an actual transaction set, transitively closed. The diagonal is free
/// and serves as a visited flag while the closure forest is constructed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct S1pMatrix {
    k: usize,
    cells: Vec<bool>,
}

impl S1pMatrix {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            cells: vec![false; k * k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// True iff the preference `winner` before `loser` is shared.
    pub fn has_pref(&self, winner: usize, loser: usize) -> bool {
        self.cells[loser * self.k + winner]
    }

    pub(crate) fn set_pref(&mut self, winner: usize, loser: usize) {
        self.cells[loser * self.k + winner] = true;
    }

    fn clear_pref(&mut self, winner: usize, loser: usize) {
        self.cells[loser * self.k + winner] = false;
    }

    fn visited(&self, item: usize) -> bool {
        self.cells[item * self.k + item]
    }

    fn mark_visited(&mut self, item: usize) {
        self.cells[item * self.k + item] = true;
    }

    /// All shared preferences as `(winner, loser)` pairs, ascending.
    pub fn pref_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.k {
            for j in 0..self.k {
                if i != j && self.has_pref(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// No pair is preferred in both directions and the diagonal is clear.
    pub fn is_asymmetric(&self) -> bool {
        for i in 0..self.k {
            if self.visited(i) {
                return false;
            }
            for j in i + 1..self.k {
                if self.has_pref(i, j) && self.has_pref(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_transitively_closed(&self) -> bool {
        for a in 0..self.k {
            for b in 0..self.k {
                if a == b || !self.has_pref(a, b) {
                    continue;
                }
                for c in 0..self.k {
                    if c != a && c != b && self.has_pref(b, c) && !self.has_pref(a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Ordered item pairs not yet absorbed into the s1p matrix at the current
/// search depth. Seeded once from the pair index: a pair shared by at least
/// `delta` transactions is necessarily frequent, so frequent pairs are the
/// only candidates the matrix will ever absorb.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PendingPairs {
    pairs: Vec<(usize, usize)>,
}

impl PendingPairs {
    pub fn from_index(index: &PairIndex) -> Self {
        Self {
            pairs: index.entries().map(|(i, j, _)| (i, j)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Operation counters; `max_candidate_work` tracks the most basic steps
/// (pair tests + forest construction + prefix test) any single candidate
/// cost, which stays within a small multiple of K^2.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClosedMiningStats {
    pub and_ops: u64,
    pub candidates: u64,
    pub s1p_pair_tests: u64,
    pub forest_steps: u64,
    pub prefix_steps: u64,
    pub max_candidate_work: u64,
}

impl ClosedMiningStats {
    fn work(&self) -> u64 {
        self.s1p_pair_tests + self.forest_steps + self.prefix_steps
    }
}

/// Absorb into `s1p` every pending pair whose pair transaction set covers
/// `t`; absorbed pairs leave the pending set. Inputs are not modified:
/// updated copies are returned so sibling branches keep the parent state.
pub fn s1p_intersect(
    t: &TransactionSet,
    pending: &PendingPairs,
    s1p: &S1pMatrix,
    index: &PairIndex,
) -> (S1pMatrix, PendingPairs) {
    let mut stats = ClosedMiningStats::default();
    s1p_intersect_counted(t, pending, s1p, index, &mut stats)
}

fn s1p_intersect_counted(
    t: &TransactionSet,
    pending: &PendingPairs,
    s1p: &S1pMatrix,
    index: &PairIndex,
    stats: &mut ClosedMiningStats,
) -> (S1pMatrix, PendingPairs) {
    let mut m = s1p.clone();
    let mut rest = Vec::with_capacity(pending.pairs.len());
    for &(i, j) in &pending.pairs {
        stats.s1p_pair_tests += 1;
        let pair_t = index.get(i, j).expect("pending pairs are frequent");
        if pair_t.is_superset_of(t) {
            m.set_pref(i, j);
        } else {
            rest.push((i, j));
        }
    }
    (m, PendingPairs { pairs: rest })
}

/// Tree node of a closure forest.
#[derive(Clone, Debug)]
pub struct ForestNode {
    pub item: usize,
    pub children: Vec<usize>,
}

/// Forest whose root-to-leaf paths are the maximal common subrankings of a
/// transaction set. Singleton roots (items taking part in no shared pair)
/// may be present; paths shorter than two items are not patterns and are
/// dropped when the forest is read back as rankings.
#[derive(Clone, Debug)]
pub struct ClosureForest {
    nodes: Vec<ForestNode>,
    roots: Vec<usize>,
}

impl ClosureForest {
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn node(&self, idx: usize) -> &ForestNode {
        &self.nodes[idx]
    }

    /// All root-to-leaf item sequences.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut acc = Vec::new();
        for &r in &self.roots {
            self.collect_paths(r, &mut acc, &mut out);
        }
        out
    }

    fn collect_paths(&self, node: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        acc.push(self.nodes[node].item);
        if self.nodes[node].children.is_empty() {
            out.push(acc.clone());
        } else {
            for &c in &self.nodes[node].children {
                self.collect_paths(c, acc, out);
            }
        }
        acc.pop();
    }

    /// Paths of length >= 2 as rankings over a `k`-item universe.
    pub fn path_rankings(&self, k: usize) -> Vec<Ranking> {
        self.paths()
            .into_iter()
            .filter(|p| p.len() >= 2)
            .map(|p| Ranking::from_order(k, &p).expect("paths are duplicate-free"))
            .collect()
    }
}

/// Build the forest of maximal chains of the s1p relation. The first
/// transaction of `t` in database order supplies a topological item order:
/// the outer loop walks it and roots a tree at every item not visited by an
/// earlier tree (such an item has no incoming shared preference). During the
/// descent, shared preferences from path ancestors into the current item are
/// erased; they are transitive shortcuts witnessed by the path, so erasing
/// them keeps every surviving edge a covering step and each root-to-leaf
/// path a maximal chain.
pub fn build_closure_forest(
    t: &TransactionSet,
    s1p: &S1pMatrix,
    db: &RankDatabase,
) -> ClosureForest {
    let mut stats = ClosedMiningStats::default();
    build_closure_forest_counted(t, s1p, db, &mut stats)
}

fn build_closure_forest_counted(
    t: &TransactionSet,
    s1p: &S1pMatrix,
    db: &RankDatabase,
    stats: &mut ClosedMiningStats,
) -> ClosureForest {
    let first = t
        .first_one()
        .expect("closure forest needs a non-empty transaction set");
    let seq = db.transaction(first).order();
    let mut work = s1p.clone();
    let mut nodes: Vec<ForestNode> = Vec::new();
    let mut roots = Vec::new();
    let mut ancestors: Vec<usize> = Vec::new();
    for pos in 0..seq.len() {
        stats.forest_steps += 1;
        let item = seq[pos];
        if !work.visited(item) {
            let root = nodes.len();
            nodes.push(ForestNode {
                item,
                children: Vec::new(),
            });
            roots.push(root);
            recursive_connect(root, pos, seq, &mut work, &mut nodes, &mut ancestors, stats);
        }
    }
    ClosureForest { nodes, roots }
}

/// Attach the children of `seq[pos]` in transaction order: every item below
/// it with a surviving shared preference becomes a child (a fresh node per
/// occurrence, so shared sub-chains are expanded per parent), after edges
/// into that item from the strict ancestors of the current node are erased.
/// Finishing a node marks its diagonal, excluding it from the root scan.
fn recursive_connect(
    node: usize,
    pos: usize,
    seq: &[usize],
    work: &mut S1pMatrix,
    nodes: &mut Vec<ForestNode>,
    ancestors: &mut Vec<usize>,
    stats: &mut ClosedMiningStats,
) {
    let item = seq[pos];
    for cpos in pos + 1..seq.len() {
        stats.forest_steps += 1;
        let citem = seq[cpos];
        if !work.has_pref(item, citem) {
            continue;
        }
        for &a in ancestors.iter() {
            stats.forest_steps += 1;
            work.clear_pref(a, citem);
        }
        let child = nodes.len();
        nodes.push(ForestNode {
            item: citem,
            children: Vec::new(),
        });
        nodes[node].children.push(child);
        ancestors.push(item);
        recursive_connect(child, cpos, seq, work, nodes, ancestors, stats);
        ancestors.pop();
    }
    work.mark_visited(item);
}

/// Descend from `root` matching `rho`'s items from 1-based position `index`
/// on; returns the node at which `rho` is exhausted (the postfix root), or
/// `None` when no path matches. An `index` already past the end returns the
/// given root immediately, which is what the unchanged-closure fast path in
/// the miner relies on.
pub fn prefix_test_recursive(
    rho: &Ranking,
    forest: &ClosureForest,
    root: usize,
    index: usize,
) -> Option<usize> {
    let mut stats = ClosedMiningStats::default();
    prefix_test_recursive_counted(rho, forest, root, index, &mut stats)
}

fn prefix_test_recursive_counted(
    rho: &Ranking,
    forest: &ClosureForest,
    root: usize,
    index: usize,
    stats: &mut ClosedMiningStats,
) -> Option<usize> {
    if index > rho.len() {
        return Some(root);
    }
    let target = rho.order()[index - 1];
    for &child in &forest.node(root).children {
        stats.prefix_steps += 1;
        if forest.node(child).item == target {
            return prefix_test_recursive_counted(rho, forest, child, index + 1, stats);
        }
    }
    None
}

/// Full prefix test: treat all roots as children of a synthetic super-root
/// and match `rho` from its first item.
pub fn prefix_test(forest: &ClosureForest, rho: &Ranking) -> Option<usize> {
    let mut stats = ClosedMiningStats::default();
    prefix_test_counted(forest, rho, &mut stats)
}

fn prefix_test_counted(
    forest: &ClosureForest,
    rho: &Ranking,
    stats: &mut ClosedMiningStats,
) -> Option<usize> {
    let first = *rho.order().first()?;
    for &root in &forest.roots {
        stats.prefix_steps += 1;
        if forest.node(root).item == first {
            return prefix_test_recursive_counted(rho, forest, root, 2, stats);
        }
    }
    None
}

/// Pairwise-preference matrix of a transaction set computed directly: start
/// from all pairs of the first transaction and erase those some other
/// transaction does not share.
pub fn s1p_of_transaction_set(db: &RankDatabase, t: &TransactionSet) -> S1pMatrix {
    let first = t.first_one().expect("non-empty transaction set");
    let seq = db.transaction(first).order();
    let mut m = S1pMatrix::new(db.k());
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            m.set_pref(seq[a], seq[b]);
        }
    }
    for ti in t.iter_ones().skip(1) {
        let tx = db.transaction(ti);
        for a in 0..seq.len() {
            for b in a + 1..seq.len() {
                if !m.has_pref(seq[a], seq[b]) {
                    continue;
                }
                let pa = tx.position_of(seq[a]);
                let pb = tx.position_of(seq[b]);
                match (pa, pb) {
                    (Some(x), Some(y)) if x < y => {}
                    _ => m.clear_pref(seq[a], seq[b]),
                }
            }
        }
    }
    m
}

/// The maximal common subrankings of all transactions containing `pattern`.
/// Errors when no transaction contains it.
pub fn h_closure_of(db: &RankDatabase, pattern: &Ranking) -> Result<Vec<Ranking>> {
    let mut t = TransactionSet::empty(db.n());
    for (i, tx) in db.transactions().iter().enumerate() {
        if pattern.is_subranking_of(tx) {
            t.insert(i);
        }
    }
    if t.is_empty() {
        return Err(Error::EmptyTransactionSet);
    }
    let s1p = s1p_of_transaction_set(db, &t);
    let forest = build_closure_forest(&t, &s1p, db);
    Ok(forest.path_rankings(db.k()))
}

/// A pattern is closed iff it is one of the maximal common subrankings of
/// its own transaction set. Errors on zero support.
pub fn is_closed(db: &RankDatabase, pattern: &Ranking) -> Result<bool> {
    match h_closure_of(db, pattern) {
        Ok(closure) => Ok(closure.contains(pattern)),
        Err(Error::EmptyTransactionSet) => Err(Error::ZeroSupport),
        Err(e) => Err(e),
    }
}

struct MineCtx<'a> {
    db: &'a RankDatabase,
    index: &'a PairIndex,
    delta: usize,
}

/// Mine exactly the closed frequent subrankings with their supports.
pub fn mine_closed(db: &RankDatabase, cfg: &MiningConfig) -> PatternStore {
    mine_closed_with_stats(db, cfg).0
}

pub fn mine_closed_with_stats(db: &RankDatabase, cfg: &MiningConfig) -> (PatternStore, ClosedMiningStats) {
    let delta = cfg.delta_for(db.n());
    let index = PairIndex::build(db, delta);
    let pending0 = PendingPairs::from_index(&index);
    let ctx = MineCtx {
        db,
        index: &index,
        delta,
    };
    let mut store = PatternStore::new();
    let mut stats = ClosedMiningStats::default();
    let roots: Vec<(usize, usize)> = index.entries().map(|(i, j, _)| (i, j)).collect();
    for (i, j) in roots {
        mine_root(&ctx, &pending0, i, j, &mut store, &mut stats);
    }
    (store, stats)
}

/// Same output as [`mine_closed`] on `threads` workers; per-root fragments
/// merge in root order so results are identical to the sequential run.
pub fn mine_closed_parallel(db: &RankDatabase, cfg: &MiningConfig, threads: usize) -> PatternStore {
    if threads <= 1 {
        return mine_closed(db, cfg);
    }
    let delta = cfg.delta_for(db.n());
    let index = PairIndex::build(db, delta);
    let pending0 = PendingPairs::from_index(&index);
    let roots: Vec<(usize, usize)> = index.entries().map(|(i, j, _)| (i, j)).collect();
    let ctx = MineCtx {
        db,
        index: &index,
        delta,
    };
    let fragments = map_roots(threads, roots.len(), |ri| {
        let (i, j) = roots[ri];
        let mut store = PatternStore::new();
        let mut stats = ClosedMiningStats::default();
        mine_root(&ctx, &pending0, i, j, &mut store, &mut stats);
        store
    });
    let mut store = PatternStore::new();
    for frag in fragments {
        store.absorb(frag);
    }
    store
}

fn mine_root(
    ctx: &MineCtx<'_>,
    pending0: &PendingPairs,
    i: usize,
    j: usize,
    store: &mut PatternStore,
    stats: &mut ClosedMiningStats,
) {
    let t = ctx.index.get(i, j).expect("root pair present");
    let before = stats.work();
    let empty = S1pMatrix::new(ctx.db.k());
    let (s1p, pending) = s1p_intersect_counted(t, pending0, &empty, ctx.index, stats);
    let forest = build_closure_forest_counted(t, &s1p, ctx.db, stats);
    let seed = Ranking::from_order(ctx.db.k(), &[i, j]).expect("distinct pair");
    let postfix = prefix_test_counted(&forest, &seed, stats);
    stats.candidates += 1;
    stats.max_candidate_work = stats.max_candidate_work.max(stats.work() - before);
    if let Some(postfix) = postfix {
        let slot = store.push(seed.clone(), t.cardinality());
        expand_closed(ctx, &seed, t, &forest, postfix, &s1p, &pending, store, slot, stats);
    }
}

/// Explore the tail extensions of `rho` (a stored generating prefix).
///
/// An extension with an unchanged transaction set shares the closure, so it
/// only needs the cheap one-step descent from `rho`'s postfix node; it also
/// proves that some superranking has equal support, so `rho` is deleted from
/// the store after all its extensions are explored. An extension with a
/// smaller transaction set gets a fresh matrix, forest, and full prefix
/// test, and is pruned together with its subtree if the test fails.
#[allow(clippy::too_many_arguments)]
fn expand_closed(
    ctx: &MineCtx<'_>,
    rho: &Ranking,
    t_rho: &TransactionSet,
    forest: &ClosureForest,
    postfix: usize,
    s1p: &S1pMatrix,
    pending: &PendingPairs,
    store: &mut PatternStore,
    rho_slot: (usize, usize),
    stats: &mut ClosedMiningStats,
) {
    let last = rho.last().expect("pattern is non-empty");
    let card_rho = t_rho.cardinality();
    let mut longer_found = false;
    for (o, t_pair) in ctx.index.row(last) {
        if rho.contains_item(o) {
            continue;
        }
        stats.and_ops += 1;
        let t_child = t_rho.and(t_pair);
        let card = t_child.cardinality();
        if card < ctx.delta {
            continue;
        }
        stats.candidates += 1;
        let child = rho.tail_extend(o).expect("o is unranked in rho");
        if card == card_rho {
            // unchanged transaction set: same closure, same forest
            longer_found = true;
            let before = stats.work();
            let curr = prefix_test_recursive_counted(&child, forest, postfix, child.len(), stats);
            stats.max_candidate_work = stats.max_candidate_work.max(stats.work() - before);
            if let Some(curr) = curr {
                let slot = store.push(child.clone(), card);
                expand_closed(ctx, &child, &t_child, forest, curr, s1p, pending, store, slot, stats);
            }
        } else {
            let before = stats.work();
            let (s1p_child, pending_child) =
                s1p_intersect_counted(&t_child, pending, s1p, ctx.index, stats);
            let child_forest = build_closure_forest_counted(&t_child, &s1p_child, ctx.db, stats);
            let curr = prefix_test_counted(&child_forest, &child, stats);
            stats.max_candidate_work = stats.max_candidate_work.max(stats.work() - before);
            if let Some(curr) = curr {
                let slot = store.push(child.clone(), card);
                expand_closed(
                    ctx,
                    &child,
                    &t_child,
                    &child_forest,
                    curr,
                    &s1p_child,
                    &pending_child,
                    store,
                    slot,
                    stats,
                );
            }
        }
    }
    if longer_found {
        let (removed, _) = store.remove(rho_slot.0, rho_slot.1);
        debug_assert_eq!(&removed, rho);
    }
}

/// Closed patterns by mining all frequent ones first and sweeping bottom-up:
/// a pattern is deleted when the next-length list holds a superranking with
/// equal support. Produces the same pattern set as [`mine_closed`].
pub fn post_tesma(db: &RankDatabase, cfg: &MiningConfig) -> PatternStore {
    closed_filter(crate::tesma::mine_frequent(db, cfg))
}

/// Parallel variant of [`post_tesma`].
pub fn post_tesma_parallel(db: &RankDatabase, cfg: &MiningConfig, threads: usize) -> PatternStore {
    closed_filter(crate::tesma::mine_frequent_parallel(db, cfg, threads))
}

/// Bottom-up closed filter over a complete frequent store.
pub fn closed_filter(store: PatternStore) -> PatternStore {
    let mut out = PatternStore::new();
    for (len, list) in store.lists() {
        let next = store.of_length(len + 1);
        for (r, s) in list {
            let absorbed = next
                .iter()
                .any(|(sup, s2)| s2 == s && r.is_subranking_of(sup));
            if !absorbed {
                out.push(r.clone(), *s);
            }
        }
    }
    out
}

//! Synthetic and semi-synthetic rank dataset generators.
//!
//! All generators are deterministic functions of their inputs and a seed;
//! the stream is a ChaCha8 generator so outputs are reproducible across
//! platforms. Adjacent-pair noise is applied as a single left-to-right sweep
//! over the order, each neighboured pair swapping independently with the
//! configured probability.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::rank::{ItemUniverse, RankDatabase, Ranking};
use crate::tesma::{mine_frequent, MiningConfig, Threshold};
use crate::{Error, Result};

/// Parameters of the basic generator and its derived dataset series.
#[derive(Clone, Copy, Debug)]
pub struct GenSpec {
    /// Dataset size N.
    pub n_rows: usize,
    /// Ranking length K (complete rankings).
    pub k: usize,
    /// Number of random core rankings.
    pub cores: usize,
    /// Adjacent-pair swap probability.
    pub swap_prob: f64,
    /// Threshold used when mining the basic dataset for the series step.
    pub threshold: Threshold,
    pub seed: u64,
}

impl GenSpec {
    fn validate(&self) -> Result<()> {
        if self.cores < 1 || self.n_rows < self.cores {
            return Err(Error::InvalidGenSpec(format!(
                "need N >= cores >= 1, got N = {}, cores = {}",
                self.n_rows, self.cores
            )));
        }
        if self.k < 2 {
            return Err(Error::InvalidGenSpec(format!("need K >= 2, got {}", self.k)));
        }
        if !(0.0..=1.0).contains(&self.swap_prob) {
            return Err(Error::InvalidGenSpec(format!(
                "swap probability must be in [0, 1], got {}",
                self.swap_prob
            )));
        }
        Ok(())
    }
}

fn swap_pass(order: &mut [usize], p: f64, rng: &mut ChaCha8Rng) {
    for i in 0..order.len().saturating_sub(1) {
        if rng.gen_bool(p) {
            order.swap(i, i + 1);
        }
    }
}

/// N complete K-rankings: `cores` random rankings, each replicated N/cores
/// times (remainder filled by cycling the cores), every replica noised by
/// one swap sweep.
pub fn gen_basic(spec: &GenSpec) -> Result<RankDatabase> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    gen_basic_with_rng(spec, &mut rng)
}

fn gen_basic_with_rng(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<RankDatabase> {
    let universe = ItemUniverse::numbered(spec.k)?;
    let cores: Vec<Vec<usize>> = (0..spec.cores)
        .map(|_| {
            let mut v: Vec<usize> = (0..spec.k).collect();
            v.shuffle(rng);
            v
        })
        .collect();
    let base = spec.n_rows / spec.cores;
    let rem = spec.n_rows % spec.cores;
    let mut rows = Vec::with_capacity(spec.n_rows);
    let emit = |core: &[usize], rng: &mut ChaCha8Rng, rows: &mut Vec<Ranking>| {
        let mut ord = core.to_vec();
        swap_pass(&mut ord, spec.swap_prob, rng);
        rows.push(Ranking::from_order(spec.k, &ord).expect("swaps keep a valid permutation"));
    };
    for core in &cores {
        for _ in 0..base {
            emit(core, rng, &mut rows);
        }
    }
    for core in cores.iter().take(rem) {
        emit(core, rng, &mut rows);
    }
    RankDatabase::new(universe, rows)
}

/// Series of datasets with a controlled number of frequent patterns: mine
/// the basic dataset at the configured threshold, then repeatedly draw a pattern
/// (shortest lengths first, each length exhausted before the next), drop
/// previously drawn rows it absorbs, and replicate the pattern rows to N
/// rows. Dataset j then holds exactly j frequent rankings when mined with a
/// threshold of 1/(N+1).
pub fn gen_increasing_frequent(
    spec: &GenSpec,
    max_datasets: Option<usize>,
) -> Result<Vec<RankDatabase>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let basic = gen_basic_with_rng(spec, &mut rng)?;
    let cfg = MiningConfig {
        threshold: spec.threshold,
    };
    let store = mine_frequent(&basic, &cfg);
    if store.is_empty() {
        return Err(Error::InvalidGenSpec(
            "basic dataset has no frequent rankings at the configured threshold".into(),
        ));
    }
    let mut by_length: Vec<Vec<Ranking>> = store
        .lists()
        .map(|(_, l)| l.iter().map(|(r, _)| r.clone()).collect())
        .collect();
    let universe = basic.universe().clone();
    let mut rows: Vec<Ranking> = Vec::new();
    let mut out = Vec::new();
    let mut li = 0;
    loop {
        while li < by_length.len() && by_length[li].is_empty() {
            li += 1;
        }
        if li == by_length.len() {
            break;
        }
        let pick = rng.gen_range(0..by_length[li].len());
        let pattern = by_length[li].remove(pick);
        rows.retain(|r| !r.is_subranking_of(&pattern));
        rows.push(pattern);
        if rows.len() > spec.n_rows {
            return Err(Error::InvalidGenSpec(format!(
                "{} pattern rows do not fit a dataset of {} rows",
                rows.len(),
                spec.n_rows
            )));
        }
        let data: Vec<Ranking> = (0..spec.n_rows).map(|i| rows[i % rows.len()].clone()).collect();
        out.push(RankDatabase::new(universe.clone(), data)?);
        if max_datasets.is_some_and(|m| out.len() >= m) {
            break;
        }
    }
    Ok(out)
}

/// Copy the database `factor` times, noising every copy's rankings with one
/// swap sweep at `p_swap`.
pub fn inflate(db: &RankDatabase, factor: usize, p_swap: f64, seed: u64) -> Result<RankDatabase> {
    if factor < 1 {
        return Err(Error::InvalidGenSpec("factor must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p_swap) {
        return Err(Error::InvalidGenSpec(format!(
            "swap probability must be in [0, 1], got {p_swap}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = db.k();
    let mut rows = Vec::with_capacity(db.n() * factor);
    for _ in 0..factor {
        for tx in db.transactions() {
            let mut ord = tx.order().to_vec();
            swap_pass(&mut ord, p_swap, &mut rng);
            rows.push(Ranking::from_order(k, &ord).expect("swaps keep a valid ranking"));
        }
    }
    RankDatabase::new(db.universe().clone(), rows)
}

/// Grow every ranking by one fresh item. Where a transaction contains the
/// anchor pair `(i, j)`, the new item lands uniformly on a position strictly
/// after `j`; elsewhere it lands uniformly anywhere. Old items keep their
/// relative order.
pub fn extend_rankings(
    db: &RankDatabase,
    anchor: (usize, usize),
    seed: u64,
) -> Result<RankDatabase> {
    let k = db.k();
    let (i, j) = anchor;
    if i >= k || j >= k || i == j {
        return Err(Error::InvalidGenSpec(format!(
            "anchor pair ({i}, {j}) is not a valid ordered item pair for K = {k}"
        )));
    }
    let mut names = db.universe().names().to_vec();
    let mut fresh = (k + 1).to_string();
    while names.contains(&fresh) {
        fresh.insert(0, 'x');
    }
    names.push(fresh);
    let universe = ItemUniverse::new(names)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(db.n());
    for tx in db.transactions() {
        let len = tx.len();
        let has_anchor = matches!(
            (tx.position_of(i), tx.position_of(j)),
            (Some(pi), Some(pj)) if pi < pj
        );
        let r_new = if has_anchor {
            let r = tx.position_of(j).expect("anchor checked");
            rng.gen_range(r + 1..=len + 1)
        } else {
            rng.gen_range(1..=len + 1)
        };
        let mut ord = tx.order().to_vec();
        ord.insert(r_new - 1, k);
        rows.push(Ranking::from_order(k + 1, &ord).expect("insertion keeps a valid ranking"));
    }
    RankDatabase::new(universe, rows)
}

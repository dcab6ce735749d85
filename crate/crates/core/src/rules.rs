//! Association rules between subrankings: scoring by confidence and
//! interest, redundancy elimination in rule consequents, and rule mining
//! over a store of frequent patterns.
//!
//! A rule `A ⇀ B` holds in a transaction containing both sides; its combined
//! support is therefore the size of the intersection of the two transaction
//! sets. An item occurring on both sides is redundant in the consequent when
//! its consequent neighbours are also antecedent items: its relative order
//! is already implied, so it can be removed without changing the set of
//! complete rankings consistent with the rule. Repeated removal yields a
//! unique redundant-free form regardless of elimination order.

use std::collections::HashSet;

use crate::io::PatternStore;
use crate::rank::{RankDatabase, Ranking};
use crate::tesma::TransactionSet;
use crate::{Error, Result};

/// An association rule between two consistent subrankings, scored on the
/// database. `support` counts transactions containing both sides; the
/// measures of a simplified rule are those of the rule it was derived from,
/// since simplification preserves the set of supporting transactions.
#[derive(Clone, Debug, PartialEq)]
pub struct RankRule {
    pub antecedent: Ranking,
    pub consequent: Ranking,
    pub support: usize,
    pub confidence: f64,
    pub interest: f64,
}

/// Thresholds and guards for rule mining.
#[derive(Clone, Copy, Debug)]
pub struct RuleConfig {
    pub min_confidence: f64,
    pub min_interest: f64,
    /// Candidate pairs with more combined items than this are skipped,
    /// bounding the quadratic pair scan.
    pub max_combined_items: usize,
    /// Optional floor on the combined absolute support of a rule.
    pub min_combo_support: Option<usize>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            min_confidence: 0.5,
            min_interest: -1.0,
            max_combined_items: 8,
            min_combo_support: None,
        }
    }
}

/// Two rankings are consistent (combine to a non-empty set) iff their shared
/// items appear in the same relative order on both sides.
pub fn consistent(a: &Ranking, b: &Ranking) -> bool {
    let shared_a: Vec<usize> = a
        .order()
        .iter()
        .copied()
        .filter(|&i| b.contains_item(i))
        .collect();
    let shared_b: Vec<usize> = b
        .order()
        .iter()
        .copied()
        .filter(|&i| a.contains_item(i))
        .collect();
    shared_a == shared_b
}

/// Number of transactions containing both patterns, by direct scan.
pub fn combo_support(db: &RankDatabase, a: &Ranking, b: &Ranking) -> usize {
    db.transactions()
        .iter()
        .filter(|t| a.is_subranking_of(t) && b.is_subranking_of(t))
        .count()
}

/// Confidence of `a ⇀ b`: combined support over the antecedent's support.
pub fn confidence(db: &RankDatabase, a: &Ranking, b: &Ranking) -> Result<f64> {
    let supp_a = crate::rank::support(db, a).absolute;
    if supp_a == 0 {
        return Err(Error::ZeroSupport);
    }
    Ok(combo_support(db, a, b) as f64 / supp_a as f64)
}

/// Interest of `a ⇀ b`: confidence minus the consequent's relative support.
pub fn interest(db: &RankDatabase, a: &Ranking, b: &Ranking) -> Result<f64> {
    let conf = confidence(db, a, b)?;
    Ok(conf - crate::rank::support(db, b).relative)
}

/// An item of the consequent is redundant iff it also occurs in the
/// antecedent and none of its immediate consequent neighbours is a
/// consequent-only item.
pub fn is_redundant_item(rule: &RankRule, item: usize) -> Result<bool> {
    redundant_in(&rule.antecedent, &rule.consequent, item)
}

fn redundant_in(antecedent: &Ranking, consequent: &Ranking, item: usize) -> Result<bool> {
    let pos = consequent
        .position_of(item)
        .ok_or(Error::ItemNotInConsequent(item))?;
    if !antecedent.contains_item(item) {
        return Ok(false);
    }
    let ord = consequent.order();
    let mut neighbours = Vec::with_capacity(2);
    if pos >= 2 {
        neighbours.push(ord[pos - 2]);
    }
    if pos < ord.len() {
        neighbours.push(ord[pos]);
    }
    Ok(neighbours.iter().all(|&n| antecedent.contains_item(n)))
}

/// Remove redundant items from the consequent until none remain. The result
/// is unique regardless of elimination order; measures carry over unchanged
/// because the supporting transaction set does not move.
pub fn simplify_rule(rule: &RankRule) -> RankRule {
    let mut consequent = rule.consequent.clone();
    loop {
        let target = consequent
            .order()
            .iter()
            .copied()
            .find(|&i| redundant_in(&rule.antecedent, &consequent, i).unwrap_or(false));
        match target {
            Some(i) => {
                let keep: Vec<usize> = consequent
                    .order()
                    .iter()
                    .copied()
                    .filter(|&x| x != i)
                    .collect();
                consequent = consequent.restrict(&keep).expect("kept items are ranked");
            }
            None => break,
        }
    }
    RankRule {
        antecedent: rule.antecedent.clone(),
        consequent,
        support: rule.support,
        confidence: rule.confidence,
        interest: rule.interest,
    }
}

/// Mine simplified rules between stored frequent patterns.
///
/// Both sides range over the store (a high-support rule cannot have an
/// infrequent side, since the combined support is bounded by either side's
/// support). Candidates must be consistent and non-trivial (the consequent
/// adds at least one item); combined support comes from a bit-vector
/// intersection. Surviving rules are simplified, deduplicated on their
/// redundant-free form, and sorted by descending interest with a
/// lexicographic tie-break.
pub fn mine_rules(db: &RankDatabase, store: &PatternStore, cfg: &RuleConfig) -> Vec<RankRule> {
    let n = db.n();
    let patterns: Vec<(&Ranking, usize)> = store.iter().collect();
    let closures: Vec<TransactionSet> = patterns
        .iter()
        .map(|(r, _)| {
            let mut t = TransactionSet::empty(n);
            for (ti, tx) in db.transactions().iter().enumerate() {
                if r.is_subranking_of(tx) {
                    t.insert(ti);
                }
            }
            t
        })
        .collect();

    let mut rules = Vec::new();
    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
    for (ai, &(ra, sa)) in patterns.iter().enumerate() {
        for (bi, &(rb, sb)) in patterns.iter().enumerate() {
            if ai == bi || ra.len() + rb.len() > cfg.max_combined_items {
                continue;
            }
            // non-trivial: the consequent must rank an item the antecedent lacks
            if rb.order().iter().all(|&i| ra.contains_item(i)) {
                continue;
            }
            if !consistent(ra, rb) {
                continue;
            }
            let combo = closures[ai].and_cardinality(&closures[bi]);
            if cfg.min_combo_support.is_some_and(|f| combo < f) {
                continue;
            }
            let conf = combo as f64 / sa as f64;
            if conf < cfg.min_confidence {
                continue;
            }
            let inter = conf - sb as f64 / n as f64;
            if inter < cfg.min_interest {
                continue;
            }
            let rule = simplify_rule(&RankRule {
                antecedent: ra.clone(),
                consequent: rb.clone(),
                support: combo,
                confidence: conf,
                interest: inter,
            });
            let key = (
                rule.antecedent.order().to_vec(),
                rule.consequent.order().to_vec(),
            );
            if seen.insert(key) {
                rules.push(rule);
            }
        }
    }
    rules.sort_by(|a, b| {
        b.interest
            .total_cmp(&a.interest)
            .then_with(|| a.antecedent.order().cmp(b.antecedent.order()))
            .then_with(|| a.consequent.order().cmp(b.consequent.order()))
    });
    rules
}

/// Rule TSV: `antecedent \t consequent \t support \t confidence \t interest`
/// with orders rendered as `a>b>c` and fractions to six decimals.
pub fn write_rules(universe: &crate::rank::ItemUniverse, rules: &[RankRule]) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&crate::io::render_order(universe, &r.antecedent));
        out.push('\t');
        out.push_str(&crate::io::render_order(universe, &r.consequent));
        out.push_str(&format!(
            "\t{}\t{:.6}\t{:.6}\n",
            r.support, r.confidence, r.interest
        ));
    }
    out
}

/// Complete rankings consistent with the rule (intersection of the two
/// extension sets, by brute enumeration). Test support for small universes.
pub fn consistent_extensions(
    a: &Ranking,
    b: &Ranking,
    limits: &crate::oracle::OracleLimits,
) -> Result<Vec<Ranking>> {
    let ea = crate::oracle::linear_extensions(a, limits)?;
    Ok(ea
        .into_iter()
        .filter(|x| b.is_subranking_of(x))
        .collect())
}

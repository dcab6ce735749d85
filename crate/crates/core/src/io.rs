//! Parsing and serialization of rank databases and mined pattern sets.
//!
//! Two input formats are supported:
//!
//! * matrix files: one transaction per line, whitespace-separated positions
//!   per item column, `?` or `0` for unranked, optional `#items a b c ...`
//!   header naming the columns;
//! * order files: one transaction per line as `a>b>c`, optional `#items`
//!   header pinning the universe.
//!
//! Pattern output is a TSV with one `order \t absolute \t relative` line per
//! pattern, grouped by ascending pattern length.

use crate::rank::{ItemUniverse, RankDatabase, Ranking};
use crate::{Error, Result};

/// Mined patterns with their absolute supports, kept in per-length lists.
///
/// List `k` holds the rankings of length `k + 2` in discovery order; the
/// depth-first miners produce lists in which rankings sharing a prefix are
/// contiguous, which the closed-pattern postprocessing relies on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternStore {
    by_length: Vec<Vec<(Ranking, usize)>>,
}

impl PatternStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a pattern with its absolute support; returns (length, slot)
    /// so depth-first miners can delete the entry again.
    pub fn push(&mut self, pattern: Ranking, support: usize) -> (usize, usize) {
        assert!(pattern.is_pattern(), "patterns have length >= 2");
        let len = pattern.len();
        while self.by_length.len() < len - 1 {
            self.by_length.push(Vec::new());
        }
        let list = &mut self.by_length[len - 2];
        list.push((pattern, support));
        (len, list.len() - 1)
    }

    pub(crate) fn remove(&mut self, len: usize, slot: usize) -> (Ranking, usize) {
        self.by_length[len - 2].remove(slot)
    }

    /// Patterns of the given length, in discovery order.
    pub fn of_length(&self, len: usize) -> &[(Ranking, usize)] {
        if len < 2 || len - 2 >= self.by_length.len() {
            &[]
        } else {
            &self.by_length[len - 2]
        }
    }

    /// Longest pattern length present (0 when empty).
    pub fn max_length(&self) -> usize {
        let mut max = 0;
        for (i, l) in self.by_length.iter().enumerate() {
            if !l.is_empty() {
                max = i + 2;
            }
        }
        max
    }

    /// (length, patterns) for every non-empty list, ascending.
    pub fn lists(&self) -> impl Iterator<Item = (usize, &[(Ranking, usize)])> {
        self.by_length
            .iter()
            .enumerate()
            .map(|(i, l)| (i + 2, l.as_slice()))
            .filter(|(_, l)| !l.is_empty())
    }

    /// All patterns, ascending length, discovery order within a length.
    pub fn iter(&self) -> impl Iterator<Item = (&Ranking, usize)> {
        self.by_length
            .iter()
            .flat_map(|l| l.iter().map(|(r, s)| (r, *s)))
    }

    pub fn total(&self) -> usize {
        self.by_length.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Append all of `other`'s lists after ours, lengthwise. Used to merge
    /// per-root fragments in root order, which reproduces the sequential
    /// discovery order.
    pub(crate) fn absorb(&mut self, other: PatternStore) {
        for (i, list) in other.by_length.into_iter().enumerate() {
            while self.by_length.len() <= i {
                self.by_length.push(Vec::new());
            }
            self.by_length[i].extend(list);
        }
    }
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header_universe(line: &str, lineno: usize) -> Result<Option<ItemUniverse>> {
    if let Some(rest) = line.strip_prefix("#items") {
        let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        let u = ItemUniverse::new(names).map_err(|e| parse_error(lineno, e.to_string()))?;
        return Ok(Some(u));
    }
    Ok(None)
}

/// Parse a position-matrix database. `?` and `0` both mean unranked. When no
/// universe is given and the file carries no `#items` header, the column
/// count defines `K` and items are named `"1"`..`"K"`.
pub fn parse_rank_matrix(text: &str, universe: Option<ItemUniverse>) -> Result<RankDatabase> {
    let mut uni = universe;
    let mut k = uni.as_ref().map(|u| u.k());
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            // a header counts only before the first data row
            if uni.is_none() && rows.is_empty() {
                if let Some(u) = header_universe(line, lineno)? {
                    k = Some(u.k());
                    uni = Some(u);
                }
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let k = *k.get_or_insert(toks.len());
        if toks.len() != k {
            return Err(parse_error(
                lineno,
                format!("expected {k} columns, found {}", toks.len()),
            ));
        }
        let mut positions = Vec::with_capacity(k);
        for t in &toks {
            if *t == "?" {
                positions.push(0);
            } else {
                let p: usize = t
                    .parse()
                    .map_err(|_| parse_error(lineno, format!("invalid entry `{t}`")))?;
                positions.push(p);
            }
        }
        let r = Ranking::from_positions(positions).map_err(|e| parse_error(lineno, e.to_string()))?;
        if !r.is_pattern() {
            return Err(parse_error(
                lineno,
                format!("transaction ranks {} item(s); at least 2 required", r.len()),
            ));
        }
        rows.push(r);
    }
    let k = k.ok_or_else(|| Error::InvalidDatabase("no data rows".into()))?;
    let uni = match uni {
        Some(u) => u,
        None => ItemUniverse::numbered(k)?,
    };
    RankDatabase::new(uni, rows)
}

/// Parse a `>`-separated order-list database. Without an explicit universe or
/// `#items` header, items are indexed by first appearance.
pub fn parse_order_list(text: &str, universe: Option<ItemUniverse>) -> Result<RankDatabase> {
    let mut uni = universe;
    if uni.is_none() {
        // a header may pin the universe; otherwise names are collected by
        // first appearance while the rows parse
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if let Some(u) = header_universe(line, i + 1)? {
                    uni = Some(u);
                }
                continue;
            }
            break;
        }
    }
    let mut names: Vec<String> = Vec::new();
    let mut name_index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    // orders by provisional index; turned into rankings once K is known
    let mut raw_rows: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut order = Vec::new();
        for name in line.split('>') {
            let name = name.trim();
            if name.is_empty() {
                return Err(parse_error(lineno, "empty item name"));
            }
            let idx = match &uni {
                Some(u) => u
                    .index_of(name)
                    .ok_or_else(|| parse_error(lineno, format!("unknown item `{name}`")))?,
                None => *name_index.entry(name.to_string()).or_insert_with(|| {
                    names.push(name.to_string());
                    names.len() - 1
                }),
            };
            if order.contains(&idx) {
                return Err(parse_error(lineno, format!("item `{name}` listed twice")));
            }
            order.push(idx);
        }
        if order.len() < 2 {
            return Err(parse_error(
                lineno,
                format!("transaction ranks {} item(s); at least 2 required", order.len()),
            ));
        }
        raw_rows.push((lineno, order));
    }
    let uni = match uni {
        Some(u) => u,
        None => ItemUniverse::new(names)
            .map_err(|e| Error::InvalidDatabase(format!("cannot infer universe: {e}")))?,
    };
    let mut rows = Vec::with_capacity(raw_rows.len());
    for (lineno, order) in raw_rows {
        let r = Ranking::from_order(uni.k(), &order)
            .map_err(|e| parse_error(lineno, e.to_string()))?;
        rows.push(r);
    }
    RankDatabase::new(uni, rows)
}

/// Render an order as `a>b>c` with universe item names.
pub fn render_order(universe: &ItemUniverse, r: &Ranking) -> String {
    r.order()
        .iter()
        .map(|&i| universe.name(i))
        .collect::<Vec<_>>()
        .join(">")
}

/// Pattern TSV: `order \t absolute \t relative` per line, grouped by
/// ascending length. Relative support is derived from the absolute count.
pub fn write_patterns(universe: &ItemUniverse, store: &PatternStore, n: usize) -> String {
    let mut out = String::new();
    for (_, list) in store.lists() {
        for (r, s) in list {
            out.push_str(&render_order(universe, r));
            out.push('\t');
            out.push_str(&s.to_string());
            out.push('\t');
            out.push_str(&format!("{:.6}", *s as f64 / n as f64));
            out.push('\n');
        }
    }
    out
}

/// Matrix serialization with a `#items` header; unranked entries become `?`.
pub fn write_rank_matrix(db: &RankDatabase) -> String {
    let mut out = String::from("#items ");
    out.push_str(&db.universe().names().join(" "));
    out.push('\n');
    for t in db.transactions() {
        let row: Vec<String> = t
            .positions()
            .iter()
            .map(|&p| {
                if p == 0 {
                    "?".to_string()
                } else {
                    p.to_string()
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Order-list serialization with a `#items` header.
pub fn write_order_list(db: &RankDatabase) -> String {
    let mut out = String::from("#items ");
    out.push_str(&db.universe().names().join(" "));
    out.push('\n');
    for t in db.transactions() {
        out.push_str(&render_order(db.universe(), t));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_row_with_question_marks() {
        let db = parse_rank_matrix("2 ? ? 3 ? ? ? 1 ? ?\n5 7 3 8 4 10 2 1 6 9\n", None).unwrap();
        assert_eq!(db.k(), 10);
        let t = db.transaction(0);
        assert_eq!(t.len(), 3);
        // ranked items o1, o4, o8 in order (o8, o1, o4)
        assert_eq!(t.order(), &[7, 0, 3]);
        assert_eq!(db.transaction(1).len(), 10);
    }

    #[test]
    fn matrix_zero_means_unranked() {
        let a = parse_rank_matrix("2 0 0 3 0 0 0 1 0 0\n1 2 3 4 5 6 7 8 9 10\n", None).unwrap();
        let b = parse_rank_matrix("2 ? ? 3 ? ? ? 1 ? ?\n1 2 3 4 5 6 7 8 9 10\n", None).unwrap();
        assert_eq!(a.transaction(0), b.transaction(0));
    }

    #[test]
    fn matrix_errors_name_the_row() {
        let err = parse_rank_matrix("1 2 3\n1 1 2\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_rank_matrix("1 2 3\n1 2\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        // gap: nonzero positions must be {1..k}
        let err = parse_rank_matrix("1 ? 3\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn matrix_rejects_single_item_rows() {
        let err = parse_rank_matrix("1 ? ?\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn order_list_basic() {
        let db = parse_order_list("a>b>e>c>d\n\na>d>b>c>e\n", None).unwrap();
        assert_eq!(db.n(), 2); // empty line skipped
        assert_eq!(db.universe().name(0), "a");
        assert_eq!(
            render_order(db.universe(), db.transaction(0)),
            "a>b>e>c>d"
        );
    }

    #[test]
    fn order_list_duplicate_item_fails() {
        let err = parse_order_list("a>a\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn order_list_unknown_item_fails_with_explicit_universe() {
        let u = ItemUniverse::new(vec!["a".into(), "b".into()]).unwrap();
        let err = parse_order_list("a>z\n", Some(u)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn formats_agree_on_equivalent_input() {
        let m = parse_rank_matrix("#items a b c\n1 2 3\n3 1 2\n? 1 2\n", None).unwrap();
        let o = parse_order_list("#items a b c\na>b>c\nb>c>a\nb>c\n", None).unwrap();
        assert_eq!(m.universe(), o.universe());
        assert_eq!(m.transactions(), o.transactions());
    }

    #[test]
    fn round_trips() {
        let db = parse_order_list("#items a b c d e\na>b>e>c>d\nc>a>b\nd>e\n", None).unwrap();
        let back = parse_rank_matrix(&write_rank_matrix(&db), None).unwrap();
        assert_eq!(db.universe(), back.universe());
        assert_eq!(db.transactions(), back.transactions());
        let back = parse_order_list(&write_order_list(&db), None).unwrap();
        assert_eq!(db.universe(), back.universe());
        assert_eq!(db.transactions(), back.transactions());
    }

    #[test]
    fn pattern_tsv_formatting() {
        let u = ItemUniverse::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let mut store = PatternStore::new();
        store.push(Ranking::from_order(3, &[0, 1, 2]).unwrap(), 2);
        assert_eq!(write_patterns(&u, &store, 4), "a>b>c\t2\t0.500000\n");
        assert_eq!(write_patterns(&u, &PatternStore::new(), 4), "");
    }

    #[test]
    fn pattern_tsv_lists_the_example_pairs_first() {
        let db = parse_order_list(
            "#items a b c d e\na>b>e>c>d\na>d>b>c>e\nc>a>b>e>d\nb>a>d>c>e\n",
            None,
        )
        .unwrap();
        let cfg = crate::tesma::MiningConfig::absolute(2).unwrap();
        let store = crate::tesma::mine_frequent(&db, &cfg);
        let tsv = write_patterns(db.universe(), &store, db.n());
        let pair_lines: Vec<&str> = tsv
            .lines()
            .filter(|l| l.split('\t').next().unwrap().split('>').count() == 2)
            .collect();
        assert_eq!(
            pair_lines,
            vec![
                "a>b\t3\t0.750000",
                "a>c\t3\t0.750000",
                "a>d\t4\t1.000000",
                "a>e\t4\t1.000000",
                "b>c\t3\t0.750000",
                "b>d\t3\t0.750000",
                "b>e\t4\t1.000000",
                "c>d\t2\t0.500000",
                "c>e\t3\t0.750000",
                "d>c\t2\t0.500000",
                "d>e\t2\t0.500000",
                "e>d\t2\t0.500000",
            ]
        );
        // grouped by ascending length: all pairs precede longer patterns
        let first_triple = tsv
            .lines()
            .position(|l| l.split('\t').next().unwrap().split('>').count() > 2)
            .unwrap();
        assert_eq!(first_triple, 12);
    }

    #[test]
    fn store_groups_by_length() {
        let mut store = PatternStore::new();
        let r3 = Ranking::from_order(4, &[0, 1, 2]).unwrap();
        let r2 = Ranking::from_order(4, &[0, 1]).unwrap();
        store.push(r3.clone(), 1);
        store.push(r2.clone(), 2);
        assert_eq!(store.of_length(2), &[(r2, 2)]);
        assert_eq!(store.of_length(3), &[(r3, 1)]);
        assert_eq!(store.max_length(), 3);
        assert_eq!(store.total(), 2);
    }
}

//! Pattern mining for rank data.
//!
//! A transaction here is a (possibly incomplete) ranking: a total order over
//! a subset of a fixed item universe. This crate mines such databases for
//!
//! * frequent subrankings (depth-first tail-extension search over a vertical
//!   bit-vector database, module [`tesma`]),
//! * closed subrankings (prefix-generator search with pairwise-preference
//!   closures, module [`gpminer`]),
//! * association rules between subrankings with confidence and interest
//!   scores (module [`rules`]).
//!
//! Supporting pieces: domain types ([`rank`]), file formats and pattern
//! stores ([`io`]), synthetic dataset generators ([`datagen`]) and slow
//! brute-force reference implementations used for testing ([`oracle`]).

pub mod datagen;
pub mod gpminer;
pub mod io;
pub mod oracle;
mod par;
pub mod rank;
pub mod rules;
pub mod tesma;

pub use io::PatternStore;
pub use rank::{oplus, support, ItemUniverse, RankDatabase, Ranking, Support};
pub use tesma::{MiningConfig, PairIndex, Threshold, TransactionSet};

/// Errors produced by parsing, validation, and the brute-force oracles.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid universe: {0}")]
    InvalidUniverse(String),
    #[error("invalid ranking: {0}")]
    InvalidRanking(String),
    #[error("invalid database: {0}")]
    InvalidDatabase(String),
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),
    #[error("item {0} is not ranked")]
    ItemNotRanked(usize),
    #[error("item {0} is already ranked")]
    DuplicateItem(usize),
    #[error("item {0} does not occur in the rule consequent")]
    ItemNotInConsequent(usize),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("pattern has zero support")]
    ZeroSupport,
    #[error("empty transaction set")]
    EmptyTransactionSet,
    #[error("oracle limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("invalid generator spec: {0}")]
    InvalidGenSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

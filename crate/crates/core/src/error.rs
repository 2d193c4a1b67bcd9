use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet of {symbols} symbols does not fit into {states} states")]
    AlphabetTooLarge { symbols: usize, states: usize },

    #[error("invalid table exponent R={0}")]
    InvalidExponent(u32),

    #[error("spread does not match distribution: {0}")]
    SpreadMismatch(String),

    #[error("invalid spread: {0}")]
    InvalidSpread(String),

    #[error("symbol index {0} outside the alphabet")]
    UnknownSymbol(usize),

    #[error("unknown symbol name {0:?}")]
    UnknownSymbolName(String),

    #[error("state {0} outside the state set")]
    StateOutOfRange(u64),

    #[error("payload exhausted after {decoded} of {expected} symbols")]
    PayloadExhausted { decoded: u64, expected: u64 },

    #[error("{0} trailing payload bits left after decoding")]
    TrailingBits(u64),

    #[error("singular transition system (no unique stationary distribution)")]
    SingularSystem,

    #[error("exact arithmetic unavailable: {0}")]
    ExactUnavailable(String),

    #[error("search space of {count} spreads exceeds the cap {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("no feasible count vector sums to L={0}")]
    NoFeasibleCounts(u32),

    #[error("preferred state undefined for interval starting at r={0}")]
    PreferredStateDomain(u64),

    #[error(
        "cardinality mismatch for symbol {symbol}: {states} states vs {prefs} preferred positions"
    )]
    CardinalityMismatch {
        symbol: usize,
        states: usize,
        prefs: usize,
    },

    #[error("swap of states {0} and {1} holding the same symbol")]
    SameSymbolSwap(u32, u32),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("every candidate evaluation was singular")]
    AllCandidatesSingular,

    #[error("invalid key: expected 32 bytes, got {0}")]
    InvalidKey(usize),

    #[error("frame checksum mismatch: expected {expected:08x}, got {actual:08x}")]
    ChecksumMismatch { expected: u32, actual: u32 },

    #[error("malformed input: {0}")]
    Parse(String),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("client {client}: packet {packet} is outside 1..={num_packets}")]
    PacketOutOfRange {
        client: usize,
        packet: usize,
        num_packets: usize,
    },

    #[error("packets {0:?} are not held by any client")]
    Uncovered(Vec<usize>),

    #[error("duplicate has-line for client {0}")]
    DuplicateClient(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("sum-rate {alpha} is below the minimum sum-rate {min_sum_rate}")]
    InfeasibleBudget { alpha: u32, min_sum_rate: u32 },

    #[error("no strategy with sum-rate {alpha} achieves universal recovery")]
    EmptyRegion { alpha: u32 },

    #[error("rate vector {rates} does not achieve universal recovery at sum-rate {alpha}")]
    InfeasibleRates { rates: String, alpha: u32 },

    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error("malformed region: {0}")]
    MalformedRegion(String),

    #[error("objective is infinite on every member of the region")]
    AllInfinite,

    #[error("field size {0} is not a prime")]
    NotPrime(u64),
}

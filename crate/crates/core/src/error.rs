use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no nodes")]
    Empty,
    #[error("duplicate node label `{0}`")]
    DuplicateNode(String),
    #[error("edge references unknown node label `{0}`")]
    UnknownNodeLabel(String),
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("graph has a directed cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmpError {
    #[error("node index {0} is outside the network")]
    UnknownNode(usize),
    #[error("excitation or measurement set is empty")]
    EmptySelection,
    #[error("cannot parse EMP `{text}`: {reason}")]
    Parse { text: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("({0}, {1}) is not below the diagonal")]
    NotLowerTriangular(usize, usize),
    #[error("({0}, {1}) is an edge, not a structural zero")]
    NotAStructuralZero(usize, usize),
    #[error("no chain connects node {1} to node {0}; T[{0},{1}] vanishes identically")]
    NoChainExists(usize, usize),
    #[error("matrix dimension mismatch")]
    DimensionMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("no addition resolves {0}")]
    SynthesisFailed(String),
    #[error("synthesized EMP {emp} rejected by the {method} oracle")]
    Unverified { emp: String, method: String },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Emp(#[from] EmpError),
    #[error("network has {n} nodes, above the enumeration limit of {limit}; raise the limit explicitly")]
    TooLarge { n: usize, limit: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("{method} oracle trials disagree after a re-draw (seed {seed})")]
    Disagreement { method: String, seed: u64 },
    #[error("reconstruction produced a value different from the hidden truth for G[{0},{1}]")]
    WrongRecovery(usize, usize),
}

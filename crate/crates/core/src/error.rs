use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Pipeline stage of [`crate::msd::detect`] that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    ExtendedNetwork,
    Clustering,
    Membership,
    Ages,
    Labels,
    Propagation,
    Identification,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::ExtendedNetwork => "extended network",
            Stage::Clustering => "clustering",
            Stage::Membership => "membership",
            Stage::Ages => "node ages",
            Stage::Labels => "label initialization",
            Stage::Propagation => "label propagation",
            Stage::Identification => "source identification",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty input: no nodes")]
    EmptyInput,
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("empty infection snapshot")]
    EmptyInfection,
    #[error("density undefined for a graph with {nodes} node(s)")]
    DensityUndefined { nodes: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("requested {requested} seeds but only {available} non-isolated nodes exist")]
    NotEnoughCandidates { requested: usize, available: usize },
    #[error("edges {0} and {1} do not share exactly one endpoint")]
    NotAdjacentEdges(usize, usize),
    #[error("no infected edges")]
    NoInfectedEdges,
    #[error("all edges noise; lower min_cluster_size")]
    AllEdgesNoise,
    #[error("graph has no edges")]
    EdgelessGraph,
    #[error(
        "eigen-iteration did not converge on a group of {size} nodes after {iterations} iterations"
    )]
    EigenNoConvergence { size: usize, iterations: usize },
    #[error(
        "infected node {0} is isolated in the full network; exclude isolated nodes from seeding"
    )]
    IsolatedInfected(String),
    #[error("no communities detected")]
    NoCommunities,
    #[error(
        "label propagation did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },
    #[error("linear solve residual {residual:e} above tolerance")]
    SolverResidual { residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no identifiable sources")]
    NoIdentifiableSources,
    #[error("ground-truth source set is empty")]
    EmptyTruth,
    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Stage that failed, when the error came out of the detection pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("top-degree form has no exterior derivative")]
    TopDegree,

    #[error("wedge degree {0} exceeds dimension {1}")]
    WedgeDegree(usize, usize),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("query outside chart")]
    OutsideChart,

    #[error("not an immersion at node {0}")]
    NotImmersion(usize),

    #[error("metric not positive definite at node {0}")]
    NotPositiveDefinite(usize),

    #[error("Pfaffian requires even dimension (got {0})")]
    OddDimension(usize),

    #[error("unsupported dimension {0}: {1}")]
    UnsupportedDimension(usize, &'static str),

    #[error("pipeline stage missing: {0}")]
    MissingStage(&'static str),

    #[error("non-unit normal field (deviation {0:.3e})")]
    NonUnitNormal(f64),

    #[error("index {0} out of range (expected < {1})")]
    IndexOutOfRange(usize, usize),

    #[error("degenerate calibration fixture")]
    DegenerateCalibration,

    #[error("target not admissible (clearance {0:.3e})")]
    TargetNotAdmissible(f64),

    #[error("parts {0} and {1} overlap")]
    OverlappingParts(usize, usize),

    #[error("region thinner than resolution")]
    RegionTooThin,

    #[error("too few populated generations ({0}) for a census fit")]
    SparseCensus(usize),

    #[error("integral not certified: census slope {slope:.3} >= {limit:.3}")]
    NotCertified { slope: f64, limit: f64 },

    #[error("cube outside evaluator domain")]
    CubeOutsideDomain,

    #[error("kernel under-resolved (eps {eps:.3e} < 2h = {two_h:.3e})")]
    KernelUnderResolved { eps: f64, two_h: f64 },

    #[error("amplitude too large: perturbed map is not an immersion")]
    AmplitudeTooLarge,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

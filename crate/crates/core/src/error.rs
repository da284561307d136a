use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("form arity mismatch: {left} vs {right} parameters")]
    ArityMismatch { left: usize, right: usize },
    #[error("jet order insufficient: need {needed}, have {available}")]
    JetOrderInsufficient { needed: usize, available: usize },
    #[error("degenerate (isotropic) induced metric at ({u}, {v}): |x_u × x_v|² = {area_sq:e}")]
    DegenerateMetric { u: f64, v: f64, area_sq: f64 },
    #[error("square root on the branch cut at ({u}, {v})")]
    BranchCut { u: f64, v: f64 },
    #[error("pair is not isometric: first fundamental forms differ by {deviation:e}")]
    IsometryViolation { deviation: f64 },
    #[error("non-generic configuration: {0}")]
    NonGeneric(String),
    #[error("degenerate Pfaffian: denominator {denominator:e} below tolerance")]
    DegeneratePfaffian { denominator: f64 },
    #[error("offset V is not tangent to the seed: |N0·V| = {normal_part:e}")]
    NotTangent { normal_part: f64 },
    #[error("ill-conditioned extraction: condition estimate {condition:e}")]
    IllConditioned { condition: f64 },
    #[error("probe-system factorization inaccurate: recomposition error {error:e}")]
    FactorizationFailed { error: f64 },
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),
    #[error("contact normal has vanishing seed-normal component: |mᵀN0| = {value:e}")]
    NormalComponentVanishes { value: f64 },
    #[error("leaf area form vanishes: |N0ᵀ[d(V+x0) ×∧ d(V+x0)]| = {value:e}")]
    LeafAreaVanishes { value: f64 },
    #[error("invalid fixture: {0}")]
    InvalidFixture(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator {generator} is not applicable to {object}")]
    NotApplicable { generator: String, object: String },

    #[error("object {0} does not belong to the poset context")]
    ObjectOutsideContext(String),

    #[error("objects {left} and {right} live over different contexts")]
    MixedContext { left: String, right: String },

    #[error("no arrow from {source_obj} to {target}")]
    NoArrow { source_obj: String, target: String },

    #[error("invalid poset context: {0}")]
    InvalidContext(String),

    #[error("index is not a poset: {0}")]
    NotAPoset(String),

    #[error("diagram is not functorial: {0}")]
    NotFunctorial(String),

    #[error("legs do not form a cocone: {0}")]
    NotACocone(String),

    #[error("invalid flow: {0}")]
    InvalidFlow(String),

    #[error("invalid flow map: {0}")]
    InvalidFlowMap(String),

    #[error("invalid globe attachment: {0}")]
    InvalidAttachment(String),

    #[error("instance is not loop-free and no word-length cap was given")]
    NotLoopFreeAndNoCap,

    #[error("instance is not loop-free")]
    NotLoopFree,

    #[error("word cap {cap} is too small: {witness}")]
    CapTooSmallToClose { cap: usize, witness: String },

    #[error("flow map is not injective on paths: {0}")]
    NotInjective(String),

    #[error("path endpoints do not match: {0}")]
    EndpointsMismatch(String),

    #[error("path is not parametrized by [0,1]: {0}")]
    NotUnitDuration(String),

    #[error("invalid piecewise-linear data: {0}")]
    InvalidPiecewiseLinear(String),

    #[error("parse error: {0}")]
    Parse(String),
}

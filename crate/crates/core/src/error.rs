use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coordinate {q} lies outside the potential domain ({lo}, {hi})")]
    Domain { q: f64, lo: f64, hi: f64 },

    #[error("energy {energy} is below the potential floor on the search interval")]
    EnergyBelowFloor { energy: f64 },

    #[error("degenerate turning points near q = {q} (energy at a barrier top)")]
    DegenerateTurningPoints { q: f64 },

    #[error("allowed region at energy {energy} reaches the search boundary {q}")]
    UnboundedCut { energy: f64, q: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e} with {order} nodes")]
    QuadratureFailure { achieved: f64, order: usize },

    #[error("phase requested across regions of different kind between {reference} and {q}")]
    MixedRegionPhase { reference: f64, q: f64 },

    #[error("level {level} straddles a topology change of the allowed region near E = {energy}")]
    StraddlesTopologyChange { level: u32, energy: f64 },

    #[error("no bracket for level {level} below E_max = {e_max}")]
    UnboundedSearch { level: u32, e_max: f64 },

    #[error("level {level} did not converge: residual {residual:e} exceeds tolerance {tol:e}")]
    NotConverged { level: u32, residual: f64, tol: f64 },

    #[error("level {level}: {source}")]
    Level {
        level: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("separation constants invalid: |P_phi| = {p_phi} exceeds P_theta = {p_theta}")]
    Separation { p_theta: f64, p_phi: f64 },

    #[error("no radial libration: J_r = {j_r} < 0")]
    NoRadialLibration { j_r: f64 },

    #[error("finite-difference grid too small: mass {mass:e} near the boundary for eigenvalue {index}")]
    GridTooSmall { index: usize, mass: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("cannot parse potential '{input}': {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn at_level(self, level: u32) -> Error {
        match self {
            e @ (Error::Level { .. }
            | Error::StraddlesTopologyChange { .. }
            | Error::UnboundedSearch { .. }
            | Error::NotConverged { .. }) => e,
            e => Error::Level {
                level,
                source: Box::new(e),
            },
        }
    }
}

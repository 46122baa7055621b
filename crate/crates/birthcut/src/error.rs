use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("quadrature did not converge with {nodes} nodes (last estimates {prev:e}, {last:e})")]
    NonConvergence { nodes: usize, prev: f64, last: f64 },

    #[error("pole {pole} is not strictly inside the interval")]
    PoleOnBoundary { pole: f64 },

    #[error("no sign change on [{lo}, {hi}] (f = {flo:e}, {fhi:e})")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not one-cut for this (V, t): density factor is {value:e} at x = {x}")]
    NotOneCut { x: f64, value: f64 },

    #[error("endpoint system failed to converge: {0}")]
    EndpointSolve(String),

    #[error("no critical point: max of the effective potential is {max:e} at x = {x}")]
    NoCriticalPoint { x: f64, max: f64 },

    #[error("vanishing order ambiguous: fitted slope {slope}")]
    AmbiguousOrder { slope: f64 },

    #[error("synthesis failed; widen Q degree ({0})")]
    SynthesisFailed(String),

    #[error("precision exhausted at degree {degree}; raise bits ({reason})")]
    PrecisionExhausted { degree: usize, reason: String },

    #[error("too close to the real axis (|Im z| = {im:e}); use boundary-value mode")]
    TooCloseToAxis { im: f64 },

    #[error("radius {radius} too large for the conformal map (limit {limit}); shrink the disk")]
    RadiusTooLarge { radius: f64, limit: f64 },

    #[error("point {x} lies on an open cut; a side must be given")]
    OnCut { x: f64 },

    #[error("logarithmic singularity at x = {x}")]
    Singular { x: f64 },

    #[error("u = {u} is within 0.1 of a half-integer")]
    HalfInteger { u: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

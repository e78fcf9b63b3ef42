use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input lies outside the mathematical domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The implicit-function solver could not certify a root to the required
    /// residual. Carries the last bracket so the caller can diagnose or retry.
    #[error(
        "root solver stalled after {iterations} iterations \
         (bracket [{lo:e}, {hi:e}], residual {residual:e})"
    )]
    Solver {
        iterations: u32,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    /// Heat-kernel standard deviation fell below two grid steps, so the
    /// discrete convolution cannot resolve it.
    #[error("heat kernel under-resolved: std dev {sigma:e} < 2 grid steps of {step:e}")]
    UnderResolved { sigma: f64, step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

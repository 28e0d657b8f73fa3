use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(
        "search budget exceeded: (N_beam)^(N_RF) = {n_beam}^{n_rf} = {required} candidate sets, budget is {budget}"
    )]
    SearchBudget {
        n_beam: usize,
        n_rf: usize,
        required: u128,
        budget: u128,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

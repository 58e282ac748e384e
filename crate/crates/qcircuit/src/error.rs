use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("qubit count {0} outside the supported range 1..=8")]
    QubitCount(usize),
    #[error("angle vector has {got} entries, circuit expects {expected}")]
    AngleCount { got: usize, expected: usize },
    #[error("upstream gradient has {got} entries, circuit reads out {expected} qubits")]
    UpstreamLength { got: usize, expected: usize },
    #[error("amplitude vector length {0} is not a power of two in 2..=256")]
    AmplitudeLength(usize),
    #[error("state norm^2 is {0}, not 1")]
    NotNormalized(f64),
    #[error("states have different qubit counts: {0} vs {1}")]
    QubitMismatch(usize, usize),
}

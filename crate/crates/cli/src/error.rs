use pairdiff_core::hilbert::HilbertError;
use pairdiff_core::reliability::BinError;
use pairdiff_core::sample::SampleError;
use pairdiff_core::synth::SynthError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("no usable rows in input")]
    EmptyInput,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Bin(#[from] BinError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
}

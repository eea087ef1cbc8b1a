//! Discrete time-frequency analysis on a one-dimensional grid: short-time
//! Fourier transforms, Gabor frames, tau-Wigner distributions, tau-quantized
//! operators and the off-diagonal decay of their Gabor matrices.

pub mod decay;
pub mod dft;
pub mod error;
pub mod io;
pub mod kahan;
pub mod norms;
pub mod phase_space;
pub mod quantization;
pub mod signals;
pub mod stft;
pub mod symbols;
pub mod wigner;

pub use decay::{BjDecayReport, DecayReport, TauSweepReport};
pub use error::{Error, Result};
pub use phase_space::{Grid, Lattice, PhaseSpacePoint, SampledSignal, WeightSpec};
pub use norms::{EmbeddingReport, LatticeArray, PartitionOfUnity};
pub use quantization::{GaborMatrix, TauTag};
pub use symbols::SymbolSpec;
pub use wigner::Quadrature;
pub use stft::{FrameReport, PhaseSpaceArray};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

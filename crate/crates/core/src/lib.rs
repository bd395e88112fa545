//! Graph signal sampling and reconstruction.
//!
//! Spectral decomposition of graph variation operators, vertex- and
//! frequency-domain sampling, subspace-model recovery, sampling-set
//! selection, and graph-regularized matrix completion.

pub mod completion;
pub mod error;
pub mod experiments;
pub mod filtering;
pub mod generators;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod recovery;
pub mod sampling;
pub mod selection;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{build_laplacian, Graph, VariationOperatorKind};
pub use spectral::{eigendecompose, gft, igft, GraphSignal, SignalDomain, SpectralDecomposition};

//! Numerical laboratory for degenerating wave packets of generalized SQG
//! equations linearized around quadratically degenerate shear states.
//!
//! The crate builds WKB wave packets from Hamilton-Jacobi bicharacteristics,
//! evolves the conjugated linearized equation pseudo-spectrally on a fixed
//! x1-mode, and measures every desk-checkable ingredient of the norm-growth
//! mechanism: frequency growth along rays, phase/amplitude envelopes,
//! wave-packet residuals, degeneration of negative Sobolev norms, and the
//! duality lower bound on Sobolev growth.
//!
//! See the `examples/` directory for one runnable program per capability and
//! the thin `degenwave` binary for the equivalent subcommand interface.

pub mod error;
pub mod jet;
pub mod quad;
pub mod roots;
pub mod ode;
pub mod interp;
pub mod symbols;
pub mod shear;
pub mod growth;
pub mod toymodel;
pub mod phase;
pub mod amplitude;
pub mod fft;
pub mod wavepacket;
pub mod linop;
pub mod harness;

pub use error::{Error, Result};
pub use growth::{check_conditions, tau_m, AsymptoticParameters, EpsMode, GrowthPlan};
pub use shear::ShearProfile;
pub use symbols::{validate_assumptions, RestrictedSymbol, SamplePlan, Symbol};

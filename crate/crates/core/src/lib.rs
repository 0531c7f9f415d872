//! Exact sparse-spectral algebra for steady 2D Navier–Stokes on the torus.
//!
//! Fields are finite sums of solenoidal modes `ρ cos(k·x + θ) k^⊥` with
//! big-integer frequencies and wide-exponent amplitudes. On top of that sit the
//! bilinear calculus ([`nonlinearity`]), lacunary fixtures ([`generators`]),
//! the frequency-cascade construction of singular steady states with its
//! verification engine ([`construction`]) and a Galerkin time stepper for small
//! fields ([`evolution`]).

pub mod cli;
pub mod construction;
pub mod error;
pub mod evolution;
pub mod generators;
pub mod io;
pub mod lattice;
pub mod nonlinearity;
pub mod phase;
pub mod spectral;
pub mod wide;

pub use error::{Error, Result};
pub use lattice::Frequency;
pub use phase::Phase;
pub use spectral::{Phasor, PhasorMode, SolenoidalField};
pub use wide::WideReal;

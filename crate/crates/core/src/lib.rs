pub mod cli;
pub mod error;
pub mod lift;
pub mod numeric;
pub mod oracle;
pub mod oscillator;
pub mod poly;
pub mod rational;
pub mod records;
pub mod recurrence;

pub use error::{Error, Result};
pub use lift::{CaseTag, LiftSolution, SolveOptions, Transcription};
pub use poly::Poly;
pub use rational::Rational;
pub use recurrence::{Definiteness, JacobiMatrix, OrthonormalCoefficients, PeriodicRecurrence};

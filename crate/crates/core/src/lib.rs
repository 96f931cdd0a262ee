//! Perturbation theory for finite-dimensional Gibbs measures with a quartic
//! generalized Coulomb interaction: Feynman diagrams and their symmetry
//! factors, amplitudes as formal power series, self-consistent Green's
//! function methods, and quadrature / Monte Carlo references.

pub mod amplitudes;
pub mod diagrams;
pub mod enumeration;
pub mod error;
pub mod methods;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};

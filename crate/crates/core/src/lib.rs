//! Discrete laboratory for divergence-form elliptic operators
//! `L = -div(A grad)` with local and nonlocal Robin boundary conditions
//! `nu . A grad u + Theta[u|_boundary] = 0` on Lipschitz domains.
//!
//! The crate builds piecewise-linear Galerkin realizations of `L` under
//! Robin, Neumann, and Dirichlet conditions, constructs boundary operators
//! `Theta` (multiplication, fractional powers of the harmonic single layer,
//! Hilbert-Schmidt kernels), solves the generalized symmetric eigenproblem,
//! synthesizes heat kernels and Green functions, and verifies positivity,
//! domination, spectral-gap, Gaussian, and Green-function bounds at desk
//! scale.

pub mod assembly;
pub mod boundary_ops;
pub mod error;
pub mod heat;
pub mod linalg;
pub mod mesh;
pub mod oracles;
pub mod sobolev;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

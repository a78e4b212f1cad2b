//! Numerical toolkit for unitarily invariant valuations on convex functions
//! on C^n, at desk scale (n = 2, 3).
//!
//! The crate provides, as composable pieces:
//!
//! - [`exterior`]: the exterior algebra over the 4n cotangent generators of
//!   T*C^n, the invariant forms theta_0, theta_1, theta_2, omega_s and their
//!   gamma/beta relatives, contraction, and Lefschetz decomposition;
//! - [`mixed`]: mixed discriminants with repeated blocks and the structured
//!   Gram-type matrices attached to tuples of vectors in C^n;
//! - [`grassmann`]: real subspaces of C^n, multiple Kähler angles, Tasaki
//!   bases, and the extremal subspaces E_{k,q} = C^q x R^{k-2q};
//! - [`polynomials`]: the invariant polynomials P_{k,q}, Klain functions of
//!   Hermitian intrinsic volumes, and the beta/gamma operator symbols;
//! - [`convex`]: a closed family of smooth convex functions with exact
//!   derivatives;
//! - [`valuation`]: differential-cycle quadrature for smooth valuations,
//!   Monge-Ampère integrals, polarization, and the real-slice Goodey-Weil
//!   transform;
//! - [`transforms`]: Abel transforms, radial Fourier/Laplace reduction, and
//!   the reconstruction of the Goodey-Weil transform from restrictions to the
//!   extremal subspaces;
//! - [`suites`] / [`report`]: named verification suites with machine-readable
//!   reports, driven by the `vconv` binary.
//!
//! Run `cargo run --example <name>` for focused demonstrations of each
//! capability, or `cargo run -- list-suites` for the verification suites.

pub mod convex;
pub mod error;
pub mod exterior;
pub mod grassmann;
pub mod mixed;
pub mod polynomials;
pub mod quadrature;
pub mod report;
pub mod suites;
pub mod transforms;
pub mod valuation;

pub use error::{Result, VconvError};

//! Exact arithmetic for tangle equations and Dehn surgery.
//!
//! This crate solves systems of tangle equations of the shape
//!
//! ```text
//! N(O + X1) = b1          N(U + X1) = b1
//! N(O + X2) = b2 # b3     N(U + X2) = b2
//! ```
//!
//! where the unknowns are tangles and the right-hand sides are 2-bridge
//! links, and independently verifies every reported solution by passing to
//! double branched covers: tangle sums become torus gluings, rational
//! tangle replacements become Dehn fillings, and the resulting closed
//! manifolds are recognized through Seifert invariant normalization.
//!
//! All arithmetic is exact (arbitrary precision integers); there is no
//! floating point anywhere. The crate is organized bottom-up:
//!
//! - [`exact`]: reduced extended rationals, modular inverses, and the
//!   even-length continued fraction scheme classifying rational tangles.
//! - [`twobridge`]: Schubert normal forms b(alpha, beta), equivalence,
//!   mirrors, connected sums, and the 2-bridge to lens space dictionary.
//! - [`seifert`]: Seifert fiber data M(g, k; ...), lens space recognition,
//!   torus knot exteriors, and an independent first-homology oracle.
//! - [`surgery`]: slope pushdown along a cable space, surgery on cable and
//!   iterated knots, and graph manifold filling.
//! - [`tangle`]: the symbolic tangle grammar, fraction calculus, closures,
//!   and the tangle to double-branched-cover dictionary.
//! - [`solver`]: enumeration and inversion of the solution families, tangle
//!   construction, and the verification gate.
//!
//! Parameter sweeps are data-parallel: with the default `parallel` feature
//! they run on a rayon pool, and with `--no-default-features` the same code
//! runs sequentially. Results are identical either way (order-preserving
//! merge plus canonical sorting).

pub mod exact;
pub mod exec;
pub mod seifert;
pub mod solver;
pub mod surgery;
pub mod tangle;
pub mod twobridge;

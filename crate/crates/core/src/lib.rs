//! Finite-truncation toolkit for the infinite qubit-chain groupoid
//! `𝒢 = Ω∞ × Γ`.
//!
//! `Ω∞` is the space of infinite binary sequences and `Γ` the group of
//! finitely supported flips acting on it by XOR. The crate works with
//! cylinder functions (functions of finitely many leading coordinates), which
//! makes every object finite while keeping all identities exact:
//!
//! * [`groupoid`]: elements, composition, inverse, enumeration of `Γ_n`.
//! * [`measures`]: Bernoulli and Ising Boltzmann cylinder measures, partition
//!   functions, Kolmogorov consistency, translation covariance.
//! * [`modular`]: the modular function `Δ` of a measure.
//! * [`algebra`]: the convolution algebra, involution, norms, modular
//!   operator and conjugation, Pukánszky generators, canonical weight.
//! * [`matrix_bridge`]: Pauli words in `M_{2^n}`, the Powers product state,
//!   the Glimm map and the GNS comparison.
//! * [`dfs`]: inductive construction of real DFS functions and the
//!   cochain complex of `Γ` with values in cylinder functions.
//! * [`ising`]: transition energies, the modular Hamiltonian and its
//!   spectrum, modular time evolution.
//! * [`exact`]: exact rational arithmetic for Bernoulli weights and `Δ`.
//! * [`runner`]: the verification harness behind the `qubit-groupoid` binary.

pub mod algebra;
pub mod cylinder;
pub mod dfs;
pub mod error;
pub mod exact;
pub mod groupoid;
pub mod ising;
pub mod matrix_bridge;
pub mod measures;
pub mod modular;
pub mod numeric;
pub mod runner;
pub mod sampling;

pub use algebra::AlgebraElement;
pub use cylinder::{psi, CylinderFunction, RealCylinder};
pub use error::{Error, Result};
pub use groupoid::{FlipWord, GroupoidElement, Prefix};
pub use measures::MeasureSpec;
pub use modular::{modular_delta, ModularFunction};
pub use num_complex::Complex64;

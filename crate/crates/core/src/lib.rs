//! Spin-1 Duffin–Kemmer particle in a uniform magnetic field on the 3-sphere.
//!
//! * [`algebra`]: exact cyclic-representation β-matrices and generator identities.
//! * [`geometry`]: cylindric-coordinate metric, tetrad, connection, field potential.
//! * [`radial`]: ladder operators, hypergeometric bound states, quantization rule.
//! * [`zsystem`]: indicial cubic, Frobenius exponents, and the coupled
//!   three-channel eigenproblem in `x = sin z`.

pub mod algebra;
pub mod exact;
pub mod geometry;
pub mod linalg;
pub mod radial;
pub mod report;
pub mod zsystem;

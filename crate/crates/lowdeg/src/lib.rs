//! Low-degree polynomial detection analysis for correlated Erdos-Renyi
//! graphs: exact combinatorial machinery (isomorphism classes, Fourier
//! coefficients, truncation calculus, overlap bounds) together with
//! Monte Carlo verification of the closed forms.

pub mod bounds;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod iso;
pub mod model;
pub mod poly;
pub mod trunc;
pub mod verify;

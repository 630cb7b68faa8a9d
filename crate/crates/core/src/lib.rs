//! Numerical laboratory for holomorphic tent spaces on the unit ball of
//! `C^n` (n = 1, 2): norms, fractional derivatives, Bergman projections,
//! lattices, atomic decompositions and a harness of band checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod funcspace;
pub mod geometry;
pub mod lattice;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type Complex64 = Complex<f64>;
pub type BallPoint64 = geometry::BallPoint<f64>;
pub type SpherePoint64 = geometry::SpherePoint<f64>;
pub type Aperture64 = geometry::Aperture<f64>;
pub type QuadratureRule64 = quadrature::QuadratureRule<f64>;
pub type RadialMesh64 = quadrature::RadialMesh<f64>;
pub type TaylorPoly64 = funcspace::TaylorPoly<f64>;
pub type KernelAtom64 = funcspace::KernelAtom<f64>;
pub type HoloFunction64 = funcspace::HoloFunction<f64>;
pub type MixedPoly64 = funcspace::MixedPoly<f64>;
pub type FracParams64 = operators::FracParams<f64>;
pub type ProjParams64 = operators::ProjParams<f64>;
pub type SpaceParams64 = norms::SpaceParams<f64>;
pub type NormReport64 = norms::NormReport<f64>;
pub type Lattice64 = lattice::Lattice<f64>;
pub type SeqTent64 = lattice::SeqTent<f64>;

pub type BallPoint32 = geometry::BallPoint<f32>;
pub type HoloFunction32 = funcspace::HoloFunction<f32>;

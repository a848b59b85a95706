//! Chebyshev bias for Frobenius elements in Galois extensions with group
//! `D_{2^n}` or `Q_{2^n}`.
//!
//! The exact side (`group`, `characters`, `arith`, `race`) works over
//! integers and cyclotomic numbers. The numeric side (`zeros`, `density`,
//! `bounds`) is generic over [`scalar::Real`]; the aliases below fix it to
//! `f64`.

pub mod arith;
pub mod bounds;
pub mod characters;
pub mod cyclotomic;
pub mod density;
pub mod experiments;
pub mod group;
pub mod quadrature;
pub mod race;
pub mod reference;
pub mod scalar;
pub mod special;
pub mod zeros;

pub use characters::Cyclo;
pub use scalar::Real;

pub type RaceModelF64 = race::RaceModel<f64>;
pub type ZeroSetF64 = zeros::ZeroSet<f64>;
pub type ZeroCountModelF64 = zeros::ZeroCountModel<f64>;
pub type QuadResultF64 = quadrature::QuadResult<f64>;

//! Newton's method for Hartree-Fock on the Grassmann manifold of density
//! matrices, with computable Kantorovich certificates.

pub mod conditions;
pub mod error;
pub mod grassmann;
pub mod hf;
pub mod integrals;
pub mod kantorovich;
pub mod matnorm;
pub mod ortho;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GrassmannPoint64 = grassmann::GrassmannPoint<f64>;
pub type TangentCoord64 = grassmann::TangentCoord<f64>;
pub type WeightSet64 = matnorm::WeightSet<f64>;
pub type IntegralSet64 = integrals::IntegralSet<f64>;
pub type ConditionReport64 = conditions::ConditionReport<f64>;
pub type Certificate64 = kantorovich::Certificate<f64>;
pub type NewtonTrace64 = kantorovich::NewtonTrace<f64>;
pub type OrthoResult64 = ortho::OrthoResult<f64>;

pub type GrassmannPoint32 = grassmann::GrassmannPoint<f32>;
pub type IntegralSet32 = integrals::IntegralSet<f32>;
pub type WeightSet32 = matnorm::WeightSet<f32>;

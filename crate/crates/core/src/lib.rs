//! Recoupling theory for the finite and infinite-dimensional modules of
//! Spin(2,1) and Spin(3,1), spinorial constraints on spin networks and
//! coherent intertwiners for SO*(2n).

pub mod error;
pub mod half;
pub mod numeric;
pub mod spin21;
pub mod cg;
pub mod golden;
pub mod racah;
pub mod jordan_schwinger;
pub mod lqg;
pub mod classical;
pub mod spin31;
pub mod fock;
pub mod sostar;
pub mod verify;

pub use error::{Error, Result};
pub use half::HalfInt;
pub use numeric::{C64, CMat, CVec};
pub use spin21::{Class3, RepLabel3};

//! Rolling maps between isometric surfaces in complex 3-space, their
//! connection forms, and the compatibility analysis of contact distributions
//! over a seed surface.

pub mod complex3;
pub mod contactdist;
pub mod error;
pub mod forms;
pub mod jet;
pub mod rolling;
pub mod sample;
pub mod scalar;
pub mod surfgeo;
pub mod sweep;
pub mod verify;

pub use complex3::{CMat3, CVec3, Mat3, Vec3};
pub use error::{GeomError, Result};
pub use jet::{Jet, Space};
pub use scalar::{re, Scalar, C64};

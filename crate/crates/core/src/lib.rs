//! Singularity analysis of generalized distance-squared mappings of the plane.

pub mod contact;
pub mod error;
pub mod geom;
pub mod mapping;
pub mod normal_forms;
pub mod oracle;
pub mod singular;
pub mod transcript;

pub use error::{Error, Result};
pub use geom::{Mat2, Point};
pub use mapping::{MappingSpec, PlaneMap, Rank};

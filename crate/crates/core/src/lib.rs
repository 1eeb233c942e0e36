pub mod banded;
pub mod beam;
pub mod dynamics;
pub mod error;
pub mod fd;
pub mod material;
pub mod modal;
pub mod scenario;
pub mod statics;

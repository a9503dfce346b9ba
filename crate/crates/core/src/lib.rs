pub mod bundle;
pub mod chow;
pub mod classes;
pub mod error;
pub mod fixtures;
pub mod intersect;
pub mod lecycles;
pub mod par;
pub mod projbundle;
pub mod report;
pub mod scenario;
pub mod strata;
pub mod verify;

pub mod cycnum;
pub mod error;
pub mod fqlaurent;
pub mod group;
pub mod harness;
pub mod model;
pub mod orbits;

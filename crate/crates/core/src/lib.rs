pub mod error;
pub mod geom3;
pub mod mesh;
pub mod hull;
pub mod kleetope;
pub mod families;
pub mod analysis;
pub mod verify;
pub mod cli;

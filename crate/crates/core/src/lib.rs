//! Exact rational computations on Hanner polytopes: faces and flags, the
//! volume function of the flag simplices, and experiments on the volume
//! product near a Hanner polytope.

pub mod cli;
pub mod faces;
pub mod flags;
pub mod geometry;
pub mod hanner;
pub mod linalg;
pub mod lp;
pub mod verify;
pub mod witness;

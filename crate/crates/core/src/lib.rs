//! Symbolic Clebsch-Gordan rules and exact verification of theta filtrations
//! for mod-p representations of GL2 over finite fields.

pub mod gf;
pub mod weights;
pub mod group;
pub mod linalg;
pub mod rep;
pub mod brauer;
pub mod jh;
pub mod theta;
pub mod verify;
pub mod report;
pub mod cli;

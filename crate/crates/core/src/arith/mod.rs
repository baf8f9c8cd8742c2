//! Arithmetic building blocks shared by the number-field modules.

pub mod fixed;
pub mod fq;
pub mod intmat;
pub mod lattice;
pub mod primes;
pub mod serde_int;
pub mod zpoly;

//! Units of orders in prime-degree number fields, their chamber coordinates and the
//! weighted counts built from them.

pub mod arith;
pub mod chamber;
pub mod dirichlet;
pub mod exactpoly;
pub mod exec;
pub mod harvest;
pub mod orderfield;
pub mod unitlattice;

pub use exec::Executor;

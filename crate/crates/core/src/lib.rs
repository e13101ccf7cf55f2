//! Computational checks for GL(3) Hecke data, Kloosterman sums, Mellin-Barnes
//! kernels, exact piecewise-linear programs and a local Euler factor.

pub mod arith;
pub mod euler;
pub mod exp_sums;
pub mod hecke;
pub mod kernels;
pub mod plp;
pub mod verify;

//! Core algebra and models for quantum Reed-Solomon outer codes over Galois qudits.
//!
//! The crate is `no_std` and needs only `alloc`. It covers:
//!
//! - [`gf`]: GF(2^s) arithmetic in the integer representation;
//! - [`basis`]: GF(2)-bases, duals and the qudit-to-qubit expansion;
//! - [`grs`]: generalized Reed-Solomon codes and MDS weight enumerators;
//! - [`qrs`]: the CSS qudit codes and their binarization;
//! - [`decode`]: minimum-weight list decoding and syndrome-collision statistics;
//! - [`tableau`]: a Galois-qudit stabilizer simulator running the cat-state,
//!   stabilizer-measurement and teleportation protocols with fault injection;
//! - [`noise`]: instruction rates, cat-state timing and error model;
//! - [`failure`]: time-like and space-like failure bounds;
//! - [`frontier`]: qubit accounting, parameter sweeps and Pareto frontiers.
#![no_std]

extern crate alloc;

pub mod basis;
pub mod decode;
pub mod failure;
pub mod frontier;
pub mod gf;
pub mod grs;
pub mod matrix;
pub mod noise;
pub mod qrs;
pub mod tableau;

pub use gf::{FieldCtx, FieldElement};

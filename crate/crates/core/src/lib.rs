pub mod arith;
pub mod clifford;
pub mod field;
pub mod interval;
pub mod k3lattice;
pub mod kugasatake;
pub mod pipeline;
pub mod qform;

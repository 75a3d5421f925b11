pub mod arith;
pub mod engine;
pub mod group;
pub mod spectra;
pub mod zeta;
pub mod oracle;

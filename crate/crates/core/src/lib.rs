pub mod cli;
pub mod covering;
pub mod framelab;
pub mod goldenring;
pub mod lattice;
pub mod wavelet;

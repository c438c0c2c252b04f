pub mod error;
pub mod linalg;
pub mod props;
pub mod decomp;
pub mod generators;
pub mod cli;
pub mod conjecture;
pub mod par;

pub mod artifact;
pub mod construct;
pub mod export;
pub mod gallery;
pub mod seeds;
pub mod suite;

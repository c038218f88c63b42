pub mod boundary;
pub mod constructors;
pub mod exterior;
pub mod linalg;
pub mod par;
pub mod patch;
pub mod patchwork;
pub mod symexpr;
pub mod taper;
pub mod verify;

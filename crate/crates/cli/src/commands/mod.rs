pub mod bench;
pub mod correlate;
pub mod superpose;
pub mod verify;

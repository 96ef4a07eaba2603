pub mod numkernel;
pub mod repr;
pub mod bethe;
pub mod sov;
pub mod vectors;

pub mod benchmark;
pub mod evaluate;
pub mod fit;
pub mod reconstruct;
pub mod sweep;
pub mod synth;

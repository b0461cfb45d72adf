pub mod augment;
pub mod metaeval;
pub mod rank;
pub mod score;
pub mod stats;

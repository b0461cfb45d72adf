pub mod fixtures;
pub mod oracles;

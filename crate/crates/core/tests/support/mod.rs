pub mod invariants;
pub mod oracles;
pub mod mets_check;

pub mod checks;
pub mod dsl;
pub mod eval;
pub mod report;
pub mod suite;
pub mod workspace;

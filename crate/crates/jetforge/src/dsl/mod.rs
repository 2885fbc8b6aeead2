pub mod parse;
pub mod print;

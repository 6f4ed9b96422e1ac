pub mod absint;
pub mod cli;
pub mod concrete;
pub mod domains;
pub mod ir;
pub mod transform;

pub mod adapter;
pub mod annotation;
pub mod docstring;
pub mod evolution;
pub mod extract;
pub mod inference;
pub mod literal;
pub mod model;
pub mod python;
pub mod qname;
pub mod usage;

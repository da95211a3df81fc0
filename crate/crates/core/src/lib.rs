pub mod bundle_file;
pub mod certify;
pub mod domain;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod harness;
pub mod higgs;
pub mod hodge;
pub mod jet;
pub mod linalg;
pub mod nilpotent;
pub mod parse;

//! Exact submodule products, annihilators and prime radicals of finite modules
//! over finite rings.

pub mod intlat;
pub mod algebra;
pub mod context;
pub mod homspace;
pub mod lattice;
pub mod product;
pub mod radical;
pub mod oracle;
pub mod instance;
pub mod harness;

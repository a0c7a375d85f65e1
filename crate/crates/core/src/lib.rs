//! Zeta-function identities for directed hypergraphs, perfect matchings of
//! k-partite hypergraphs and weight enumerators of binary codes.

pub mod circulations;
pub mod codes;
pub mod gadget;
pub mod hyperalg;
pub mod hypergraph;
pub mod io;
pub mod kasteleyn;
pub mod poly;
pub mod sign;

pub use sign::Sign;

pub mod arith;
pub mod error;
pub mod explicit;
pub mod identity;
pub mod output;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod stepconv;
pub mod sum;
pub mod weight;
pub mod zeros;

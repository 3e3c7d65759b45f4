pub mod cache;
pub mod campaign;
pub mod factor;
pub mod field;
pub mod groebner;
pub mod linalg;
pub mod poly;
pub mod upoly;
pub mod zerodim;
pub mod variety;
pub mod instances;
pub mod lattice;
pub mod conic;
pub mod appendix_a;
pub mod blowup;
pub mod quadric;
pub mod certifier;
pub mod padic;

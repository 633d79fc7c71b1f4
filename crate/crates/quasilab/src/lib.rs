//! Decision procedures over finite algebras and the quasivarieties they
//! generate: relative congruence lattices, free algebras, admissibility,
//! structural completeness, primitivity, and discriminator-term synthesis.
//! Every yes/no answer carries a witness that can be re-verified
//! independently of the search that produced it.

pub mod kernel;
pub mod morphisms;
pub mod congruence;
pub mod freealg;
pub mod deduction;
pub mod projectivity;
pub mod clones;
pub mod discriminator;
pub mod corpus;
pub mod report;

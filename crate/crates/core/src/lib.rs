//! Bordered-sutured Floer invariants computed combinatorially: strand
//! algebras of arc diagrams, type D / DA / DD structures, box tensor products,
//! morphism complexes over F₂ and over F₂(x₁,…,xₙ), curve counts on nice
//! Heegaard diagrams, and detectors for compressing disks and partly
//! boundary-parallel tangles.

pub mod arcdiagram;
pub mod bimodlib;
pub mod coeff;
pub mod heegaard;
pub mod pipeline;
pub mod strandalg;
pub mod structures;

//! Exact cost regions and N-sum-box coding schemes for computing an
//! `F_d`-linear function of three transmitters' data over a quantum
//! multiple-access channel.

pub mod allocator;
pub mod bell;
pub mod document;
pub mod field;
pub mod gadgets;
pub mod nsum;
pub mod polyhedra;
pub mod rational;
pub mod regions;
pub mod samples;
pub mod scheme;
pub mod standard_form;

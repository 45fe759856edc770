//! Exact certificates for Lorentzian and positive semidefinite claims about
//! valuated matroids, M♮-concave set functions and ultrametric trees.

#![allow(clippy::needless_range_loop)]

pub mod bits;
pub mod exactnum;
pub mod gen;
pub mod inequalities;
pub mod io;
pub mod matroid;
pub mod poly;
pub mod setfn;
pub mod suite;
pub mod symmat;
pub mod trees;
pub mod verdict;

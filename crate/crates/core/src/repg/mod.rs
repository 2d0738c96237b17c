//! Finite groups, unitary representations and fibre functors.

pub mod functor;
pub mod group;
pub mod rep;

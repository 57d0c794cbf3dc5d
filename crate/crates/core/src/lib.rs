//! Exact enumeration of matrices over finite fields with prescribed rank
//! and a forbidden support pattern, together with the rook-theoretic and
//! permutation-pattern machinery used to study when such counts are
//! polynomial in `q`.

pub mod boardspec;
pub mod counter;
pub mod diagram;
pub mod fields;
pub mod perms;
pub mod qpoly;
pub mod rooks;
pub mod series;
pub mod verify;

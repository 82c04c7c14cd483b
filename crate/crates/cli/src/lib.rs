//! Library half of the wmac command-line tool: the on-disk table cache
//! and the verification suites, including the desk-scale main-theorem
//! cross-check between the bosonic and fermionic pictures.

pub mod cache;
pub mod verify;

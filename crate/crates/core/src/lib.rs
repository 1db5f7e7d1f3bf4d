#![no_std]
extern crate alloc;

pub mod apds;
pub mod calculus;
pub mod fdl;
pub mod natded;
pub mod oracle;
pub mod order;
pub mod proof;
pub mod sequent;
pub mod syntax;

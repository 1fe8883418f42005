#![no_std]
extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod expr;
pub mod frame;
pub mod numlab;
pub mod samwebs;

pub use error::{Error, Result};

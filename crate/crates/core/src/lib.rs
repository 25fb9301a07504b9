//! Opetopes and opetopic sets, in both the named and the unnamed sequent calculi.
pub mod address;
pub mod coding;
pub mod complex;
pub mod counting;
pub mod named;
pub mod nderiv;
pub mod nset;
pub mod preopetope;
pub mod textio;
pub mod unnamed;
pub mod uset;

#[cfg(test)]
mod tests;

//! Exact solution families for longitudinal waves in a nonlinearly elastic
//! (Murnaghan) rod, from material constants to verified closed forms.
//!
//! The crate is organized as a pipeline:
//!
//! * [`materials`] turns nine measured material constants into the exact
//!   rational parameters of the governing equation.
//! * [`jet`] provides order-4 complex Taylor arithmetic, the numeric
//!   backbone for evaluating solutions and their derivatives.
//! * [`cas`] regenerates the algebraic systems the closed forms solve,
//!   with exact rational-coefficient polynomial arithmetic.
//! * [`catalog`] holds the solution families themselves.
//! * [`verify`] checks every catalog entry against the governing equation
//!   on sampled grids and reports residuals honestly.
//! * [`figures`] reproduces the reference plot data as CSV.

pub mod cas;
pub mod catalog;
pub mod figures;
pub mod jet;
pub mod materials;
pub mod rational;
pub mod verify;

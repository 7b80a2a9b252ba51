//! Exact-arithmetic engine for L∞ algebras over graded filtered Novikov-type
//! coefficient rings.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function
//! of immutable inputs: coefficient rings, graded bases, sparse structure
//! constants, Maurer–Cartan curvature and gauge flows, finite cochain complexes
//! and telescopes, and the toric orbit bookkeeping. File formats and the
//! command-line front end live in the `mcflow` crate.
#![no_std]

extern crate alloc;

pub mod coeff;
pub mod complex;
pub mod error;
pub mod graded;
pub mod koszul;
pub mod linalg;
pub mod linf;
pub mod mc;
pub mod orbit;
pub mod pipeline;
pub mod rational;
pub mod tau;

pub use coeff::{Mode, Monomial, NovikovPolynomial, RingSpec, SphereClass};
pub use error::{Error, Result};
pub use graded::{Degree, Element, GenKind, Generator, GradedBasis};
pub use linf::{LInfStructure, PartialDomain};
pub use rational::Rational;

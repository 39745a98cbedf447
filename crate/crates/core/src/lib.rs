//! Exact computations in the derived Hall algebras of the categories
//! `C(r,m)` and `X(r,m)`: Hom spaces, cones, Hall numbers, full products,
//! presentations by generators and relations, and the bound quivers these
//! categories come from.

pub mod brackets;
pub mod category;
pub mod closed_form;
pub mod cone;
pub mod error;
pub mod gentle;
pub mod hall;
pub mod presented;
pub mod scalar;

pub use category::{Arrow, ArrowKind, DimVector, Indec, Level, Obj, Params};
pub use error::{Error, ParseError};
pub use hall::{FreeElement, Generator, HallAlgebra, HallElement, Word};
pub use scalar::{Poly, QScalar};

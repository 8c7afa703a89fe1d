//! Exact construction of the polynomial families that give every derivative
//! of `sin^n`, `cos^n`, `sinh^n` and `cosh^n`, with independent numeric
//! evaluation routes to check them against.

pub mod check;
pub mod closedform;
pub mod error;
pub mod evaluator;
pub mod exactpoly;
pub mod families;
pub mod golden;
pub mod render;
pub mod triangle;

pub use error::Error;
pub use evaluator::{
    build_expression, evaluate, finite_difference, specialize, DerivativeExpression, Exponent,
    Form, SpecializedExpression,
};
pub use exactpoly::{EvenSubstitution, NPoly, UPoly};
pub use families::{final_poly, intermediate_poly, Family, Sequence, SequenceCache};
pub use render::{render_expression, render_json, RenderFormat, RenderOptions};

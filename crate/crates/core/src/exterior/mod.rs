//! Differential forms, multivector fields and mixed-degree spinors on a
//! coordinate patch.

mod field;
mod map;
mod spinor;

pub use field::{
    combinations, sort_sign, Contravariant, Covariant, ExteriorError, Field, FieldTape, FormField,
    MultivectorField,
};
pub use map::{adjugate, ExplicitMap};
pub use spinor::{annihilator_residual, Spinor};

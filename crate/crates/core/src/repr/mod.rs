//! Highest-weight modules of `sl2` and `U_q(sl2)`, their tensor products and
//! the monodromy matrix built from them.

mod monodromy;
mod space;
mod spec;

pub use monodromy::MonodromyBundle;
pub use space::{multi_index, FactorGens, TensorSpace};
pub use spec::{ModelSpec, Separation, SpecError, Variant, Weight};

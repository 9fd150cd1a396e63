//! Exact Leavitt path algebras of finite quivers, their sink and
//! infinite-path representations, algebraic branching systems, and the
//! constructive witnesses that go with them.

pub mod algebra;
pub mod batch;
pub mod branching;
pub mod linalg;
pub mod path;
pub mod quiver;
pub mod random;
pub mod repr;
pub mod scalars;
pub mod structure;
pub mod text;

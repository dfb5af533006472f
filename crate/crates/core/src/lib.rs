pub mod conventions;
pub mod error;
pub mod expr;
pub mod forms;
pub mod frame;
pub mod gauduchon;
pub mod hermitian;
pub mod identities;
pub mod jet;
pub mod manifold;
pub mod pipeline;
pub mod riemannian;
pub mod sampling;
pub mod scalar;
pub mod zoo;

pub use error::{GeomError, Result};
pub use jet::{ChartPoint, Jet};

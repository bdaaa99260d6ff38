//! Exterior tensors and cotensors of a pair and the operators on them.

mod element;
mod ops;
mod word;

pub use element::{wedge_all, Cotensor, CotensorKind, Graded, Kind, Tensor, TensorKind};
pub use ops::DEFAULT_ARITY_CAP;
pub(crate) use ops::{contract_unchecked, natural_inclusion_unchecked};
pub use word::{Word, MAX_BASIS};

//! Worked applications: auction revenue with stepwise decomposition,
//! parametric deposit-run families, and iterated belief operators.

pub mod auction;
pub mod bankrun;
pub mod beliefs;

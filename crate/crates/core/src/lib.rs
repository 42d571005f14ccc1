pub mod birkhoff;
pub mod equations;
pub mod finset;
pub mod inserters;
pub mod par;
pub mod series;
pub mod theories;

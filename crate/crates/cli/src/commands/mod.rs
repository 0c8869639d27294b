pub mod converge;
pub mod evolve;
pub mod props;

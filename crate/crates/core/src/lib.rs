pub mod algebra;
pub mod cli;
pub mod cocycle;
pub mod error;
pub mod group;
pub mod io;
pub mod norms;
pub mod optim;
pub mod positivity;
pub mod smith;

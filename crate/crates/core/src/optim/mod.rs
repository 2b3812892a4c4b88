pub mod gamma2;
pub mod linalg;
pub mod t2;

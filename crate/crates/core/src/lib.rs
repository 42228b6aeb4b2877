pub mod exactla;
pub mod algebra;
pub mod cyclic;
pub mod bicomplex;
pub mod tate;

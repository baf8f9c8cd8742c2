pub mod adjoint;

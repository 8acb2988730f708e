//! The discrete mixed operator `-Δ + (-Δ)^s`, its kernel and energies.

mod energy;
mod fft;
mod kernel;
mod operator;

pub use energy::{energy_forms, rayleigh_quotient, EnergyForms};
pub use fft::{fast_len, FftConvolver};
pub use kernel::{
    build_kernel, build_kernel_with_support, cell_weight_1d, required_half_width, tail_integral,
    FractionalKernel,
};
pub use operator::{MixedOperator, NonlocalPath};
pub(crate) use operator::dot;

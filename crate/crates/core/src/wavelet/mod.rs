//! Scaling functions: filters, boundary corrections, Fourier transforms and
//! point evaluation on dyadic grids.

mod boundary;
mod eval;
mod family;
mod fourier;

pub use boundary::{boundary_filters, BoundaryFilterSet, Side};
pub use eval::{
    dyadic_grid, evaluate_boundary_dyadic, evaluate_scaling_dyadic, weval_1d, weval_2d, FunctionTable,
    ReconstructionEvaluation, TableKind,
};
pub use family::{filter_coefficients, Family, MAX_VANISHING_MOMENTS};
pub use fourier::{
    boundary_fourier_at_zero, fourier_boundary, fourier_scaling, fourier_scaling_2d,
    fourier_scaling_dilated, low_pass, BoundaryFourier, DEFAULT_DEPTH, DEFAULT_TERMS,
};

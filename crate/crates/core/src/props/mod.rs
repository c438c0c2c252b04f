//! Operator functions, the condition `|T| ≤ |Re T|`, and class membership.

mod brownian;
pub(crate) mod classes;
mod functions;

pub use brownian::{brownian_decompose, two_isometry_structure, BrownianDecomposition, TwoIsometryStructure};
pub use classes::{classify, ClassMembership, Membership, QuasiMembership};
pub use functions::{
    douglas_factor, douglas_factor_with, fong_tsui_check, fong_tsui_check_with, operator_functions, operator_scale,
    polar_real_part, ConditionReport, DouglasFactor, OperatorFunctions, PolarRealPart,
};

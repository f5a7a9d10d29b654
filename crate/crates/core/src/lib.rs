//! Iterated equilibrium distributions of lifetime laws, their generalized
//! reliability functions, and the generalized ageing orderings built on them.

// `!(a > b)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distfn;
pub mod equilibrium;
pub mod error;
pub mod interp;
pub mod orderings;
pub mod quadrature;
pub mod report;
pub mod shapes;
pub mod transforms;

pub use distfn::{
    make_empirical, make_exponential, make_gamma, make_uniform, make_weibull, ClosedChain,
    DistributionModel, SupportInterval,
};
pub use equilibrium::{build_chain, EquilibriumChain, NumericSettings};
pub use error::{Error, Result};
pub use orderings::{
    alpha_map, check_relation, check_s_ifr, check_s_ifra, check_s_nbafr, check_s_nbu, check_s_nbufr,
    classify_ageing, classify_all, direct_check, ordering_report, scale_equivalence, sign_change_form,
    AgeingClassification, AlphaMap, OrderingReport, OrderingVerdict, Relation,
};
pub use shapes::{Outcome, ShapeVerdict, SignPattern};
pub use transforms::{lorenz, r_transform, r_transform_inv, ttt, CurveKind, UnitCurve};

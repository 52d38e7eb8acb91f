//! Growth characteristics of finite-dimensional subspaces of `L₁` and the
//! disjointness machinery built on rearrangements.

pub mod appendix;
mod eta;
pub mod extract;
mod sample;
mod search;

pub use appendix::{
    delta_score, in_m_epsilon, max_m_epsilon, modulus_ac, nu, nu_limit, s_epsilon_set,
    tail_ratio, DeltaScore, DeltaVerdict,
};
pub use eta::{
    boundary_space, default_limit_grid, eta, eta_in_mediant, eta_in_space, eta_limit,
    eta_profile, eta_profile_in, eta_star, lu_l1_ratio, eta_star_with_profile, BoundarySpace, EtaEstimate,
    EtaLimit, EtaProfile, LimitVerdict, RatioEstimate, LIMIT_BAND,
};
pub use extract::{default_schedule, extract_almost_disjoint, BudgetRule, Extraction};
pub use sample::SubspaceSample;
pub use search::{HeadNorm, SearchConfig};

//! Exact moments, risks and minimax bounds.

mod coef;
mod formulas;
mod minimax;
mod moments;
mod quad;

pub use coef::{is_in_ql, optimal_c, risk_of_c, CoefVector, QL_TOL};
pub use formulas::{
    bound_mean_coefficient, design_term, exact_mean_coefficient, ms_edge_kurtosis_coefficient,
    ms_risk, ols_risk, MsSampleSizeTerm, RiskComponents, RiskReport,
};
pub use minimax::{
    bound_curves, d_sequence, g_l, g_l_extended, g_l_slope_at_zero, minimax_bounds,
    ols_minimax_upper, upper_bound_crossing, write_bound_curves_csv, BoundRow, MinimaxBounds,
};
pub use moments::{sk_mean, sk_moments, tk_mean, tk_moments, LagMoments};
pub use quad::{quad_moments, quad_risk, QuadMoments};

#pragma once

#include <vector>

#include "hwf/engine.hpp"
#include "hwf/types.hpp"

namespace hwf {

/// Everything a calibration run needs besides the parameters.
struct CalibrationSetup {
    ModelState init;              // state at t0
    ExitRates rates;
    InflowPlan inflow;
    const StockTable* observed = nullptr;
    int last_observed = 0;
    std::vector<int> eval_years;  // default: {last_observed}
};

struct GridPoint {
    double p_enter;
    double p_gp;
    double chi2;
};

struct GofSurface {
    double step = 0.0;
    std::vector<GridPoint> grid;
    Params argmin;
    double min_chi2 = 0.0;
};

/// Weighted chi-squared distance between model and observed field totals at
/// the evaluation years: sum_i w_i ((Z_i - M_i)/Z_i)^2 with w_i = Z_i / sum Z.
double gof_chi2(const Trajectory& trajectory, const StockTable& stocks,
                const std::vector<int>& eval_years);

/// Runs the model from setup.init with the given parameters and evaluates the
/// goodness of fit.
double objective(const CalibrationSetup& setup, const Params& params);

/// Brute-force scan of (p_enter, p_gp) over [0,1]^2 for the two-field model.
/// Ties break toward smaller p_enter, then smaller p_gp.
GofSurface grid_search(const CalibrationSetup& setup, double step);

struct DescentOptions {
    double fd_step = 1e-4;       // central finite differences
    double rel_tol = 1e-8;       // relative chi2 improvement
    int max_iterations = 10000;
    int random_starts = 4;       // plus the supplied init
};

/// Joint fit of p_enter and the field-choice matrix for the six-field model:
/// projected gradient descent with backtracking, field choices re-projected
/// onto the probability simplex after every step, best of multiple fixed
/// seeded starts.
Params calibrate_extended(const CalibrationSetup& setup, const Params& init,
                          const DescentOptions& options = {});

/// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
std::vector<double> project_simplex(std::vector<double> x);

}  // namespace hwf

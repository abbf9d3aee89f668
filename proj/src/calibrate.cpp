#include "hwf/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hwf {

namespace {

std::vector<double> observed_totals(const StockTable& stocks,
                                    const std::vector<FieldId>& fields,
                                    int year) {
    std::vector<double> z;
    z.reserve(fields.size());
    for (const auto& f : fields) {
        const double v = stocks.field_total(f, year);
        if (v <= 0.0)
            throw HwfError("ZeroObservedTotal",
                           "observed total for " + f.label() + " in " +
                               std::to_string(year) + " is not positive");
        z.push_back(v);
    }
    return z;
}

double chi2_year(const ModelState& state, const std::vector<double>& z) {
    const double z_sum = std::accumulate(z.begin(), z.end(), 0.0);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double w = z[i] / z_sum;
        const double r = (z[i] - state.field_total(i)) / z[i];
        chi2 += w * r * r;
    }
    return chi2;
}

}  // namespace

double gof_chi2(const Trajectory& trajectory, const StockTable& stocks,
                const std::vector<int>& eval_years) {
    if (eval_years.empty())
        throw HwfError("BadEvalYears", "no evaluation years");
    const auto& fields = trajectory.states.front().fields;
    double chi2 = 0.0;
    for (int year : eval_years)
        chi2 += chi2_year(trajectory.at_year(year),
                          observed_totals(stocks, fields, year));
    return chi2;
}

double objective(const CalibrationSetup& setup, const Params& params) {
    const auto eval_years = setup.eval_years.empty()
                                ? std::vector<int>{setup.last_observed}
                                : setup.eval_years;
    const int t_end = *std::max_element(eval_years.begin(), eval_years.end());
    const auto traj = run(setup.init, params, setup.rates, setup.inflow, t_end,
                          setup.last_observed);
    return gof_chi2(traj, *setup.observed, eval_years);
}

GofSurface grid_search(const CalibrationSetup& setup, double step) {
    const double inv = 1.0 / step;
    const int n = static_cast<int>(std::lround(inv));
    if (n < 1 || std::abs(n * step - 1.0) > 1e-9)
        throw HwfError("BadGridStep",
                       "grid step must divide 1 evenly, got " +
                           std::to_string(step));

    const auto& fields = setup.init.fields;
    if (fields.size() != 2 || fields[0].sector || fields[1].sector)
        throw HwfError("BadModel", "grid search requires the two-field model");
    const std::size_t gp = fields[0].profession == Profession::GP ? 0 : 1;
    const std::size_t sp = 1 - gp;

    GofSurface surface;
    surface.step = step;
    surface.grid.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    surface.min_chi2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            Params params;
            params.p_enter = static_cast<double>(i) / n;
            const double p_gp = static_cast<double>(j) / n;
            params.field_choice[fields[gp]] = p_gp;
            params.field_choice[fields[sp]] = 1.0 - p_gp;
            const double chi2 = objective(setup, params);
            surface.grid.push_back({params.p_enter, p_gp, chi2});
            // Strict < keeps the lexicographically smallest tie.
            if (chi2 < surface.min_chi2) {
                surface.min_chi2 = chi2;
                surface.argmin = params;
            }
        }
    }
    return surface;
}

std::vector<double> project_simplex(std::vector<double> x) {
    const auto n = x.size();
    std::vector<double> u = x;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, tau = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        css += u[j];
        const double t = (css - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) tau = t;
    }
    for (auto& v : x) v = std::max(0.0, v - tau);
    return x;
}

namespace {

Params vector_to_params(const std::vector<double>& x,
                        const std::vector<FieldId>& fields) {
    Params params;
    params.p_enter = x[0];
    for (std::size_t i = 0; i < fields.size(); ++i)
        params.field_choice[fields[i]] = x[i + 1];
    return params;
}

std::vector<double> project(std::vector<double> x) {
    x[0] = std::clamp(x[0], 0.0, 1.0);
    std::vector<double> choices(x.begin() + 1, x.end());
    choices = project_simplex(std::move(choices));
    std::copy(choices.begin(), choices.end(), x.begin() + 1);
    return x;
}

struct Iterate {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
};

Iterate descend(const CalibrationSetup& setup, std::vector<double> x0,
                const DescentOptions& opt) {
    const auto& fields = setup.init.fields;
    auto eval = [&](const std::vector<double>& x) {
        return objective(setup, vector_to_params(x, fields));
    };

    Iterate best{project(std::move(x0)), 0.0};
    best.f = eval(best.x);
    if (!std::isfinite(best.f))
        throw HwfError("NonFinite", "objective is not finite at the start");

    auto x = best.x;
    double f = best.f;
    const auto dim = x.size();
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        std::vector<double> grad(dim);
        double grad_sq = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            auto lo = x, hi = x;
            lo[k] -= opt.fd_step;
            hi[k] += opt.fd_step;
            grad[k] = (eval(hi) - eval(lo)) / (2.0 * opt.fd_step);
            grad_sq += grad[k] * grad[k];
        }
        if (grad_sq == 0.0) break;

        double step_size = 1.0;
        Iterate trial;
        bool improved = false;
        while (step_size > 1e-14) {
            auto cand = x;
            for (std::size_t k = 0; k < dim; ++k)
                cand[k] -= step_size * grad[k];
            cand = project(std::move(cand));
            const double fc = eval(cand);
            if (fc < f - 1e-4 * step_size * grad_sq) {
                trial = {std::move(cand), fc};
                improved = true;
                break;
            }
            step_size *= 0.5;
        }
        if (!improved) break;

        const double rel = (f - trial.f) / std::max(f, 1e-300);
        x = std::move(trial.x);
        f = trial.f;
        if (f < best.f) best = {x, f};
        if (rel < opt.rel_tol) break;
    }
    return best;
}

}  // namespace

Params calibrate_extended(const CalibrationSetup& setup, const Params& init,
                          const DescentOptions& options) {
    const auto& fields = setup.init.fields;
    std::vector<double> x0(fields.size() + 1);
    x0[0] = init.p_enter;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        auto it = init.field_choice.find(fields[i]);
        x0[i + 1] = it == init.field_choice.end() ? 0.0 : it->second;
    }

    std::vector<std::vector<double>> starts{x0};
    for (int seed = 1; seed <= options.random_starts; ++seed) {
        std::mt19937 rng(static_cast<unsigned>(seed));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::exponential_distribution<double> expo(1.0);
        std::vector<double> s(fields.size() + 1);
        s[0] = unit(rng);
        double sum = 0.0;
        for (std::size_t i = 1; i < s.size(); ++i) sum += (s[i] = expo(rng));
        for (std::size_t i = 1; i < s.size(); ++i) s[i] /= sum;
        starts.push_back(std::move(s));
    }

    Iterate best;
    for (auto& start : starts) {
        auto result = descend(setup, std::move(start), options);
        if (result.f < best.f) best = std::move(result);
    }
    return vector_to_params(best.x, fields);
}

}  // namespace hwf

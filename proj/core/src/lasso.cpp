#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agentattr/baselines.hpp"
#include "agentattr/errors.hpp"

namespace agentattr {

namespace {

constexpr double kTolerance = 1e-8;
constexpr int kMaxSweeps = 10000;

double soft_threshold(double x, double lambda) {
    if (x > lambda) return x - lambda;
    if (x < -lambda) return x + lambda;
    return 0.0;
}

void check_design(const std::vector<AblationMask>& masks, const std::vector<double>& scores,
                  double lambda) {
    if (masks.size() != scores.size()) {
        throw std::invalid_argument("fit_lasso: masks and scores differ in length");
    }
    if (masks.size() < 2) throw std::invalid_argument("fit_lasso: need at least 2 samples");
    if (!(lambda >= 0.0)) throw std::invalid_argument("fit_lasso: lambda must be >= 0");
    const std::size_t p = masks.front().bits.size();
    bool any_distinct = false;
    for (const auto& m : masks) {
        if (m.bits.size() != p) {
            throw std::invalid_argument("fit_lasso: masks differ in length");
        }
        if (m.bits != masks.front().bits) any_distinct = true;
    }
    if (!any_distinct) {
        throw NumericsError("fit_lasso: all masks identical; design is degenerate");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw NumericsError("fit_lasso: non-finite score");
    }
}

}  // namespace

SurrogateFit fit_lasso(const std::vector<AblationMask>& masks,
                       const std::vector<double>& scores, double lambda) {
    check_design(masks, scores, lambda);
    const std::size_t m = masks.size();
    const std::size_t p = masks.front().bits.size();
    const double inv_m = 1.0 / static_cast<double>(m);

    // column j as 0/1 doubles; z[j] = (1/m) * sum_i x_ij^2
    std::vector<std::vector<double>> col(p, std::vector<double>(m, 0.0));
    std::vector<double> z(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            if (masks[i].bits[j]) {
                col[j][i] = 1.0;
                z[j] += 1.0;
            }
        }
        z[j] *= inv_m;
    }

    SurrogateFit fit;
    fit.weights.assign(p, 0.0);
    fit.lambda = lambda;
    fit.num_samples = m;

    double intercept = 0.0;
    std::vector<double> residual(scores);  // y - Xw - b, with w = 0, b = 0

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        double max_update = 0.0;

        double mean_residual = 0.0;
        for (double r : residual) mean_residual += r;
        mean_residual *= inv_m;
        if (mean_residual != 0.0) {
            intercept += mean_residual;
            for (double& r : residual) r -= mean_residual;
            max_update = std::max(max_update, std::abs(mean_residual));
        }

        for (std::size_t j = 0; j < p; ++j) {
            if (z[j] == 0.0) continue;  // all-dropped column stays at weight 0
            double rho = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                rho += col[j][i] * (residual[i] + col[j][i] * fit.weights[j]);
            }
            rho *= inv_m;
            const double updated = soft_threshold(rho, lambda) / z[j];
            const double delta = updated - fit.weights[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < m; ++i) residual[i] -= col[j][i] * delta;
                fit.weights[j] = updated;
                max_update = std::max(max_update, std::abs(delta));
            }
        }

        if (max_update < kTolerance) break;
    }

    double sse = 0.0;
    for (double r : residual) sse += r * r;
    fit.intercept = intercept;
    fit.rmse = std::sqrt(sse * inv_m);
    fit.sweeps = sweep + 1;
    if (sweep >= kMaxSweeps) {
        throw NumericsError("fit_lasso: no convergence after " + std::to_string(kMaxSweeps) +
                            " sweeps (rmse=" + std::to_string(fit.rmse) + ")");
    }
    return fit;
}

double lasso_kkt_violation(const SurrogateFit& fit, const std::vector<AblationMask>& masks,
                           const std::vector<double>& scores) {
    const std::size_t m = masks.size();
    const std::size_t p = fit.weights.size();
    const double inv_m = 1.0 / static_cast<double>(m);

    std::vector<double> residual(m);
    for (std::size_t i = 0; i < m; ++i) {
        double pred = fit.intercept;
        for (std::size_t j = 0; j < p; ++j) {
            if (masks[i].bits[j]) pred += fit.weights[j];
        }
        residual[i] = scores[i] - pred;
    }

    double mean_residual = 0.0;
    for (double r : residual) mean_residual += r;
    mean_residual *= inv_m;
    double worst = std::abs(mean_residual);  // unpenalized intercept: grad must vanish

    for (std::size_t j = 0; j < p; ++j) {
        double grad = 0.0;  // d/dw_j of the smooth part
        for (std::size_t i = 0; i < m; ++i) {
            if (masks[i].bits[j]) grad -= residual[i];
        }
        grad *= inv_m;
        double violation;
        if (fit.weights[j] > 0.0) {
            violation = std::abs(grad + fit.lambda);
        } else if (fit.weights[j] < 0.0) {
            violation = std::abs(grad - fit.lambda);
        } else {
            violation = std::max(0.0, std::abs(grad) - fit.lambda);
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

}  // namespace agentattr

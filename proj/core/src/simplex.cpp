#include "nvopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nvopt {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
}

SimplexResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& start, const SimplexConfig& cfg) {
  const std::size_t dim = start.size();
  if (cfg.bounds.size() != dim)
    throw std::invalid_argument("nelder_mead: bounds/start size mismatch");
  for (const auto& b : cfg.bounds)
    if (!(b[0] <= b[1]))
      throw std::invalid_argument("nelder_mead: empty bound interval");

  auto clip = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < dim; ++i)
      x[i] = std::clamp(x[i], cfg.bounds[i][0], cfg.bounds[i][1]);
  };

  SimplexResult result;
  result.value = neg_inf;

  auto eval = [&](const std::vector<double>& x) {
    double v = objective(x);
    if (!std::isfinite(v)) v = neg_inf;
    ++result.evals;
    if (v > result.value || result.best_history.empty()) {
      result.value = v;
      result.x = x;
    }
    result.best_history.push_back(result.value);
    return v;
  };

  // vertices plus their values; internally we keep the maximization order
  std::vector<std::vector<double>> xs(dim + 1);
  std::vector<double> fs(dim + 1);
  xs[0] = start;
  clip(xs[0]);
  for (std::size_t i = 0; i < dim; ++i) {
    xs[i + 1] = xs[0];
    const double width = cfg.bounds[i][1] - cfg.bounds[i][0];
    double step = cfg.initial_step_fraction * width;
    if (step == 0.0) step = 1e-8;
    if (xs[0][i] + step > cfg.bounds[i][1]) step = -step;
    xs[i + 1][i] += step;
    clip(xs[i + 1]);
  }
  for (std::size_t i = 0; i <= dim; ++i) {
    if (result.evals >= cfg.max_evals) break;
    fs[i] = eval(xs[i]);
  }

  std::vector<std::size_t> order(dim + 1);
  while (result.evals < cfg.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] > fs[b]; });
    const std::size_t best = order[0];
    const std::size_t lousy = order[dim - 1];  // second worst
    const std::size_t worst = order[dim];

    const double spread = fs[best] - fs[worst];
    if (std::isfinite(spread) && spread < cfg.stall_tol) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += xs[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coeff) {
      std::vector<double> x(dim);
      for (std::size_t k = 0; k < dim; ++k)
        x[k] = centroid[k] + coeff * (centroid[k] - xs[worst][k]);
      clip(x);
      return x;
    };

    std::vector<double> xr = blend(cfg.reflection);
    const double fr = eval(xr);
    if (result.evals >= cfg.max_evals && fr <= fs[best]) break;

    if (fr > fs[best]) {
      std::vector<double> xe = blend(cfg.reflection * cfg.expansion);
      const double fe =
          result.evals < cfg.max_evals ? eval(xe) : neg_inf;
      if (fe > fr) {
        xs[worst] = std::move(xe);
        fs[worst] = fe;
      } else {
        xs[worst] = std::move(xr);
        fs[worst] = fr;
      }
      continue;
    }
    if (fr > fs[lousy]) {
      xs[worst] = std::move(xr);
      fs[worst] = fr;
      continue;
    }

    // contraction: outside when the reflection at least beat the worst point
    const bool outside = fr > fs[worst];
    std::vector<double> xc;
    if (outside) {
      for (std::size_t k = 0; k < dim; ++k)
        xc.push_back(centroid[k] + cfg.contraction * (xr[k] - centroid[k]));
    } else {
      for (std::size_t k = 0; k < dim; ++k)
        xc.push_back(centroid[k] + cfg.contraction * (xs[worst][k] - centroid[k]));
    }
    clip(xc);
    if (result.evals >= cfg.max_evals) break;
    const double fc = eval(xc);
    if ((outside && fc >= fr) || (!outside && fc > fs[worst])) {
      xs[worst] = std::move(xc);
      fs[worst] = fc;
      continue;
    }

    // shrink toward the best vertex
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k)
        xs[i][k] = xs[best][k] + cfg.shrink * (xs[i][k] - xs[best][k]);
      clip(xs[i]);
      if (result.evals >= cfg.max_evals) break;
      fs[i] = eval(xs[i]);
    }
  }

  return result;
}

}  // namespace nvopt

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nvopt/simplex.hpp"

using namespace nvopt;

namespace {
SimplexConfig box3(double lo, double hi) {
  SimplexConfig cfg;
  cfg.bounds = {{lo, hi}, {lo, hi}, {lo, hi}};
  return cfg;
}
}  // namespace

TEST_CASE("nelder_mead climbs a concave quadratic to its peak") {
  auto f = [](const std::vector<double>& x) {
    return -((x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0) +
             (x[2] - 3.0) * (x[2] - 3.0));
  };
  SimplexConfig cfg = box3(-5.0, 5.0);
  cfg.max_evals = 2000;
  cfg.stall_tol = 1e-12;
  const SimplexResult res = nelder_mead(f, {0.0, 0.0, 0.0}, cfg);
  CHECK(std::abs(res.x[0] - 1.0) < 1e-4);
  CHECK(std::abs(res.x[1] - 2.0) < 1e-4);
  CHECK(std::abs(res.x[2] - 3.0) < 1e-4);
  CHECK(res.value > -1e-6);
  CHECK(res.evals <= cfg.max_evals);
}

TEST_CASE("every trial point stays inside the box") {
  bool escaped = false;
  auto f = [&](const std::vector<double>& x) {
    for (double v : x)
      if (v < -1.0 || v > 2.0) escaped = true;
    // peak far outside the box pushes the simplex against the wall
    return -((x[0] - 10.0) * (x[0] - 10.0)) - x[1] * x[1] - x[2] * x[2];
  };
  SimplexConfig cfg = box3(-1.0, 2.0);
  cfg.max_evals = 500;
  const SimplexResult res = nelder_mead(f, {0.0, 0.5, 0.5}, cfg);
  CHECK(!escaped);
  CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-6));
  // a start outside the box is clipped before evaluation
  const SimplexResult clipped = nelder_mead(f, {50.0, -50.0, 0.0}, cfg);
  CHECK(!escaped);
  CHECK(clipped.x[0] <= 2.0);
}

TEST_CASE("non-finite objective values never become the best") {
  auto f = [](const std::vector<double>& x) {
    if (x[0] < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -(x[0] - 1.0) * (x[0] - 1.0);
  };
  SimplexConfig cfg;
  cfg.bounds = {{-3.0, 3.0}};
  cfg.max_evals = 300;
  cfg.stall_tol = 1e-12;
  const SimplexResult res = nelder_mead(f, {0.5}, cfg);
  CHECK(res.x[0] >= 0.0);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-6));

  auto always_nan = [](const std::vector<double>&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  const SimplexResult hopeless = nelder_mead(always_nan, {0.5}, cfg);
  CHECK(hopeless.value == -std::numeric_limits<double>::infinity());
  CHECK(hopeless.evals == cfg.max_evals);
  CHECK(hopeless.x.size() == 1);
}

TEST_CASE("a flat objective stalls after the initial simplex") {
  auto f = [](const std::vector<double>&) { return 7.0; };
  SimplexConfig cfg = box3(0.0, 1.0);
  cfg.max_evals = 500;
  cfg.stall_tol = 1e-6;
  const SimplexResult res = nelder_mead(f, {0.5, 0.5, 0.5}, cfg);
  CHECK(res.evals == 4);  // dim + 1 vertex evaluations, then the spread is 0
  CHECK(res.value == 7.0);
}

TEST_CASE("the evaluation budget is a hard cap") {
  int calls = 0;
  auto f = [&](const std::vector<double>& x) {
    ++calls;
    return -x[0] * x[0] - x[1] * x[1] - x[2] * x[2];
  };
  SimplexConfig cfg = box3(-5.0, 5.0);
  cfg.max_evals = 5;
  cfg.stall_tol = 0.0;
  const SimplexResult res = nelder_mead(f, {4.0, 4.0, 4.0}, cfg);
  CHECK(calls <= 5);
  CHECK(res.evals == calls);
}

TEST_CASE("best_history records the running maximum per evaluation") {
  auto f = [](const std::vector<double>& x) {
    return -(x[0] - 1.0) * (x[0] - 1.0) - (x[1] + 2.0) * (x[1] + 2.0);
  };
  SimplexConfig cfg;
  cfg.bounds = {{-4.0, 4.0}, {-4.0, 4.0}};
  cfg.max_evals = 120;
  cfg.stall_tol = 1e-10;
  const SimplexResult res = nelder_mead(f, {3.0, 3.0}, cfg);
  REQUIRE(res.best_history.size() == static_cast<std::size_t>(res.evals));
  for (std::size_t i = 1; i < res.best_history.size(); ++i)
    CHECK(res.best_history[i] >= res.best_history[i - 1]);
  CHECK(res.best_history.back() == res.value);
  CHECK(res.best_history.front() == f({3.0, 3.0}));
}

TEST_CASE("identical calls give identical results") {
  auto f = [](const std::vector<double>& x) {
    return std::sin(3.0 * x[0]) + std::cos(2.0 * x[1]) - 0.1 * x[0] * x[0];
  };
  SimplexConfig cfg;
  cfg.bounds = {{-3.0, 3.0}, {-3.0, 3.0}};
  cfg.max_evals = 200;
  const SimplexResult a = nelder_mead(f, {0.3, -0.7}, cfg);
  const SimplexResult b = nelder_mead(f, {0.3, -0.7}, cfg);
  CHECK(a.value == b.value);
  CHECK(a.evals == b.evals);
  CHECK(a.x == b.x);
  CHECK(a.best_history == b.best_history);
}

TEST_CASE("bad bounds are rejected up front") {
  auto f = [](const std::vector<double>& x) { return -x[0] * x[0]; };
  SimplexConfig cfg;
  cfg.bounds = {{0.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(nelder_mead(f, {0.5}, cfg), std::invalid_argument);
  cfg.bounds = {{2.0, 1.0}};
  CHECK_THROWS_AS(nelder_mead(f, {0.5}, cfg), std::invalid_argument);
  cfg.bounds = {{1.0, 1.0}};  // degenerate but nonempty interval is allowed
  CHECK_NOTHROW(nelder_mead(f, {1.0}, cfg));
}

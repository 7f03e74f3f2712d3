#include "doctest.h"
#include "nvopt/propagator.hpp"
#include "oracles.hpp"

using namespace nvopt;

TEST_CASE("real coordinates invert and preserve the norm") {
  const PhysicalConstants c;
  const Propagator prop(build_interaction_model(c, 10, true));
  const Eigen::MatrixXcd rho = oracle::random_density(51, 10);
  const Eigen::VectorXd r = prop.to_real(rho);
  REQUIRE(r.size() == 100);
  CHECK((prop.to_matrix(r) - rho).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(r.norm() == doctest::Approx(rho.norm()).epsilon(1e-13));
  CHECK(prop.trace_of(r) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("real coordinate layout: diagonals first, then scaled pairs") {
  const PhysicalConstants c;
  const Propagator prop(build_interaction_model(c, 3, false));
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
  rho(0, 0) = 0.25;
  rho(1, 1) = 0.75;
  rho(0, 1) = std::complex<double>(0.1, -0.2);
  rho(1, 0) = std::conj(rho(0, 1));
  const Eigen::VectorXd r = prop.to_real(rho);
  REQUIRE(r.size() == 9);
  CHECK(r[0] == 0.25);
  CHECK(r[1] == 0.75);
  CHECK(r[2] == 0.0);
  const double sqrt2 = std::sqrt(2.0);
  // first off-diagonal pair is (0,1)
  CHECK(r[3] == doctest::Approx(sqrt2 * 0.1).epsilon(1e-15));
  CHECK(r[4] == doctest::Approx(-sqrt2 * (-0.2)).epsilon(1e-15));
}

TEST_CASE("real generators reproduce the complex maps") {
  const PhysicalConstants c;
  for (int dims : {4, 10}) {
    const NvModel m = build_interaction_model(c, dims, true);
    const Propagator prop(m);
    const Eigen::MatrixXcd rho = oracle::random_density(52 + dims, dims);
    const Eigen::VectorXd r = prop.to_real(rho);

    const Eigen::MatrixXcd drift = prop.to_matrix(prop.gen_static() * r);
    CHECK((drift - master_rhs(m, rho)).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::VectorXd cr(prop.vec_dim());
    prop.apply_coupling(r, cr);
    const Eigen::MatrixXcd coupled = prop.to_matrix(cr);
    CHECK((coupled - coupling_rhs(m, rho)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((prop.gen_coupling() * r - cr).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("real step equals the complex-space step") {
  const PhysicalConstants c;
  const NvModel m = build_interaction_model(c, 10, true);
  const Propagator prop(m);
  const Eigen::MatrixXcd rho = oracle::random_density(53, 10);
  Eigen::VectorXd r = prop.to_real(rho);
  StepWorkspace ws = prop.make_workspace();
  const double eps = 1.7, dt = 0.005;
  prop.step(r, eps, dt, ws);
  const Eigen::MatrixXcd via_complex =
      devectorize(step_propagate(vectorize(rho), prop.split(), eps, dt));
  CHECK((prop.to_matrix(r) - via_complex).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adjoint step is the transpose pairing") {
  const PhysicalConstants c;
  const Propagator prop(build_interaction_model(c, 4, true));
  RestartRng rng(54);
  Eigen::VectorXd r(prop.vec_dim()), w(prop.vec_dim());
  for (int i = 0; i < prop.vec_dim(); ++i) {
    r[i] = rng.uniform(-1.0, 1.0);
    w[i] = rng.uniform(-1.0, 1.0);
  }
  StepWorkspace ws = prop.make_workspace();
  Eigen::VectorXd stepped = r;
  prop.step(stepped, 0.9, 0.005, ws);
  Eigen::VectorXd adjointed = w;
  prop.step_adjoint(adjointed, 0.9, 0.005, ws);
  CHECK(w.dot(stepped) == doctest::Approx(adjointed.dot(r)).epsilon(1e-12));
}

TEST_CASE("trajectory records strided samples with diagnostics") {
  const PhysicalConstants c;
  const NvModel m = build_interaction_model(c, 10, true);
  ControlField f = gaussian_stirap(
      default_stirap_params(units::two_pi * 2.0, 0.5), 0.5, 0.005);
  bind_carriers(f, m);
  const std::vector<Level> record = {Level::minus_one, Level::plus_one,
                                     Level::a2};
  const Trajectory tr = propagate_trajectory(m, f, ground_start_state(m),
                                             record, 10);
  REQUIRE(tr.recorded == record);
  REQUIRE(tr.t.size() == tr.trace.size());
  REQUIRE(static_cast<Eigen::Index>(tr.t.size()) == tr.populations.rows());
  REQUIRE(tr.populations.cols() == 3);
  CHECK(tr.t.front() == 0.0);
  CHECK(tr.t.back() == doctest::Approx(0.5).epsilon(1e-12));
  // initial sample, every 10th segment, final segment
  CHECK(tr.t.size() == 11);
  CHECK(tr.populations(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tr.max_trace_drift < 1e-10);
  CHECK(tr.max_hermiticity_defect < 1e-10);
  CHECK(tr.min_eigenvalue > -1e-9);
  CHECK((tr.final_state - tr.final_state.adjoint()).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("trajectory populations stay physical under strong driving") {
  const PhysicalConstants c;
  const NvModel m = build_interaction_model(c, 10, true);
  ControlField f = constant_field(units::two_pi * 6.0, 0.3, 0.005);
  bind_carriers(f, m);
  const Trajectory tr =
      propagate_trajectory(m, f, ground_start_state(m), m.levels, 5);
  for (Eigen::Index i = 0; i < tr.populations.rows(); ++i) {
    for (Eigen::Index j = 0; j < tr.populations.cols(); ++j) {
      CHECK(tr.populations(i, j) > -1e-8);
      CHECK(tr.populations(i, j) < 1.0 + 1e-8);
    }
    CHECK(tr.trace[i] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("trajectory matches the RK4 oracle along the way") {
  const PhysicalConstants c;
  const NvModel m = build_interaction_model(c, 10, true);
  const LiouvillianSplit split = assemble_split(m);
  ControlField f = gaussian_stirap(
      default_stirap_params(units::two_pi * 3.0, 0.2), 0.2, 0.005);
  bind_carriers(f, m);
  const Eigen::MatrixXcd rho0 = ground_start_state(m);
  const Trajectory tr = propagate_trajectory(m, f, rho0, m.levels, 10);
  std::vector<Eigen::MatrixXcd> reference;
  oracle::rk4_propagate(split, f, rho0, 50, &reference, 10);
  // recorded samples: initial state, then every 10th segment (40 segments)
  REQUIRE(reference.size() + 1 == tr.t.size());
  for (std::size_t s = 0; s < reference.size(); ++s) {
    for (int k = 0; k < m.dims; ++k) {
      CHECK(tr.populations(static_cast<Eigen::Index>(s + 1), k) ==
            doctest::Approx(reference[s](k, k).real()).epsilon(5e-8).scale(1.0));
    }
  }
}

TEST_CASE("trajectory validates inputs") {
  const PhysicalConstants c;
  const NvModel m = build_interaction_model(c, 4, true);
  ControlField f = constant_field(1.0, 0.05, 0.005);
  bind_carriers(f, m);
  CHECK_THROWS_AS(
      propagate_trajectory(m, f, Eigen::MatrixXcd::Identity(3, 3), m.levels),
      std::invalid_argument);
  const std::vector<Level> bad = {Level::shelf};
  CHECK_THROWS_AS(
      propagate_trajectory(m, f, ground_start_state(m), bad),
      std::invalid_argument);
}

#include "nvopt/liouville.hpp"

#include <cmath>
#include <stdexcept>

namespace nvopt {

namespace {
constexpr std::complex<double> ci(0.0, 1.0);

// Shared Taylor core: v <- exp(a*t) v. Splits a*t into unit-norm stages and
// sums the series per stage with early termination.
template <typename Mat, typename Vec>
void expmv_impl(const Mat& a, double t, Vec& v, double tol) {
  const double anorm = a.cwiseAbs().colwise().sum().maxCoeff() * std::abs(t);
  if (anorm == 0.0) return;
  const int stages = std::max(1, static_cast<int>(std::ceil(anorm / 3.5)));
  const double h = t / stages;
  Vec term = v;
  for (int s = 0; s < stages; ++s) {
    term = v;
    double vmax = v.cwiseAbs().maxCoeff();
    for (int k = 1; k <= 64; ++k) {
      term = (a * term * (h / k)).eval();
      v += term;
      vmax = std::max(vmax, v.cwiseAbs().maxCoeff());
      if (term.cwiseAbs().maxCoeff() <= tol * vmax) break;
    }
  }
}
}  // namespace

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("vectorize: matrix must be square");
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v) {
  const int d = static_cast<int>(std::lround(std::sqrt(double(v.size()))));
  if (static_cast<Eigen::Index>(d) * d != v.size())
    throw std::invalid_argument("devectorize: length is not a perfect square");
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

Eigen::MatrixXcd master_rhs(const NvModel& m, const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd out = -ci * (m.h_static * rho - rho * m.h_static);
  for (const auto& ch : m.jumps) {
    const int f = m.index_of(ch.from);
    const int t = m.index_of(ch.to);
    out(t, t) += ch.rate * rho(f, f);
    out.row(f) -= (0.5 * ch.rate) * rho.row(f);
    out.col(f) -= (0.5 * ch.rate) * rho.col(f);
  }
  return out;
}

Eigen::MatrixXcd coupling_rhs(const NvModel& m, const Eigen::MatrixXcd& rho) {
  return -ci * (m.v_pattern * rho - rho * m.v_pattern);
}

LiouvillianSplit assemble_split(const NvModel& m) {
  const int d = m.dims;
  const int dd = d * d;
  LiouvillianSplit out;
  out.l0.resize(dd, dd);
  out.leps.resize(dd, dd);
  Eigen::MatrixXcd probe = Eigen::MatrixXcd::Zero(d, d);
  for (int l = 0; l < dd; ++l) {
    const int mm = l % d;
    const int nn = l / d;
    probe(mm, nn) = 1.0;
    out.l0.col(l) = vectorize(master_rhs(m, probe));
    out.leps.col(l) = vectorize(coupling_rhs(m, probe));
    probe(mm, nn) = 0.0;
  }
  return out;
}

void expmv_inplace(const Eigen::MatrixXd& a, double t, Eigen::VectorXd& v,
                   double tol) {
  expmv_impl(a, t, v, tol);
}

void expmv_inplace(const Eigen::MatrixXcd& a, double t, Eigen::VectorXcd& v,
                   double tol) {
  expmv_impl(a, t, v, tol);
}

Eigen::VectorXcd step_propagate(const Eigen::VectorXcd& rho_vec,
                                const LiouvillianSplit& l, double eps_value,
                                double dt) {
  if (!(dt > 0.0))
    throw std::invalid_argument("step_propagate: dt must be positive");
  if (!std::isfinite(eps_value) || !rho_vec.allFinite())
    throw std::invalid_argument("step_propagate: non-finite input");
  Eigen::MatrixXcd gen = l.l0 + eps_value * l.leps;
  Eigen::VectorXcd v = rho_vec;
  expmv_inplace(gen, dt, v);
  return v;
}

double population(const Eigen::MatrixXcd& rho, int k) {
  return rho(k, k).real();
}

}  // namespace nvopt

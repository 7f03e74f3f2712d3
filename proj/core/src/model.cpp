#include "nvopt/model.hpp"

#include <complex>
#include <sstream>
#include <stdexcept>

namespace nvopt {

namespace {
constexpr std::complex<double> ci(0.0, 1.0);

constexpr const char* labels[n_levels] = {"-1", "0",  "+1", "A2", "A1",
                                          "EX", "EY", "E1", "E2", "10"};
constexpr const char* columns[n_levels] = {
    "P_minus1", "P_0",  "P_plus1", "P_A2", "P_A1",
    "P_EX",     "P_EY", "P_E1",    "P_E2", "P_10"};
}  // namespace

const char* level_label(Level k) { return labels[static_cast<int>(k)]; }
const char* level_column_name(Level k) { return columns[static_cast<int>(k)]; }

std::optional<Level> level_from_label(std::string_view label) {
  for (int i = 0; i < n_levels; ++i)
    if (label == labels[i]) return static_cast<Level>(i);
  return std::nullopt;
}

double decay_rate(Level from, Level to) {
  const bool spin_mixed = from == Level::a2 || from == Level::a1 ||
                          from == Level::e1 || from == Level::e2;
  if (spin_mixed) {
    if (to == Level::plus_one) return 1.0 / 24.0;
    if (to == Level::minus_one) return 1.0 / 31.0;
    if (to == Level::zero) return 1.0 / 104.0;
    if (to == Level::shelf) return 1.0 / 33.0;
    return 0.0;
  }
  if (from == Level::ex || from == Level::ey) {
    if (to == Level::zero) return 1.0 / 13.0;
    if (to == Level::plus_one || to == Level::minus_one) return 1.0 / 666.0;
    return 0.0;  // no shelving from the E_x/E_y branch
  }
  if (from == Level::shelf && to == Level::zero) return 1.0 / 303.0;
  return 0.0;
}

Eigen::Matrix3cd build_ground_hamiltonian(const PhysicalConstants& c) {
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(0, 0) = c.d_gs - c.zeeman_gs;
  h(2, 2) = c.d_gs + c.zeeman_gs;
  return h;
}

Eigen::MatrixXcd build_excited_hamiltonian(const PhysicalConstants& c) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(6, 6);
  // (A2, A1) pair, mixed by the transverse Zeeman term
  h(0, 0) = c.delta_ss + 2.0 * c.l_z;
  h(1, 1) = -c.delta_ss + 2.0 * c.l_z;
  h(0, 1) = c.zeeman_es;
  h(1, 0) = c.zeeman_es;
  // (E_X, E_Y, E_1, E_2) branch
  h(2, 2) = -c.d_es + c.l_z;
  h(3, 3) = -c.d_es + c.l_z;
  h(2, 5) = c.delta_pp;
  h(5, 2) = c.delta_pp;
  h(3, 4) = ci * c.delta_pp;
  h(4, 3) = -ci * c.delta_pp;
  h(4, 5) = -c.zeeman_es;
  h(5, 4) = -c.zeeman_es;
  return h;
}

Eigen::MatrixXcd build_dipole_pattern() {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n_levels, n_levels);
  // ground row x excited column entries at unit field; E_X column dark,
  // shelf row/column dark
  v(0, 3) = ci;
  v(0, 4) = -ci;
  v(0, 7) = -ci;
  v(0, 8) = -ci;
  v(1, 6) = 2.0;
  v(2, 3) = -ci;
  v(2, 4) = -ci;
  v(2, 7) = ci;
  v(2, 8) = -ci;
  v += Eigen::MatrixXcd(v.adjoint());
  return v;
}

int NvModel::index_of(Level k) const {
  for (int i = 0; i < dims; ++i)
    if (levels[i] == k) return i;
  return -1;
}

NvModel build_interaction_model(const PhysicalConstants& c, int dims,
                                bool dissipation) {
  if (auto bad = c.validate(); !bad.empty()) {
    std::ostringstream os;
    os << "invalid physical constants:";
    for (const auto& s : bad) os << " " << s << ";";
    throw std::invalid_argument(os.str());
  }

  NvModel m;
  m.dims = dims;
  switch (dims) {
    case 10:
      for (int i = 0; i < n_levels; ++i)
        m.levels.push_back(static_cast<Level>(i));
      break;
    case 4:
      m.levels = {Level::minus_one, Level::zero, Level::plus_one, Level::a2};
      break;
    case 3:
      m.levels = {Level::minus_one, Level::a2, Level::plus_one};
      break;
    default:
      throw std::invalid_argument("model dims must be 3, 4, or 10, got " +
                                  std::to_string(dims));
  }

  Eigen::MatrixXcd h10 = Eigen::MatrixXcd::Zero(n_levels, n_levels);
  h10.topLeftCorner(3, 3) = build_ground_hamiltonian(c);
  h10.block(3, 3, 6, 6) = build_excited_hamiltonian(c);
  // shelf energy pinned to 0: it is never coherently driven
  const Eigen::MatrixXcd v10 = build_dipole_pattern();

  m.h_static.resize(dims, dims);
  m.v_pattern.resize(dims, dims);
  for (int i = 0; i < dims; ++i) {
    for (int j = 0; j < dims; ++j) {
      const int gi = static_cast<int>(m.levels[i]);
      const int gj = static_cast<int>(m.levels[j]);
      m.h_static(i, j) = h10(gi, gj);
      m.v_pattern(i, j) = v10(gi, gj);
    }
  }

  if (dissipation && dims != 3) {
    for (Level from : m.levels) {
      for (Level to : m.levels) {
        const double r = decay_rate(from, to);
        if (r > 0.0) m.jumps.push_back({from, to, r});
      }
    }
  }

  const double omega_a = c.delta_ss + 2.0 * c.l_z;
  m.delta1 = omega_a - (c.d_gs - c.zeeman_gs);
  m.delta2 = omega_a - (c.d_gs + c.zeeman_gs);
  return m;
}

}  // namespace nvopt

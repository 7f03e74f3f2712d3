#include "nvopt/constants.hpp"

#include <cmath>

namespace nvopt {

std::vector<std::string> PhysicalConstants::validate() const {
  std::vector<std::string> bad;
  auto finite = [&](double v, const char* name) {
    if (!std::isfinite(v)) bad.push_back(std::string(name) + " is not finite");
  };
  finite(d_gs, "d_gs");
  finite(g_gs, "g_gs");
  finite(d_es, "d_es");
  finite(delta_ss, "delta_ss");
  finite(delta_pp, "delta_pp");
  finite(l_z, "l_z");
  finite(g_es, "g_es");
  finite(e_g, "e_g");
  finite(zeeman_gs, "zeeman_gs");
  finite(zeeman_es, "zeeman_es");
  if (d_gs <= 0.0) bad.push_back("d_gs must be positive");
  if (d_es <= 0.0) bad.push_back("d_es must be positive");
  if (g_gs <= 0.0) bad.push_back("g_gs must be positive");
  if (g_es <= 0.0) bad.push_back("g_es must be positive");
  return bad;
}

}  // namespace nvopt

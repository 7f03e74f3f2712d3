#include "nvopt/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nvopt {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {
double to_internal(double file_value, units::AmplitudeConvention conv) {
  return units::ghz_to_rad_ns(file_value, conv);
}
double to_file(double internal, units::AmplitudeConvention conv) {
  return units::rad_ns_to_ghz(internal, conv);
}

nlohmann::json array_to_file(const Eigen::ArrayXd& a,
                             units::AmplitudeConvention conv) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.push_back(to_file(a[i], conv));
  return out;
}
}  // namespace

nlohmann::json pulse_to_json(const ControlField& f,
                             units::AmplitudeConvention conv) {
  return nlohmann::json{
      {"T_ns", f.T},
      {"dt_ns", f.dt},
      {"resolution_ns", f.resolution},
      {"Delta_GHz", to_file(f.delta_global, conv)},
      {"omega1_GHz", array_to_file(f.omega1, conv)},
      {"omega2_GHz", array_to_file(f.omega2, conv)},
      {"convention", units::convention_name(conv)},
  };
}

ControlField pulse_from_json(const nlohmann::json& j) {
  for (const char* key : {"T_ns", "dt_ns", "resolution_ns", "Delta_GHz",
                          "omega1_GHz", "omega2_GHz", "convention"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("pulse file: missing key \"") +
                                  key + "\"");
  const std::string conv_name = j["convention"].get<std::string>();
  units::AmplitudeConvention conv;
  if (conv_name == "angular")
    conv = units::AmplitudeConvention::angular;
  else if (conv_name == "plain")
    conv = units::AmplitudeConvention::plain;
  else
    throw std::invalid_argument("pulse file: unknown convention \"" +
                                conv_name + "\"");
  ControlField f;
  f.T = j["T_ns"].get<double>();
  f.dt = j["dt_ns"].get<double>();
  f.resolution = j["resolution_ns"].get<double>();
  f.delta_global = to_internal(j["Delta_GHz"].get<double>(), conv);
  const auto& o1 = j["omega1_GHz"];
  const auto& o2 = j["omega2_GHz"];
  if (!o1.is_array() || !o2.is_array() || o1.size() != o2.size())
    throw std::invalid_argument(
        "pulse file: omega arrays must be equal-length arrays");
  f.omega1.resize(static_cast<Eigen::Index>(o1.size()));
  f.omega2.resize(static_cast<Eigen::Index>(o2.size()));
  for (std::size_t i = 0; i < o1.size(); ++i) {
    f.omega1[static_cast<Eigen::Index>(i)] =
        to_internal(o1[i].get<double>(), conv);
    f.omega2[static_cast<Eigen::Index>(i)] =
        to_internal(o2[i].get<double>(), conv);
  }
  if (f.n_segments() != segment_count(f.T, f.dt))
    throw std::invalid_argument(
        "pulse file: omega array length does not match T_ns/dt_ns");
  return f;
}

nlohmann::json run_to_json(const OptimizationRun& run,
                           units::AmplitudeConvention conv) {
  return nlohmann::json{
      {"seed", run.seed},
      {"method", run.method},
      {"phi_history", run.phi_history},
      {"best_pulse", pulse_to_json(run.best_field, conv)},
      {"phi", run.phi},
      {"p3", run.p3},
      {"p4bar", run.p4bar},
      {"E", run.energy},
      {"max_amplitude_GHz", to_file(run.max_amplitude, conv)},
      {"iters", run.iters},
      {"wall_time_s", run.wall_time_s},
  };
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr,
                          const std::string& config_hash_hex,
                          units::AmplitudeConvention conv) {
  std::ostringstream os;
  os << "# nvopt " << nvopt_version << " trajectory\n";
  os << "# config=" << config_hash_hex << "\n";
  os << "# convention=" << units::convention_name(conv) << "\n";
  os << "t_ns";
  for (Level k : tr.recorded) os << "," << level_column_name(k);
  os << ",trace\n";
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    os << format_double(tr.t[i]);
    for (Eigen::Index c = 0; c < tr.populations.cols(); ++c)
      os << "," << format_double(tr.populations(static_cast<Eigen::Index>(i), c));
    os << "," << format_double(tr.trace[i]) << "\n";
  }
  write_text_file(path, os.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace nvopt

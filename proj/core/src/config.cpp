#include "nvopt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace nvopt {

using nlohmann::json;

PhysicalConstants ConstantsConfig::to_physical() const {
  PhysicalConstants c;
  c.d_gs = units::two_pi * d_gs_ghz;
  c.g_gs = g_gs;
  c.d_es = units::two_pi * d_es_ghz;
  c.delta_ss = units::two_pi * delta_ss_ghz;
  c.delta_pp = units::two_pi * delta_pp_ghz;
  c.l_z = units::two_pi * l_z_ghz;
  c.g_es = g_es;
  c.e_g = units::two_pi * e_g_thz * 1000.0;  // THz quoted, rad/ns internally
  c.zeeman_gs = units::two_pi * zeeman_gs_ghz;
  c.zeeman_es = units::two_pi * zeeman_es_ghz;
  return c;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&violations] {
        std::ostringstream os;
        os << "invalid configuration (" << violations.size() << " problem"
           << (violations.size() == 1 ? "" : "s") << "):";
        for (const auto& v : violations) os << "\n  - " << v;
        return os.str();
      }()),
      violations_(std::move(violations)) {}

namespace {

// Strict reader over one JSON object: typed accessors register known keys,
// finish() flags everything that was never asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where,
               std::vector<std::string>& out)
      : j_(j), where_(std::move(where)), out_(out) {}

  bool has(const char* key) const { return j_.contains(key); }

  double number(const char* key, double def) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number()) {
      complain(key, "expected a number");
      return def;
    }
    return j_[key].get<double>();
  }

  double number_min(const char* key, double def, double min,
                    bool exclusive = false) {
    const double v = number(key, def);
    if (exclusive ? !(v > min) : !(v >= min)) {
      std::ostringstream os;
      os << "must be " << (exclusive ? "> " : ">= ") << min << " (got " << v
         << ")";
      complain(key, os.str());
      return def;
    }
    return v;
  }

  int integer_min(const char* key, int def, int min) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number_integer()) {
      complain(key, "expected an integer");
      return def;
    }
    const auto v = j_[key].get<long long>();
    if (v < min) {
      complain(key, "must be >= " + std::to_string(min));
      return def;
    }
    return static_cast<int>(v);
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t def) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number_unsigned() &&
        !(j_[key].is_number_integer() && j_[key].get<long long>() >= 0)) {
      complain(key, "expected a non-negative integer");
      return def;
    }
    return j_[key].get<std::uint64_t>();
  }

  bool boolean(const char* key, bool def) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_[key].is_boolean()) {
      complain(key, "expected a boolean");
      return def;
    }
    return j_[key].get<bool>();
  }

  std::string string(const char* key, std::string def) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_[key].is_string()) {
      complain(key, "expected a string");
      return def;
    }
    return j_[key].get<std::string>();
  }

  std::string string_choice(const char* key, std::string def,
                            const std::set<std::string>& allowed) {
    const std::string v = string(key, def);
    if (!allowed.count(v)) {
      std::ostringstream os;
      os << "must be one of {";
      bool first = true;
      for (const auto& a : allowed) {
        os << (first ? "" : ", ") << a;
        first = false;
      }
      os << "} (got \"" << v << "\")";
      complain(key, os.str());
      return def;
    }
    return v;
  }

  std::vector<double> number_list(const char* key, std::vector<double> def,
                                  double min, bool exclusive) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_[key].is_array()) {
      complain(key, "expected an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (const auto& e : j_[key]) {
      if (!e.is_number()) {
        complain(key, "expected an array of numbers");
        return def;
      }
      const double v = e.get<double>();
      if (exclusive ? !(v > min) : !(v >= min)) {
        std::ostringstream os;
        os << "entries must be " << (exclusive ? "> " : ">= ") << min;
        complain(key, os.str());
        return def;
      }
      out.push_back(v);
    }
    if (out.empty()) {
      complain(key, "must not be empty");
      return def;
    }
    return out;
  }

  std::vector<std::string> string_list(const char* key,
                                       std::vector<std::string> def) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_[key].is_array()) {
      complain(key, "expected an array of strings");
      return def;
    }
    std::vector<std::string> out;
    for (const auto& e : j_[key]) {
      if (!e.is_string()) {
        complain(key, "expected an array of strings");
        return def;
      }
      out.push_back(e.get<std::string>());
    }
    if (out.empty()) {
      complain(key, "must not be empty");
      return def;
    }
    return out;
  }

  const json* object(const char* key) {
    known_.insert(key);
    if (!j_.contains(key)) return nullptr;
    if (!j_[key].is_object()) {
      complain(key, "expected an object");
      return nullptr;
    }
    return &j_[key];
  }

  const json* array(const char* key) {
    known_.insert(key);
    if (!j_.contains(key)) return nullptr;
    if (!j_[key].is_array()) {
      complain(key, "expected an array");
      return nullptr;
    }
    return &j_[key];
  }

  void finish() {
    for (const auto& item : j_.items())
      if (!known_.count(item.key()))
        out_.push_back("unknown key \"" + item.key() + "\" in " + where_);
  }

  void complain(const char* key, const std::string& what) {
    out_.push_back("key \"" + std::string(key) + "\" in " + where_ + ": " +
                   what);
  }

 private:
  const json& j_;
  std::string where_;
  std::vector<std::string>& out_;
  std::set<std::string> known_;
};

ConstantsConfig read_constants(const json& j, std::vector<std::string>& out) {
  ConstantsConfig c;
  ObjectReader r(j, "constants", out);
  c.d_gs_ghz = r.number_min("D_gs_GHz", c.d_gs_ghz, 0.0, true);
  c.g_gs = r.number_min("g_gs", c.g_gs, 0.0, true);
  c.d_es_ghz = r.number_min("D_es_GHz", c.d_es_ghz, 0.0, true);
  c.delta_ss_ghz = r.number("Delta_ss_GHz", c.delta_ss_ghz);
  c.delta_pp_ghz = r.number("Delta_pp_GHz", c.delta_pp_ghz);
  c.l_z_ghz = r.number("l_z_GHz", c.l_z_ghz);
  c.g_es = r.number_min("g_es", c.g_es, 0.0, true);
  c.e_g_thz = r.number_min("E_g_THz", c.e_g_thz, 0.0, true);
  c.zeeman_gs_ghz = r.number("zeeman_gs_GHz", c.zeeman_gs_ghz);
  c.zeeman_es_ghz = r.number("zeeman_es_GHz", c.zeeman_es_ghz);
  r.finish();
  return c;
}

const std::set<std::string> kKinds = {"simulate",   "stirap-scan",
                                      "optimize",   "robustness",
                                      "resolution", "dt-convergence"};

bool valid_method_name(const std::string& name) {
  return name == "adiabatic-nm" || name == "adiabatic-grape" ||
         name == "rabi-resonant" || name == "rabi-detuning";
}

ExperimentConfig read_experiment(const json& j, int index,
                                 std::vector<std::string>& out) {
  ExperimentConfig e;
  const std::string where = "experiments[" + std::to_string(index) + "]";
  ObjectReader r(j, where, out);
  e.kind = r.string_choice("kind", e.kind, kKinds);
  e.label = r.string("label", e.kind);
  e.dims = r.integer_min("dims", e.dims, 3);
  if (e.dims != 3 && e.dims != 4 && e.dims != 10)
    r.complain("dims", "must be 3, 4, or 10");
  e.dissipation = r.boolean("dissipation", e.dissipation);
  e.T_ns = r.number_list("T_ns", e.T_ns, 0.0, true);
  e.amplitudes_ghz = r.number_list("amplitudes_GHz", e.amplitudes_ghz, 0.0, false);
  e.methods = r.string_list("methods", e.methods);
  for (const auto& m : e.methods)
    if (!valid_method_name(m))
      r.complain("methods", "unknown method \"" + m +
                                "\" (allowed: adiabatic-nm, adiabatic-grape, "
                                "rabi-resonant, rabi-detuning)");
  e.n_restarts = r.integer_min("n_restarts", e.n_restarts, 1);
  e.seed = r.unsigned_integer("seed", e.seed);
  e.resolution_ns = r.number_min("resolution_ns", e.resolution_ns, 0.0);
  e.lambda = r.number("lambda", e.lambda);
  e.lambda_energy = r.number("lambda_E", e.lambda_energy);
  e.step_eps = r.number_min("step_eps", e.step_eps, 0.0, true);
  e.max_iters = r.integer_min("max_iters", e.max_iters, 1);
  e.convergence_window = r.integer_min("convergence_window",
                                       e.convergence_window, 1);
  e.convergence_tol = r.number_min("convergence_tol", e.convergence_tol, 0.0, true);
  e.amplitude_cap_ghz = r.number_min("amplitude_cap_GHz",
                                     e.amplitude_cap_ghz, 0.0, true);
  e.clamp_nonnegative = r.boolean("clamp_nonnegative", e.clamp_nonnegative);
  e.nm_max_evals = r.integer_min("nm_max_evals", e.nm_max_evals, 4);
  e.nm_stall_tol = r.number_min("nm_stall_tol", e.nm_stall_tol, 0.0, true);
  e.grid_amp_min = r.number_min("grid_amp_min", e.grid_amp_min, -1.0);
  e.grid_amp_max = r.number("grid_amp_max", e.grid_amp_max);
  e.grid_amp_points = r.integer_min("grid_amp_points", e.grid_amp_points, 1);
  e.grid_det_min_ghz = r.number("grid_det_min_GHz", e.grid_det_min_ghz);
  e.grid_det_max_ghz = r.number("grid_det_max_GHz", e.grid_det_max_ghz);
  e.grid_det_points = r.integer_min("grid_det_points", e.grid_det_points, 1);
  e.dt_ladder_ns = r.number_list("dt_ladder_ns", e.dt_ladder_ns, 0.0, true);
  r.finish();
  return e;
}

}  // namespace

Config config_from_json(const json& j) {
  std::vector<std::string> out;
  if (!j.is_object()) {
    out.push_back("top level: expected a JSON object");
    throw ConfigError(std::move(out));
  }
  Config c;
  ObjectReader r(j, "top level", out);
  if (const json* jc = r.object("constants"))
    c.constants = read_constants(*jc, out);
  c.dt_ns = r.number_min("dt_ns", c.dt_ns, 0.0, true);
  c.amplitude_convention = r.string_choice(
      "amplitude_convention", c.amplitude_convention, {"angular", "plain"});
  c.sampling = r.string_choice("sampling", c.sampling,
                               {"average", "midpoint", "left-edge"});
  c.output_dir = r.string("output_dir", c.output_dir);
  c.workers = r.integer_min("workers", c.workers, 0);
  if (const json* je = r.array("experiments")) {
    int index = 0;
    for (const auto& e : *je) {
      if (!e.is_object()) {
        out.push_back("experiments[" + std::to_string(index) +
                      "]: expected an object");
      } else {
        c.experiments.push_back(read_experiment(e, index, out));
      }
      ++index;
    }
  }
  r.finish();

  std::set<std::string> labels;
  for (const auto& e : c.experiments)
    if (!labels.insert(e.label).second)
      out.push_back("duplicate experiment label \"" + e.label + "\"");

  for (const auto& v : c.constants.to_physical().validate())
    out.push_back("constants: " + v);

  if (!out.empty()) throw ConfigError(std::move(out));
  return c;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError({"cannot open config file: " + path});
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  return config_from_json(j);
}

nlohmann::json effective_config_json(const Config& c) {
  json jc = {
      {"D_gs_GHz", c.constants.d_gs_ghz},
      {"g_gs", c.constants.g_gs},
      {"D_es_GHz", c.constants.d_es_ghz},
      {"Delta_ss_GHz", c.constants.delta_ss_ghz},
      {"Delta_pp_GHz", c.constants.delta_pp_ghz},
      {"l_z_GHz", c.constants.l_z_ghz},
      {"g_es", c.constants.g_es},
      {"E_g_THz", c.constants.e_g_thz},
      {"zeeman_gs_GHz", c.constants.zeeman_gs_ghz},
      {"zeeman_es_GHz", c.constants.zeeman_es_ghz},
  };
  json experiments = json::array();
  for (const auto& e : c.experiments) {
    experiments.push_back({
        {"kind", e.kind},
        {"label", e.label},
        {"dims", e.dims},
        {"dissipation", e.dissipation},
        {"T_ns", e.T_ns},
        {"amplitudes_GHz", e.amplitudes_ghz},
        {"methods", e.methods},
        {"n_restarts", e.n_restarts},
        {"seed", e.seed},
        {"resolution_ns", e.resolution_ns},
        {"lambda", e.lambda},
        {"lambda_E", e.lambda_energy},
        {"step_eps", e.step_eps},
        {"max_iters", e.max_iters},
        {"convergence_window", e.convergence_window},
        {"convergence_tol", e.convergence_tol},
        {"amplitude_cap_GHz", e.amplitude_cap_ghz},
        {"clamp_nonnegative", e.clamp_nonnegative},
        {"nm_max_evals", e.nm_max_evals},
        {"nm_stall_tol", e.nm_stall_tol},
        {"grid_amp_min", e.grid_amp_min},
        {"grid_amp_max", e.grid_amp_max},
        {"grid_amp_points", e.grid_amp_points},
        {"grid_det_min_GHz", e.grid_det_min_ghz},
        {"grid_det_max_GHz", e.grid_det_max_ghz},
        {"grid_det_points", e.grid_det_points},
        {"dt_ladder_ns", e.dt_ladder_ns},
    });
  }
  return json{{"constants", jc},
              {"dt_ns", c.dt_ns},
              {"amplitude_convention", c.amplitude_convention},
              {"sampling", c.sampling},
              {"output_dir", c.output_dir},
              {"workers", c.workers},
              {"experiments", experiments}};
}

std::uint64_t config_hash(const Config& c) {
  const std::string s = effective_config_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const Config& c) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(c)));
  return buf;
}

units::AmplitudeConvention convention_of(const Config& c) {
  return c.amplitude_convention == "plain"
             ? units::AmplitudeConvention::plain
             : units::AmplitudeConvention::angular;
}

SegmentSampling sampling_of(const Config& c) {
  if (c.sampling == "left-edge") return SegmentSampling::left_edge;
  if (c.sampling == "midpoint") return SegmentSampling::midpoint;
  return SegmentSampling::average;
}

}  // namespace nvopt

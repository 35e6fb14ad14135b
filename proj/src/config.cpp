#include "anisores/config.hpp"

#include "anisores/fft.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace anisores {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const std::set<std::string> kExperiments = {
    "partition-check", "cones", "resonances", "ly-probe",
    "dolgopyat-probe", "tau-verify", "horo-fit", "ibp-check"};

}  // namespace

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "[run]\n"
     << "experiment = " << experiment << "\n"
     << "seed = " << seed << "\n"
     << "out = " << out_dir << "\n"
     << "[backend]\n"
     << "kind = " << backend << "\n"
     << "eps = " << eps << "\n"
     << "eps2 = " << eps2 << "\n"
     << "[index]\n"
     << "s = " << s << "\nt = " << t << "\nq = " << q << "\np = " << p << "\n"
     << "[partition]\n"
     << "chi_order = " << chi_order << "\nmax_level = " << max_level << "\ngrid = " << grid
     << "\n"
     << "[cones]\n"
     << "cone_halfwidth_deg = " << cone_halfwidth_deg
     << "\ntransition_width_deg = " << transition_width_deg << "\n"
     << "[transfer]\n"
     << "K = " << K << "\nalpha = " << alpha << "\n"
     << "[horocycle]\n"
     << "cutoff_eps = " << cutoff_eps << "\nt_max = " << t_max << "\nt_points = " << t_points
     << "\n"
     << "[tolerances]\n"
     << "margin_tol = " << margin_tol << "\nstability_tol = " << stability_tol << "\n";
  return os.str();
}

uint64_t RunConfig::hash() const {
  const std::string s = serialize();
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig parse_config(const std::string& text, std::vector<ConfigError>& errors) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section = "run";
  std::map<std::string, std::string> kv;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find_first_of("#;");
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back({"line " + std::to_string(lineno), "malformed section header"});
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back({"line " + std::to_string(lineno), "expected key = value"});
      continue;
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    kv[key] = trim(line.substr(eq + 1));
  }

  auto take_str = [&](const std::string& key, std::string& dst) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      dst = it->second;
      kv.erase(it);
    }
  };
  auto take_double = [&](const std::string& key, double& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    try {
      size_t pos = 0;
      dst = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
    } catch (...) {
      errors.push_back({key, "not a number: '" + it->second + "'"});
    }
    kv.erase(it);
  };
  auto take_int = [&](const std::string& key, auto& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    try {
      size_t pos = 0;
      const long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    } catch (...) {
      errors.push_back({key, "not an integer: '" + it->second + "'"});
    }
    kv.erase(it);
  };

  take_str("run.experiment", cfg.experiment);
  take_int("run.seed", cfg.seed);
  take_str("run.out", cfg.out_dir);
  take_str("backend.kind", cfg.backend);
  take_double("backend.eps", cfg.eps);
  take_double("backend.eps2", cfg.eps2);
  take_double("index.s", cfg.s);
  take_double("index.t", cfg.t);
  take_double("index.q", cfg.q);
  take_double("index.p", cfg.p);
  take_int("partition.chi_order", cfg.chi_order);
  take_int("partition.max_level", cfg.max_level);
  take_int("partition.grid", cfg.grid);
  take_double("cones.cone_halfwidth_deg", cfg.cone_halfwidth_deg);
  take_double("cones.transition_width_deg", cfg.transition_width_deg);
  take_int("transfer.K", cfg.K);
  take_int("transfer.alpha", cfg.alpha);
  take_double("horocycle.cutoff_eps", cfg.cutoff_eps);
  take_double("horocycle.t_max", cfg.t_max);
  take_int("horocycle.t_points", cfg.t_points);
  take_double("tolerances.margin_tol", cfg.margin_tol);
  take_double("tolerances.stability_tol", cfg.stability_tol);

  for (const auto& rest : kv) errors.push_back({rest.first, "unknown key"});

  // semantic validation (collect everything)
  if (!kExperiments.count(cfg.experiment))
    errors.push_back({"run.experiment", "unknown experiment '" + cfg.experiment + "'"});
  if (cfg.backend != "linear_cat" && cfg.backend != "perturbed_cat" && cfg.backend != "suspension")
    errors.push_back({"backend.kind", "unknown backend '" + cfg.backend + "'"});
  if (cfg.chi_order < 2) errors.push_back({"partition.chi_order", "must be >= 2"});
  if (cfg.max_level < 1) errors.push_back({"partition.max_level", "must be >= 1"});
  if (!anisores::is_power_of_two(cfg.grid)) errors.push_back({"partition.grid", "must be a power of two"});
  if (cfg.K < 4) errors.push_back({"transfer.K", "must be >= 4"});
  if (cfg.grid < 4 * cfg.K) errors.push_back({"partition.grid", "anti-aliasing needs grid >= 4K"});
  if (!(cfg.p > 1.0)) errors.push_back({"index.p", "must be > 1"});
  const bool ly_mode = cfg.experiment == "ly-probe" || cfg.experiment == "resonances" ||
                       cfg.experiment == "dolgopyat-probe" || cfg.experiment == "horo-fit";
  if (ly_mode && !(cfg.s < 0.0 && 0.0 < cfg.q && cfg.q <= cfg.t)) {
    if (!(cfg.s < 0.0)) errors.push_back({"index.s", "must be < 0 in Lasota-Yorke mode"});
    if (!(0.0 < cfg.q && cfg.q <= cfg.t))
      errors.push_back({"index.q", "must satisfy 0 < q <= t in Lasota-Yorke mode"});
  }
  if (!(cfg.cutoff_eps > 0.0 && cfg.cutoff_eps <= 0.25))
    errors.push_back({"horocycle.cutoff_eps", "must lie in (0, 1/4]"});
  if (cfg.t_points < 2) errors.push_back({"horocycle.t_points", "must be >= 2"});
  if (cfg.backend == "perturbed_cat" && std::abs(cfg.eps) > 0.05)
    errors.push_back({"backend.eps", "perturbed_cat needs |eps| <= 0.05"});
  if (cfg.backend == "suspension" && !(cfg.eps2 >= 0.0 && cfg.eps2 < 1.0))
    errors.push_back({"backend.eps2", "suspension roof needs 0 <= eps2 < 1"});
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  std::vector<ConfigError> errors;
  RunConfig cfg = parse_config(text, errors);
  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  " + e.key + ": " + e.message;
    throw InvalidParameter(msg);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidParameter("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace anisores

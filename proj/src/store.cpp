#include "anisores/store.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace anisores {

namespace fs = std::filesystem;

ResultStore::ResultStore(const RunConfig& cfg, std::string dir) : cfg_(cfg), dir_(std::move(dir)) {
  fs::create_directories(dir_);
  write_manifest("started");
}

void ResultStore::write_manifest(const std::string& stage_status) const {
  nlohmann::json m;
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, cfg_.hash());
  m["config_hash"] = hex;
  m["experiment"] = cfg_.experiment;
  m["seed"] = cfg_.seed;
  m["status"] = stage_status;
  m["version"] = "anisores-1";
  m["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  m["config"] = cfg_.serialize();
  nlohmann::json verds = nlohmann::json::array();
  for (const auto& v : verdicts_)
    verds.push_back({{"name", v.name}, {"pass", v.pass}, {"value", v.value}, {"threshold", v.threshold}});
  m["verdicts"] = verds;
  std::ofstream f(dir_ + "/manifest.json");
  f << m.dump(2) << "\n";
}

void ResultStore::add_series(const std::string& name, Series s) { series_[name] = std::move(s); }

void ResultStore::add_verdict(const std::string& name, bool pass, double value, double threshold) {
  verdicts_.push_back({name, pass, value, threshold});
}

void ResultStore::add_json(const std::string& name, const std::string& json_text) {
  json_[name] = json_text;
}

void ResultStore::flush() {
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, cfg_.hash());
  for (const auto& [name, s] : series_) {
    std::ofstream f(dir_ + "/" + name + ".csv");
    f << "# anisores-csv v1 config=" << hex << "\n";
    for (size_t c = 0; c < s.columns.size(); ++c)
      f << s.columns[c] << (c + 1 < s.columns.size() ? "," : "\n");
    char buf[64];
    for (const auto& row : s.rows) {
      for (size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
        f << buf << (c + 1 < row.size() ? "," : "\n");
      }
    }
  }
  for (const auto& [name, text] : json_) {
    std::ofstream f(dir_ + "/" + name + ".json");
    f << text << "\n";
  }
  write_manifest(all_pass() ? "ok" : "failed");
}

bool ResultStore::all_pass() const {
  for (const auto& v : verdicts_)
    if (!v.pass) return false;
  return true;
}

std::vector<std::string> emit_plots(const ResultStore& store,
                                    const std::vector<std::string>& which) {
  std::vector<std::string> written;
  const auto& all = store.series();
  for (const auto& name : which) {
    auto it = all.find(name);
    if (it == all.end()) {
      std::string msg = "unknown series '" + name + "'; available:";
      if (all.empty()) msg += " (none)";
      for (const auto& [n, _] : all) msg += " " + n;
      throw InvalidParameter(msg);
    }
    const Series& s = it->second;
    const std::string path = store.dir() + "/" + name + ".dat";
    std::ofstream f(path);
    char buf[64];
    for (const auto& row : s.rows) {
      const size_t c0 = 0, c1 = row.size() > 1 ? 1 : 0;
      std::snprintf(buf, sizeof(buf), "%.17g", row[c0]);
      f << buf << " ";
      std::snprintf(buf, sizeof(buf), "%.17g", row[c1]);
      f << buf << "\n";
    }
    written.push_back(path);
  }
  std::ofstream g(store.dir() + "/script.gp");
  g << "set logscale xy\nset key left\n";
  g << "plot ";
  for (size_t i = 0; i < written.size(); ++i) {
    g << "'" << written[i] << "' with lines title '" << which[i] << "'";
    g << (i + 1 < written.size() ? ", " : "\n");
  }
  written.push_back(store.dir() + "/script.gp");
  return written;
}

}  // namespace anisores

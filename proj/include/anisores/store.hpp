#ifndef ANISORES_STORE_HPP
#define ANISORES_STORE_HPP

#include <map>
#include <string>
#include <vector>

#include "anisores/config.hpp"

namespace anisores {

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

// Columnar numeric series (CSV artifact / plot-data source).
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Result store: manifest + named CSV artifacts + verdicts. The manifest is
// written before artifacts; a failed stage leaves the manifest marked.
class ResultStore {
 public:
  ResultStore(const RunConfig& cfg, std::string dir);

  void write_manifest(const std::string& stage_status) const;
  void add_series(const std::string& name, Series s);
  void add_verdict(const std::string& name, bool pass, double value, double threshold);
  void add_json(const std::string& name, const std::string& json_text);

  void flush();  // write all artifacts (CSV with schema+config-hash headers)

  bool all_pass() const;
  const std::vector<Verdict>& verdicts() const { return verdicts_; }
  const std::map<std::string, Series>& series() const { return series_; }
  const std::string& dir() const { return dir_; }
  const RunConfig& config() const { return cfg_; }

 private:
  RunConfig cfg_;
  std::string dir_;
  std::map<std::string, Series> series_;
  std::map<std::string, std::string> json_;
  std::vector<Verdict> verdicts_;
};

// emit two-column plot-data files plus a gnuplot script for the named series;
// throws with the list of available names if one is unknown.
std::vector<std::string> emit_plots(const ResultStore& store,
                                    const std::vector<std::string>& which);

}  // namespace anisores

#endif

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathint/errors.hpp"
#include "pathint/parallel.hpp"
#include "pathint/types.hpp"

namespace pathint::cli {

using json = nlohmann::ordered_json;

/// Malformed or incomplete config; carries the offending field path.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Read access to the "params" object with field-level diagnostics.
class Params {
 public:
  explicit Params(const json& params) : j_(params) {}

  bool has(const std::string& key) const { return j_.contains(key); }
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer(const std::string& key, int min) const;
  int integer_or(const std::string& key, int fallback, int min) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) const;
  std::vector<int> integers_or(const std::string& key, std::vector<int> fallback, int min) const;
  cplx complex_number(const std::string& key) const;
  std::vector<cplx> complex_numbers(const std::string& key) const;
  std::string text(const std::string& key) const;

 private:
  const json& at(const std::string& key) const;
  const json& j_;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

struct Verdict {
  std::string name;
  double value;
  std::string relation;  // "<" or "<="
  double tolerance;
  bool pass;
};

/// Everything a run reports. Serialised in insertion order.
class Record {
 public:
  void scalar(const std::string& name, double v);
  void integer(const std::string& name, long long v);
  void complex(const std::string& name, cplx v);
  void text(const std::string& name, const std::string& v);
  /// value < tolerance (or <=).
  bool verdict(const std::string& name, double value, double tolerance, bool inclusive = false);
  Table& table(const std::string& name, std::vector<std::string> columns);

  bool all_pass() const;
  const std::vector<Verdict>& verdicts() const { return verdicts_; }
  const std::deque<Table>& tables() const { return tables_; }
  const json& results() const { return results_; }
  void set_inconclusive(std::string reason) { inconclusive_ = std::move(reason); }
  const std::string& inconclusive() const { return inconclusive_; }

 private:
  json results_ = json::object();
  std::vector<Verdict> verdicts_;
  std::deque<Table> tables_;
  std::string inconclusive_;
};

struct Context {
  Params params;
  std::uint64_t seed;
  bool has_seed;
  Parallel par;
  Record record;
  std::filesystem::path base;  ///< relative input paths resolve here
};

using ExperimentFn = void (*)(Context&);
ExperimentFn find_experiment(const std::string& name);

json complex_json(cplx v);

}  // namespace pathint::cli

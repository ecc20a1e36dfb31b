#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pathint/cli.hpp"
#include "pathint/kernels.hpp"
#include "record.hpp"

#ifndef PATHINT_VERSION
#define PATHINT_VERSION "0.0.0"
#endif

namespace pathint::cli {
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Params

const json& Params::at(const std::string& key) const {
  if (!j_.contains(key)) throw ConfigError("params." + key + ": required field missing");
  return j_.at(key);
}

namespace {

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(field + ": must be finite");
  return d;
}

int as_integer(const json& v, const std::string& field, int min) {
  if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
  const long long i = v.get<long long>();
  if (i < min || i > 1'000'000'000) throw ConfigError(field + ": must be >= " + std::to_string(min));
  return static_cast<int>(i);
}

cplx as_complex(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(field + ": expected [re, im]");
  return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]")};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double Params::number(const std::string& key) const { return as_number(at(key), "params." + key); }

double Params::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int Params::integer(const std::string& key, int min) const { return as_integer(at(key), "params." + key, min); }

int Params::integer_or(const std::string& key, int fallback, int min) const {
  return has(key) ? integer(key, min) : fallback;
}

std::vector<double> Params::numbers(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_array() || v.empty()) throw ConfigError("params." + key + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], "params." + key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> Params::numbers_or(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

std::vector<int> Params::integers_or(const std::string& key, std::vector<int> fallback, int min) const {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_array()) throw ConfigError("params." + key + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_integer(v[i], "params." + key + "[" + std::to_string(i) + "]", min));
  return out;
}

cplx Params::complex_number(const std::string& key) const { return as_complex(at(key), "params." + key); }

std::vector<cplx> Params::complex_numbers(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_array() || v.empty()) throw ConfigError("params." + key + ": expected a non-empty array of [re, im]");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_complex(v[i], "params." + key + "[" + std::to_string(i) + "]"));
  return out;
}

std::string Params::text(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError("params." + key + ": expected a non-empty string");
  return v.get<std::string>();
}

// ---------------------------------------------------------------------------
// Record

json complex_json(cplx v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw Error("table " + name + ": row width does not match the header");
  rows.push_back(std::move(row));
}

void Record::scalar(const std::string& name, double v) { results_[name] = v; }
void Record::integer(const std::string& name, long long v) { results_[name] = v; }
void Record::complex(const std::string& name, cplx v) { results_[name] = complex_json(v); }
void Record::text(const std::string& name, const std::string& v) { results_[name] = v; }

bool Record::verdict(const std::string& name, double value, double tolerance, bool inclusive) {
  const bool pass = inclusive ? value <= tolerance : value < tolerance;
  verdicts_.push_back({name, value, inclusive ? "<=" : "<", tolerance, pass});
  return pass;
}

Table& Record::table(const std::string& name, std::vector<std::string> columns) {
  tables_.push_back({name, std::move(columns), {}});
  return tables_.back();
}

bool Record::all_pass() const {
  for (const auto& v : verdicts_)
    if (!v.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Listing

std::string version() { return PATHINT_VERSION; }

std::string list_experiments() {
  std::ostringstream out;
  out << "experiments:\n";
  for (const auto& e : experiments()) {
    out << "  " << e.name << "\n      " << e.description << "\n      required: ";
    for (std::size_t i = 0; i < e.required.size(); ++i) out << (i ? ", " : "") << e.required[i];
    if (e.needs_seed) out << (e.required.empty() ? "" : ", ") << "seed (top level)";
    out << "\n";
    if (!e.optional.empty()) {
      out << "      optional: ";
      for (std::size_t i = 0; i < e.optional.size(); ++i) out << (i ? ", " : "") << e.optional[i];
      out << "\n";
    }
  }
  return out.str();
}

std::string suggest_experiment(const std::string& name) {
  auto distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      cur[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j)
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
      std::swap(prev, cur);
    }
    return prev[b.size()];
  };
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& e : experiments()) {
    const std::size_t d = distance(name, e.name);
    if (d < best_d) {
      best_d = d;
      best = e.name;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Running

namespace {

const ExperimentInfo* info_for(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return &e;
  return nullptr;
}

void validate_fields(const ExperimentInfo& info, const json& params) {
  for (const auto& r : info.required)
    if (!params.contains(r)) throw ConfigError("params." + r + ": required field missing for " + info.name);
  for (const auto& [key, value] : params.items()) {
    const bool known = std::find(info.required.begin(), info.required.end(), key) != info.required.end() ||
                       std::find(info.optional.begin(), info.optional.end(), key) != info.optional.end();
    if (!known) throw ConfigError("params." + key + ": unknown field for " + info.name);
    if (value.is_number() && !std::isfinite(value.get<double>()))
      throw ConfigError("params." + key + ": must be finite");
  }
}

void write_csv(const fs::path& file, const Table& t) {
  std::ofstream out(file);
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  if (!out) throw Error("could not write " + file.string());
}

json verdict_json(const Verdict& v) {
  return json{{"name", v.name}, {"value", v.value}, {"relation", v.relation}, {"tolerance", v.tolerance},
              {"pass", v.pass}};
}

void append_log(const fs::path& dir, const std::string& experiment, double seconds, int code) {
  std::ofstream log(dir / "run.log", std::ios::app);
  log << experiment << " exit=" << code << " wall_seconds=" << format_double(seconds)
      << " kernels=" << kernels::active().name << "\n";
}

RunOutcome fail(int code, const std::string& msg) { return {code, msg, {}}; }

}  // namespace

RunOutcome run_config_text(const std::string& json_text, const RunOptions& opt, const fs::path& base) {
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const json::parse_error& e) {
    return fail(kConfigError, std::string("config: parse error: ") + e.what());
  }
  if (!cfg.is_object()) return fail(kConfigError, "config: expected a JSON object");
  if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
    return fail(kConfigError, "experiment: required string field missing");
  const std::string name = cfg["experiment"].get<std::string>();
  const ExperimentInfo* info = info_for(name);
  if (info == nullptr)
    return fail(kConfigError, "experiment: unknown name '" + name + "'; did you mean '" + suggest_experiment(name) +
                                  "'? (see `pathint list`)");
  for (const auto& [key, value] : cfg.items())
    if (key != "experiment" && key != "seed" && key != "output_dir" && key != "params")
      return fail(kConfigError, key + ": unknown top-level field");
  if (!cfg.contains("params")) cfg["params"] = json::object();
  if (!cfg["params"].is_object()) return fail(kConfigError, "params: expected an object");

  if (opt.seed) cfg["seed"] = *opt.seed;
  std::uint64_t seed = 0;
  const bool has_seed = cfg.contains("seed");
  if (has_seed) {
    if (!cfg["seed"].is_number_unsigned()) return fail(kConfigError, "seed: expected a non-negative integer");
    seed = cfg["seed"].get<std::uint64_t>();
  } else if (info->needs_seed) {
    return fail(kConfigError, "seed: required for randomized experiment " + name);
  }

  fs::path out_dir;
  if (opt.output_dir) {
    out_dir = *opt.output_dir;
  } else if (cfg.contains("output_dir")) {
    if (!cfg["output_dir"].is_string()) return fail(kConfigError, "output_dir: expected a string");
    out_dir = cfg["output_dir"].get<std::string>();
  } else {
    out_dir = "pathint-out";
  }
  if (out_dir.is_relative()) out_dir = base / out_dir;

  Context ctx{Params(cfg["params"]), seed, has_seed, Parallel{opt.threads}, Record{}, base};
  const auto t0 = std::chrono::steady_clock::now();
  int code = kPass;
  std::string message;
  try {
    validate_fields(*info, cfg["params"]);
    find_experiment(name)(ctx);
    if (!ctx.record.inconclusive().empty()) {
      code = kNonConvergence;
      message = "inconclusive: " + ctx.record.inconclusive();
    } else if (!ctx.record.all_pass()) {
      code = kIdentityFailure;
      message = "identity check failed:";
      for (const auto& v : ctx.record.verdicts())
        if (!v.pass)
          message += " " + v.name + " = " + format_double(v.value) + " (needs " + v.relation + " " +
                     format_double(v.tolerance) + ")";
    } else {
      message = "pass: " + std::to_string(ctx.record.verdicts().size()) + " checks";
    }
  } catch (const NonConvergence& e) {
    code = kNonConvergence;
    message = std::string("non-convergence: ") + e.what();
  } catch (const NumericalError& e) {
    code = kNonConvergence;
    message = std::string("numerical failure: ") + e.what();
  } catch (const Error& e) {
    return fail(kConfigError, std::string("config: ") + e.what());
  } catch (const json::exception& e) {
    return fail(kConfigError, std::string("config: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return fail(kConfigError, "output_dir: cannot create " + out_dir.string() + ": " + ec.message());

  json result;
  result["experiment"] = name;
  result["version"] = version();
  result["config"] = cfg;
  result["results"] = ctx.record.results();
  json verdicts = json::array();
  for (const auto& v : ctx.record.verdicts()) verdicts.push_back(verdict_json(v));
  result["verdicts"] = verdicts;
  json tables = json::array();
  for (const auto& t : ctx.record.tables()) {
    const std::string file = t.name + ".csv";
    write_csv(out_dir / file, t);
    tables.push_back(json{{"name", t.name}, {"file", file}, {"rows", t.rows.size()}, {"columns", t.columns}});
  }
  result["tables"] = tables;
  result["status"] = code == kPass ? "pass" : code == kIdentityFailure ? "fail" : "inconclusive";
  result["exit_code"] = code;
  result["message"] = message;

  const fs::path result_file = out_dir / "result.json";
  std::ofstream out(result_file);
  out << result.dump(2) << "\n";
  if (!out) return fail(kConfigError, "output_dir: cannot write " + result_file.string());
  append_log(out_dir, name, seconds, code);
  return {code, message, result_file};
}

RunOutcome run_config_file(const fs::path& config, const RunOptions& opt) {
  std::ifstream in(config);
  if (!in) return fail(kConfigError, "config: cannot open " + config.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_text(ss.str(), opt, fs::current_path());
}

}  // namespace pathint::cli

// bfx: experiment driver for butterfly factorizations.
//
// Subcommands: factorize | verify-exact | gradcheck | baselines | bench |
// report.  Every run writes its fully resolved configuration next to its
// outputs; re-running from that file reproduces the numeric outputs
// byte-for-byte.  Exit codes: 0 ok, 1 acceptance failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "butterfly/baselines.hpp"
#include "butterfly/bench.hpp"
#include "butterfly/exact.hpp"
#include "butterfly/gradcheck.hpp"
#include "butterfly/model.hpp"
#include "butterfly/serialize.hpp"
#include "butterfly/train.hpp"
#include "butterfly/transforms.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace butterfly;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Shared parsing helpers

// "8" | "8,16,32" | "8..64" (the range doubles: 8, 16, 32, 64).
std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  auto parse_one = [](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      throw UsageError("invalid N value: '" + s + "'");
    }
    if (pos != s.size() || v == 0) throw UsageError("invalid N value: '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::size_t lo = parse_one(text.substr(0, dots));
    const std::size_t hi = parse_one(text.substr(dots + 2));
    if (lo > hi) throw UsageError("empty N range: '" + text + "'");
    for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_one(item));
  }
  if (out.empty()) throw UsageError("empty N list: '" + text + "'");
  return out;
}

std::vector<TransformKind> parse_transform_list(const std::string& text) {
  std::vector<TransformKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (TransformKind k : all_transforms()) out.push_back(k);
      continue;
    }
    try {
      out.push_back(parse_transform(item));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (out.empty()) throw UsageError("no transforms given");
  return out;
}

Scaling parse_scaling(const std::string& s) {
  if (s == "normalized") return Scaling::Normalized;
  if (s == "raw") return Scaling::Raw;
  throw UsageError("unknown scaling: '" + s + "' (expected normalized|raw)");
}

std::string scaling_name(Scaling s) {
  return s == Scaling::Normalized ? "normalized" : "raw";
}

// "auto" defers to arch_for(transform).
std::optional<ArchSpec> parse_arch(const std::string& s) {
  if (s == "auto") return std::nullopt;
  if (s == "bp") return ArchSpec::bp();
  if (s == "bpbp") return ArchSpec::bpbp();
  throw UsageError("unknown arch: '" + s + "' (expected auto|bp|bpbp)");
}

std::string arch_name(const ArchSpec& arch) {
  std::string name;
  for (std::size_t i = 0; i < arch.k; ++i) name += "bp";
  if (arch.r != 1) name += "_r" + std::to_string(arch.r);
  if (arch.extra_input_perm) name += "+perm";
  if (arch.post_real_part) name += "+re";
  return name;
}

std::size_t env_threads(std::size_t flag_value) {
  if (const char* env = std::getenv("BF_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    throw UsageError("invalid BF_THREADS value");
  }
  return flag_value;
}

// ---------------------------------------------------------------------------
// Config file plumbing

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config root must be a JSON object");
  return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw UsageError("unknown config key: '" + key + "'");
  }
}

void require_command(const json& j, const std::string& expected) {
  if (j.contains("command") && j.at("command").get<std::string>() != expected)
    throw UsageError("config command '" + j.at("command").get<std::string>() +
                     "' does not match subcommand '" + expected + "'");
}

std::string config_string(const json& j, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_array()) {
    std::string out;
    for (const json& e : v) {
      if (!out.empty()) out += ",";
      out += e.is_string() ? e.get<std::string>() : std::to_string(e.get<long long>());
    }
    return out;
  }
  throw UsageError(std::string("config key '") + key + "' has unsupported type");
}

template <typename T>
T config_number(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

bool config_bool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<bool>();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_config(const fs::path& out_dir, const json& resolved) {
  write_text_file(out_dir / "config.json", resolved.dump(2) + "\n");
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// factorize

struct FactorizeArgs {
  std::string transform = "dft";
  std::string n_text = "8";
  std::string arch_text = "auto";
  std::string scaling_text = "normalized";
  std::size_t trials = 16;
  std::size_t max_steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t transform_seed = 1234;
  std::string out = ".";
  std::size_t threads = 1;
  bool strict = false;
  std::string config_path;
};

// Config values fill in everything the command line did not set explicitly.
void apply_factorize_config(FactorizeArgs& a, const CLI::App& cmd) {
  if (a.config_path.empty()) return;
  const json j = load_config_file(a.config_path);
  reject_unknown_keys(j, {"command", "transform", "N", "arch", "scaling", "trials",
                          "max_steps", "seed", "transform_seed", "out", "threads",
                          "strict"});
  require_command(j, "factorize");
  const auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--transform")) a.transform = config_string(j, "transform", a.transform);
  if (unset("--N")) a.n_text = config_string(j, "N", a.n_text);
  if (unset("--arch")) a.arch_text = config_string(j, "arch", a.arch_text);
  if (unset("--scaling")) a.scaling_text = config_string(j, "scaling", a.scaling_text);
  if (unset("--trials")) a.trials = config_number<std::size_t>(j, "trials", a.trials);
  if (unset("--max-steps"))
    a.max_steps = config_number<std::size_t>(j, "max_steps", a.max_steps);
  if (unset("--seed")) a.seed = config_number<std::uint64_t>(j, "seed", a.seed);
  if (unset("--transform-seed"))
    a.transform_seed = config_number<std::uint64_t>(j, "transform_seed", a.transform_seed);
  if (unset("--out")) a.out = config_string(j, "out", a.out);
  if (unset("--threads")) a.threads = config_number<std::size_t>(j, "threads", a.threads);
  if (unset("--strict")) a.strict = config_bool(j, "strict", a.strict);
}

int cmd_factorize(FactorizeArgs a, const CLI::App& cmd) {
  apply_factorize_config(a, cmd);
  const std::vector<TransformKind> kinds = parse_transform_list(a.transform);
  const std::vector<std::size_t> sizes = parse_n_list(a.n_text);
  const std::optional<ArchSpec> forced_arch = parse_arch(a.arch_text);
  const Scaling scaling = parse_scaling(a.scaling_text);
  const std::size_t threads = env_threads(a.threads);
  const fs::path out_dir(a.out);

  json resolved = {
      {"command", "factorize"},
      {"transform", a.transform},
      {"N", a.n_text},
      {"arch", a.arch_text},
      {"scaling", a.scaling_text},
      {"trials", a.trials},
      {"max_steps", a.max_steps},
      {"seed", a.seed},
      {"transform_seed", a.transform_seed},
      {"out", a.out},
      {"threads", a.threads},
      {"strict", a.strict},
  };
  write_config(out_dir, resolved);

  // results.csv mirrors the recovery table: one row per transform, one
  // column per N, cells hold the best search RMSE.
  std::string long_csv = "transform,n,arch,budget,trials,seed,best_trial,best_rmse,"
                         "hardened_rmse,steps,early_stopped\n";
  std::map<std::string, std::map<std::size_t, double>> grid;
  bool all_recovered = true;

  for (TransformKind kind : kinds) {
    for (std::size_t n : sizes) {
      TransformSpec spec{kind, n, scaling, a.transform_seed};
      SearchConfig cfg;
      cfg.arch = forced_arch ? *forced_arch : arch_for(kind);
      cfg.trials = a.trials;
      cfg.max_steps = a.max_steps;
      cfg.seed = a.seed ^ (n * 0x9e3779b97f4a7c15ull) ^
                 static_cast<std::uint64_t>(kind);
      cfg.threads = threads;
      const SearchResult result = search_transform(spec, cfg);
      const TrainResult hardened =
          harden_and_refit(result.best, generate(spec), RefitConfig{});

      const std::string name = transform_name(kind);
      grid[name][n] = result.best.final_rmse;
      all_recovered = all_recovered && result.best.final_rmse < 1e-4;

      long_csv += name + "," + std::to_string(n) + "," + arch_name(cfg.arch) + "," +
                  std::to_string(budget_for(cfg.arch, n)) + "," +
                  std::to_string(a.trials) + "," + std::to_string(cfg.seed) + "," +
                  std::to_string(result.best_trial) + "," +
                  format_double(result.best.final_rmse) + "," +
                  format_double(hardened.final_rmse) + "," +
                  std::to_string(result.best.steps_used) + "," +
                  (result.best.early_stopped ? "1" : "0") + "\n";

      const std::string cell = name + "_" + std::to_string(n);
      write_text_file(out_dir / ("trials_" + cell + ".csv"),
                      trial_records_to_csv(result.trials));
      write_text_file(out_dir / ("model_" + cell + ".json"),
                      model_to_json(result.best.model));
      std::printf("%-9s N=%-5zu rmse=%s  hardened=%s  (trial %zu, %zu steps)\n",
                  name.c_str(), n, format_double(result.best.final_rmse).c_str(),
                  format_double(hardened.final_rmse).c_str(), result.best_trial,
                  result.best.steps_used);
      std::fflush(stdout);
    }
  }

  // The wide recovery grid, transforms down, sizes across.
  std::vector<std::size_t> cols = sizes;
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  std::string wide_csv = "transform";
  for (std::size_t n : cols) wide_csv += "," + std::to_string(n);
  wide_csv += "\n";
  for (TransformKind kind : kinds) {
    const std::string name = transform_name(kind);
    if (!grid.count(name)) continue;
    wide_csv += name;
    for (std::size_t n : cols) {
      wide_csv += ",";
      const auto& row = grid.at(name);
      if (auto it = row.find(n); it != row.end()) wide_csv += format_double(it->second);
    }
    wide_csv += "\n";
  }
  write_text_file(out_dir / "results.csv", wide_csv);
  write_text_file(out_dir / "results_long.csv", long_csv);

  if (a.strict && !all_recovered) {
    std::fprintf(stderr, "factorize: at least one cell missed RMSE < 1e-4\n");
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify-exact

struct VerifyArgs {
  std::size_t max_n = 256;
  std::uint64_t seed = 7;
  std::string out = ".";
  bool inject = false;
  std::string config_path;
};

void apply_verify_config(VerifyArgs& a, const CLI::App& cmd) {
  if (a.config_path.empty()) return;
  const json j = load_config_file(a.config_path);
  reject_unknown_keys(j, {"command", "max_n", "seed", "out"});
  require_command(j, "verify-exact");
  const auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--max-n")) a.max_n = config_number<std::size_t>(j, "max_n", a.max_n);
  if (unset("--seed")) a.seed = config_number<std::uint64_t>(j, "seed", a.seed);
  if (unset("--out")) a.out = config_string(j, "out", a.out);
}

int cmd_verify_exact(VerifyArgs a, const CLI::App& cmd) {
  apply_verify_config(a, cmd);
  const fs::path out_dir(a.out);
  json resolved = {
      {"command", "verify-exact"},
      {"max_n", a.max_n},
      {"seed", a.seed},
      {"out", a.out},
  };
  write_config(out_dir, resolved);

  VerifyOptions opt;
  opt.max_n = a.max_n;
  opt.seed = a.seed;
  opt.inject_twiddle_error = a.inject;
  const VerifyReport report = verify_exact(opt);
  write_text_file(out_dir / "verify.csv", verify_report_to_csv(report));

  std::size_t failed = 0;
  std::map<std::string, double> worst;
  for (const VerifyRow& row : report.rows) {
    worst[row.transform] = std::max(worst[row.transform], row.max_abs_error);
    if (!row.passed) ++failed;
  }
  for (const auto& [name, err] : worst)
    std::printf("%-10s max_abs_error=%s\n", name.c_str(), format_double(err).c_str());
  std::printf("%zu rows, %zu failed\n", report.rows.size(), failed);
  return report.all_passed() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  std::size_t cases = 20;
  double step = 1e-5;
  std::uint64_t seed = 17;
  std::string out;
  std::string config_path;
};

void apply_gradcheck_config(GradcheckArgs& a, const CLI::App& cmd) {
  if (a.config_path.empty()) return;
  const json j = load_config_file(a.config_path);
  reject_unknown_keys(j, {"command", "cases", "step", "seed", "out"});
  require_command(j, "gradcheck");
  const auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--cases")) a.cases = config_number<std::size_t>(j, "cases", a.cases);
  if (unset("--step")) a.step = config_number<double>(j, "step", a.step);
  if (unset("--seed")) a.seed = config_number<std::uint64_t>(j, "seed", a.seed);
  if (unset("--out")) a.out = config_string(j, "out", a.out);
}

int cmd_gradcheck(GradcheckArgs a, const CLI::App& cmd) {
  apply_gradcheck_config(a, cmd);
  GradCheckOptions opt;
  opt.cases = a.cases;
  opt.step = a.step;
  opt.seed = a.seed;
  const GradCheckReport report = run_gradcheck(opt);

  std::string csv = "case,arch,field,n,tie_logits,entropy_weight,seed,max_rel_error\n";
  for (std::size_t i = 0; i < report.cases.size(); ++i) {
    const GradCheckCase& c = report.cases[i];
    csv += std::to_string(i) + "," + arch_name(c.arch) + "," +
           (c.field == Field::Complex ? "complex" : "real") + "," +
           std::to_string(c.n) + "," + (c.tie_logits ? "1" : "0") + "," +
           format_double(c.entropy_weight) + "," + std::to_string(c.seed) + "," +
           format_double(c.max_rel_error) + "\n";
  }
  if (!a.out.empty()) {
    const fs::path out_dir(a.out);
    json resolved = {
        {"command", "gradcheck"},
        {"cases", a.cases},
        {"step", a.step},
        {"seed", a.seed},
        {"out", a.out},
    };
    write_config(out_dir, resolved);
    write_text_file(out_dir / "gradcheck.csv", csv);
  }
  std::printf("gradcheck: %zu cases, step %s, worst relative error %s\n", a.cases,
              format_double(a.step).c_str(), format_double(report.worst).c_str());
  return report.passed(1e-6) ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// baselines

struct BaselinesArgs {
  std::string transform = "all";
  std::string n_text = "8";
  std::string scaling_text = "normalized";
  std::uint64_t transform_seed = 1234;
  std::string out = ".";
  std::string config_path;
};

void apply_baselines_config(BaselinesArgs& a, const CLI::App& cmd) {
  if (a.config_path.empty()) return;
  const json j = load_config_file(a.config_path);
  reject_unknown_keys(j,
                      {"command", "transform", "N", "scaling", "transform_seed", "out"});
  require_command(j, "baselines");
  const auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--transform")) a.transform = config_string(j, "transform", a.transform);
  if (unset("--N")) a.n_text = config_string(j, "N", a.n_text);
  if (unset("--scaling")) a.scaling_text = config_string(j, "scaling", a.scaling_text);
  if (unset("--transform-seed"))
    a.transform_seed = config_number<std::uint64_t>(j, "transform_seed", a.transform_seed);
  if (unset("--out")) a.out = config_string(j, "out", a.out);
}

int cmd_baselines(BaselinesArgs a, const CLI::App& cmd) {
  apply_baselines_config(a, cmd);
  const std::vector<TransformKind> kinds = parse_transform_list(a.transform);
  const std::vector<std::size_t> sizes = parse_n_list(a.n_text);
  const Scaling scaling = parse_scaling(a.scaling_text);
  const fs::path out_dir(a.out);

  json resolved = {
      {"command", "baselines"},  {"transform", a.transform},
      {"N", a.n_text},           {"scaling", a.scaling_text},
      {"transform_seed", a.transform_seed}, {"out", a.out},
  };
  write_config(out_dir, resolved);

  std::vector<TransformSpec> specs;
  for (TransformKind kind : kinds)
    for (std::size_t n : sizes) specs.push_back({kind, n, scaling, a.transform_seed});
  const std::vector<BaselineRow> rows = baseline_table(specs);

  std::string csv = "transform,N,method,budget,rmse,wall_ms\n";
  for (const BaselineRow& r : rows) {
    csv += r.transform + "," + std::to_string(r.n) + "," + r.method + "," +
           std::to_string(r.budget) + "," + format_double(r.rmse) + "," +
           format_double(r.wall_ms) + "\n";
    std::printf("%-9s N=%-5zu %-14s budget=%-6zu rmse=%s\n", r.transform.c_str(), r.n,
                r.method.c_str(), r.budget, format_double(r.rmse).c_str());
  }
  write_text_file(out_dir / "baselines.csv", csv);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::size_t min_n = 16;
  std::size_t max_n = 8192;
  std::size_t repetitions = 31;
  std::uint64_t seed = 11;
  std::size_t threads = 1;
  std::string out = ".";
  std::string config_path;
};

void apply_bench_config(BenchArgs& a, const CLI::App& cmd) {
  if (a.config_path.empty()) return;
  const json j = load_config_file(a.config_path);
  reject_unknown_keys(j, {"command", "min_n", "max_n", "repetitions", "seed", "out",
                          "threads"});
  require_command(j, "bench");
  const auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--min-n")) a.min_n = config_number<std::size_t>(j, "min_n", a.min_n);
  if (unset("--max-n")) a.max_n = config_number<std::size_t>(j, "max_n", a.max_n);
  if (unset("--repetitions"))
    a.repetitions = config_number<std::size_t>(j, "repetitions", a.repetitions);
  if (unset("--seed")) a.seed = config_number<std::uint64_t>(j, "seed", a.seed);
  if (unset("--out")) a.out = config_string(j, "out", a.out);
  if (unset("--threads")) a.threads = config_number<std::size_t>(j, "threads", a.threads);
}

int cmd_bench(BenchArgs a, const CLI::App& cmd) {
  apply_bench_config(a, cmd);
  if (a.threads != 1)
    throw UsageError("bench runs single-threaded; --threads must be 1");
  const fs::path out_dir(a.out);
  json resolved = {
      {"command", "bench"},   {"min_n", a.min_n},
      {"max_n", a.max_n},     {"repetitions", a.repetitions},
      {"seed", a.seed},       {"out", a.out},
      {"threads", a.threads},
  };
  write_config(out_dir, resolved);

  BenchOptions opt;
  opt.min_n = a.min_n;
  opt.max_n = a.max_n;
  opt.repetitions = a.repetitions;
  opt.seed = a.seed;
  const BenchResult result = run_bench(opt);

  std::string csv = "operation,N,median_ns,iqr_ns,repetitions\n";
  for (const BenchRecord& r : result.records)
    csv += r.operation + "," + std::to_string(r.n) + "," + format_double(r.median_ns) +
           "," + format_double(r.iqr_ns) + "," + std::to_string(r.repetitions) + "\n";
  write_text_file(out_dir / "bench.csv", csv);

  std::string slopes = "operation,slope,points\n";
  for (const SlopeFit& s : result.slopes) {
    slopes += s.operation + "," + format_double(s.slope) + "," +
              std::to_string(s.points) + "\n";
    std::printf("%-18s slope %.3f over %zu points\n", s.operation.c_str(), s.slope,
                s.points);
  }
  write_text_file(out_dir / "slopes.csv", slopes);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string baselines_path;
  std::string out = ".";
  std::string config_path;
};

void apply_report_config(ReportArgs& a, const CLI::App& cmd) {
  if (a.config_path.empty()) return;
  const json j = load_config_file(a.config_path);
  reject_unknown_keys(j, {"command", "inputs", "baselines", "out"});
  require_command(j, "report");
  const auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--inputs") && j.contains("inputs")) {
    a.inputs.clear();
    for (const json& e : j.at("inputs")) a.inputs.push_back(e.get<std::string>());
  }
  if (unset("--baselines"))
    a.baselines_path = config_string(j, "baselines", a.baselines_path);
  if (unset("--out")) a.out = config_string(j, "out", a.out);
}

struct RecoveryGrid {
  std::vector<std::string> transforms;  // presentation order
  std::vector<std::size_t> sizes;
  std::map<std::string, std::map<std::size_t, double>> cells;
};

void merge_results_csv(const std::string& text, RecoveryGrid& grid) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw UsageError("empty results csv");
  std::vector<std::size_t> cols;
  {
    std::stringstream hs(line);
    std::string cell;
    std::getline(hs, cell, ',');  // "transform"
    if (cell != "transform") throw UsageError("not a results csv (header)");
    while (std::getline(hs, cell, ',')) cols.push_back(std::stoull(cell));
  }
  for (std::size_t n : cols)
    if (std::find(grid.sizes.begin(), grid.sizes.end(), n) == grid.sizes.end())
      grid.sizes.push_back(n);
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string name;
    std::getline(ls, name, ',');
    if (!grid.cells.count(name)) grid.transforms.push_back(name);
    auto& row = grid.cells[name];
    for (std::size_t i = 0; i < cols.size(); ++i) {
      std::string cell;
      if (!std::getline(ls, cell, ',')) break;
      if (!cell.empty()) row[cols[i]] = std::stod(cell);
    }
  }
}

// Green for recovered cells (RMSE below 1e-4), then a yellow-to-red ramp over
// log10(RMSE) up to 1.
std::string cell_color(double rmse) {
  if (rmse < 1e-4) return "#2e7d32";
  const double t = std::clamp((std::log10(rmse) + 4.0) / 4.0, 0.0, 1.0);
  const int r = 255;
  const int g = static_cast<int>(220.0 * (1.0 - t));
  const int b = 40;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string render_heatmap_svg(const RecoveryGrid& grid) {
  const int cw = 86, ch = 34, left = 110, top = 40;
  const int width = left + cw * static_cast<int>(grid.sizes.size()) + 10;
  const int height = top + ch * static_cast<int>(grid.transforms.size()) + 10;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"monospace\" font-size=\"12\">\n";
  svg << "<text x=\"" << left << "\" y=\"16\">log10(RMSE) by transform and N"
      << " (green: recovered, RMSE &lt; 1e-4)</text>\n";
  for (std::size_t j = 0; j < grid.sizes.size(); ++j)
    svg << "<text x=\"" << left + static_cast<int>(j) * cw + cw / 2 - 10 << "\" y=\""
        << top - 6 << "\">" << grid.sizes[j] << "</text>\n";
  for (std::size_t i = 0; i < grid.transforms.size(); ++i) {
    const std::string& name = grid.transforms[i];
    const int y = top + static_cast<int>(i) * ch;
    svg << "<text x=\"8\" y=\"" << y + ch / 2 + 4 << "\">" << name << "</text>\n";
    for (std::size_t j = 0; j < grid.sizes.size(); ++j) {
      const int x = left + static_cast<int>(j) * cw;
      const auto& row = grid.cells.at(name);
      const auto it = row.find(grid.sizes[j]);
      if (it == row.end()) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw - 2
            << "\" height=\"" << ch - 2 << "\" fill=\"#eeeeee\"/>\n";
        continue;
      }
      char label[32];
      std::snprintf(label, sizeof label, "%.1e", it->second);
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw - 2
          << "\" height=\"" << ch - 2 << "\" fill=\"" << cell_color(it->second)
          << "\"/>\n";
      svg << "<text x=\"" << x + 6 << "\" y=\"" << y + ch / 2 + 4
          << "\" fill=\"#ffffff\">" << label << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

int cmd_report(ReportArgs a, const CLI::App& cmd) {
  apply_report_config(a, cmd);
  if (a.inputs.empty()) throw UsageError("report: no input results files");
  const fs::path out_dir(a.out);

  json resolved = {
      {"command", "report"},
      {"inputs", a.inputs},
      {"baselines", a.baselines_path},
      {"out", a.out},
  };
  write_config(out_dir, resolved);

  RecoveryGrid grid;
  json provenance = json::array();
  for (const std::string& input : a.inputs) {
    const std::string text = read_text_file(input);
    merge_results_csv(text, grid);
    json entry = {{"file", input}, {"hash", hex64(fnv1a64(text))}};
    const fs::path cfg = fs::path(input).parent_path() / "config.json";
    if (fs::exists(cfg)) {
      const std::string cfg_text = read_text_file(cfg);
      entry["config"] = cfg.string();
      entry["config_hash"] = hex64(fnv1a64(cfg_text));
    }
    provenance.push_back(entry);
  }
  std::sort(grid.sizes.begin(), grid.sizes.end());

  std::ostringstream md;
  md << "# Recovery report\n\n";
  md << "Best search RMSE per (transform, N); cells below 1e-4 count as"
        " recovered.\n\n";
  md << "| transform |";
  for (std::size_t n : grid.sizes) md << " " << n << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < grid.sizes.size(); ++i) md << "---|";
  md << "\n";
  for (const std::string& name : grid.transforms) {
    md << "| " << name << " |";
    for (std::size_t n : grid.sizes) {
      const auto& row = grid.cells.at(name);
      const auto it = row.find(n);
      if (it == row.end()) {
        md << "  |";
      } else {
        char label[32];
        std::snprintf(label, sizeof label, "%.1e", it->second);
        md << " " << label << (it->second < 1e-4 ? " (r)" : "") << " |";
      }
    }
    md << "\n";
  }

  if (!a.baselines_path.empty()) {
    md << "\n## Baselines\n\n```\n" << read_text_file(a.baselines_path) << "```\n";
    provenance.push_back(
        {{"file", a.baselines_path},
         {"hash", hex64(fnv1a64(read_text_file(a.baselines_path)))}});
  }

  md << "\n## Inputs\n\n";
  for (const json& entry : provenance) {
    md << "- `" << entry.at("file").get<std::string>() << "` hash `"
       << entry.at("hash").get<std::string>() << "`";
    if (entry.contains("config_hash"))
      md << " (config `" << entry.at("config_hash").get<std::string>() << "`)";
    md << "\n";
  }

  write_text_file(out_dir / "report.md", md.str());
  write_text_file(out_dir / "heatmap.svg", render_heatmap_svg(grid));
  write_text_file(out_dir / "provenance.json", provenance.dump(2) + "\n");
  std::printf("report: %zu transforms, %zu sizes -> %s\n", grid.transforms.size(),
              grid.sizes.size(), (out_dir / "report.md").string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"butterfly factorization experiment driver"};
  app.require_subcommand(1);

  FactorizeArgs fa;
  CLI::App* factorize = app.add_subcommand(
      "factorize", "learn butterfly factorizations of dense transforms");
  factorize->add_option("--transform", fa.transform,
                        "comma-separated transforms (dft,dct,dst,conv,hadamard,"
                        "hartley,legendre,randn) or 'all'");
  factorize->add_option("--N", fa.n_text, "sizes: '8', '8,16,32', or '8..64'");
  factorize->add_option("--arch", fa.arch_text, "auto|bp|bpbp");
  factorize->add_option("--scaling", fa.scaling_text, "normalized|raw");
  factorize->add_option("--trials", fa.trials, "search budget (>= 4)");
  factorize->add_option("--max-steps", fa.max_steps, "Adam steps per trial (0: default)");
  factorize->add_option("--seed", fa.seed, "master search seed");
  factorize->add_option("--transform-seed", fa.transform_seed,
                        "seed for seeded targets (conv filter, randn)");
  factorize->add_option("--out", fa.out, "output directory");
  factorize->add_option("--threads", fa.threads, "worker threads");
  factorize->add_flag("--strict", fa.strict, "exit 1 unless every cell reaches 1e-4");
  factorize->add_option("--config", fa.config_path, "JSON run config");

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand(
      "verify-exact", "check exact factorizations against dense oracles");
  verify->add_option("--max-n", va.max_n, "largest size in the sweep");
  verify->add_option("--seed", va.seed, "seed for seeded targets");
  verify->add_option("--out", va.out, "output directory");
  verify->add_option("--config", va.config_path, "JSON run config");
  verify->add_flag("--inject-twiddle-error", va.inject, "negative-control hook")
      ->group("");

  GradcheckArgs ga;
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "analytic vs finite-difference gradients");
  gradcheck->add_option("--cases", ga.cases, "number of random instances");
  gradcheck->add_option("--step", ga.step, "central finite-difference step");
  gradcheck->add_option("--seed", ga.seed, "case seed");
  gradcheck->add_option("--out", ga.out, "optional output directory");
  gradcheck->add_option("--config", ga.config_path, "JSON run config");

  BaselinesArgs ba;
  CLI::App* baselines =
      app.add_subcommand("baselines", "equal-budget compression baselines");
  baselines->add_option("--transform", ba.transform, "transforms or 'all'");
  baselines->add_option("--N", ba.n_text, "sizes: '8', '8,16,32', or '8..64'");
  baselines->add_option("--scaling", ba.scaling_text, "normalized|raw");
  baselines->add_option("--transform-seed", ba.transform_seed,
                        "seed for seeded targets");
  baselines->add_option("--out", ba.out, "output directory");
  baselines->add_option("--config", ba.config_path, "JSON run config");

  BenchArgs bna;
  CLI::App* bench = app.add_subcommand("bench", "matvec scaling microbenchmark");
  bench->add_option("--min-n", bna.min_n, "smallest size (power of two)");
  bench->add_option("--max-n", bna.max_n, "largest size (power of two)");
  bench->add_option("--repetitions", bna.repetitions, "timed samples per point");
  bench->add_option("--seed", bna.seed, "input vector seed");
  bench->add_option("--threads", bna.threads, "must be 1");
  bench->add_option("--out", bna.out, "output directory");
  bench->add_option("--config", bna.config_path, "JSON run config");

  ReportArgs ra;
  CLI::App* report = app.add_subcommand("report", "merge results into md + svg");
  report->add_option("--inputs", ra.inputs, "results.csv files")->delimiter(',');
  report->add_option("--baselines", ra.baselines_path, "baselines.csv to embed");
  report->add_option("--out", ra.out, "output directory");
  report->add_option("--config", ra.config_path, "JSON run config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (factorize->parsed()) return cmd_factorize(fa, *factorize);
    if (verify->parsed()) return cmd_verify_exact(va, *verify);
    if (gradcheck->parsed()) return cmd_gradcheck(ga, *gradcheck);
    if (baselines->parsed()) return cmd_baselines(ba, *baselines);
    if (bench->parsed()) return cmd_bench(bna, *bench);
    if (report->parsed()) return cmd_report(ra, *report);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "bfx: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bfx: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

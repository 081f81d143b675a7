// Command-line front end: wires JSON configs to the library and writes
// plot-ready CSV tables with JSON metadata sidecars.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kle/kle.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail_usage(const std::string& message) {
  throw UsageError(message);
}

void check_status(kle_status status, const std::string& context) {
  if (status == KLE_OK) return;
  fail_usage(context + ": " + kle_last_error() + " [" +
             kle_status_name(status) + "]");
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      fail_usage("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double require_number(const json& obj, const std::string& where,
                      const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    fail_usage(where + "." + key + " must be a number");
  }
  return obj[key].get<double>();
}

std::int64_t require_integer(const json& obj, const std::string& where,
                             const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    fail_usage(where + "." + key + " must be an integer");
  }
  return obj[key].get<std::int64_t>();
}

struct Config {
  json raw;
  json kernel;
  double a = 0.0;
  double b = 1.0;
  std::string rule_name = "trapezoid";
  std::int32_t n = 0;
  json mean;  // {"type": "zero"} | {"type":"constant","value":v} |
              // {"type":"grid","values":[...]}
  std::optional<std::int32_t> selection_rank;
  std::optional<double> selection_threshold;
  std::optional<std::int32_t> sample_count;
  std::uint64_t seed = 0;
  std::string output;
};

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_usage("cannot open config file \"" + path + "\"");
  json root = json::parse(in, nullptr, false);
  if (root.is_discarded()) fail_usage("config file is not valid JSON");
  if (!root.is_object()) fail_usage("config must be a JSON object");
  reject_unknown(root, "config",
                 {"kernel", "interval", "quadrature", "mean", "selection",
                  "sampling", "output"});

  Config cfg;
  cfg.raw = root;

  if (!root.contains("kernel") || !root["kernel"].is_object()) {
    fail_usage("config.kernel must be an object");
  }
  cfg.kernel = root["kernel"];

  if (!root.contains("interval") || !root["interval"].is_array() ||
      root["interval"].size() != 2 || !root["interval"][0].is_number() ||
      !root["interval"][1].is_number()) {
    fail_usage("config.interval must be [a, b]");
  }
  cfg.a = root["interval"][0].get<double>();
  cfg.b = root["interval"][1].get<double>();
  if (!(cfg.a < cfg.b)) fail_usage("config.interval requires a < b");

  if (!root.contains("quadrature") || !root["quadrature"].is_object()) {
    fail_usage("config.quadrature must be an object");
  }
  const json& quad = root["quadrature"];
  reject_unknown(quad, "config.quadrature", {"rule", "n"});
  if (!quad.contains("rule") || !quad["rule"].is_string()) {
    fail_usage("config.quadrature.rule must be \"trapezoid\" or \"gauss\"");
  }
  cfg.rule_name = quad["rule"].get<std::string>();
  if (cfg.rule_name != "trapezoid" && cfg.rule_name != "gauss") {
    fail_usage("config.quadrature.rule must be \"trapezoid\" or \"gauss\"");
  }
  const std::int64_t n = require_integer(quad, "config.quadrature", "n");
  if (n < 1 || n > 100000) fail_usage("config.quadrature.n out of range");
  cfg.n = static_cast<std::int32_t>(n);

  cfg.mean = json{{"type", "zero"}};
  if (root.contains("mean")) {
    const json& mean = root["mean"];
    if (!mean.is_object() || !mean.contains("type") ||
        !mean["type"].is_string()) {
      fail_usage("config.mean must be an object with a \"type\"");
    }
    const std::string type = mean["type"].get<std::string>();
    if (type == "zero") {
      reject_unknown(mean, "config.mean", {"type"});
    } else if (type == "constant") {
      reject_unknown(mean, "config.mean", {"type", "value"});
      require_number(mean, "config.mean", "value");
    } else if (type == "grid") {
      reject_unknown(mean, "config.mean", {"type", "values"});
      if (!mean.contains("values") || !mean["values"].is_array()) {
        fail_usage("config.mean.values must be an array");
      }
    } else {
      fail_usage("config.mean.type must be zero, constant, or grid");
    }
    cfg.mean = mean;
  }

  if (root.contains("selection")) {
    const json& sel = root["selection"];
    if (!sel.is_object()) fail_usage("config.selection must be an object");
    reject_unknown(sel, "config.selection", {"rank", "threshold"});
    if (sel.contains("rank") == sel.contains("threshold")) {
      fail_usage("config.selection needs exactly one of rank/threshold");
    }
    if (sel.contains("rank")) {
      const std::int64_t r = require_integer(sel, "config.selection", "rank");
      if (r < 0) fail_usage("config.selection.rank must be >= 0");
      cfg.selection_rank = static_cast<std::int32_t>(r);
    } else {
      const double t = require_number(sel, "config.selection", "threshold");
      if (!(t > 0.0) || t > 1.0) {
        fail_usage("config.selection.threshold must lie in (0, 1]");
      }
      cfg.selection_threshold = t;
    }
  }

  if (root.contains("sampling")) {
    const json& sampling = root["sampling"];
    if (!sampling.is_object()) fail_usage("config.sampling must be an object");
    reject_unknown(sampling, "config.sampling", {"count", "seed"});
    const std::int64_t count =
        require_integer(sampling, "config.sampling", "count");
    if (count < 1) fail_usage("config.sampling.count must be >= 1");
    cfg.sample_count = static_cast<std::int32_t>(count);
    if (sampling.contains("seed")) {
      if (!sampling["seed"].is_number_unsigned() &&
          !sampling["seed"].is_number_integer()) {
        fail_usage("config.sampling.seed must be an integer");
      }
      cfg.seed = sampling["seed"].get<std::uint64_t>();
    }
  }

  if (root.contains("output")) {
    if (!root["output"].is_string()) fail_usage("config.output must be a string");
    cfg.output = root["output"].get<std::string>();
  }
  return cfg;
}

/* RAII wrappers for the C handles. */
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() {
    if (ptr) Free(ptr);
  }
  T** out() { return &ptr; }
  operator T*() const { return ptr; }
};

using RuleHandle = Handle<kle_rule, kle_rule_free>;
using KernelHandle = Handle<kle_kernel, kle_kernel_free>;
using DecompHandle = Handle<kle_decomp, kle_decomp_free>;
using ModelHandle = Handle<kle_model, kle_model_free>;
using EnsembleHandle = Handle<kle_ensemble, kle_ensemble_free>;
using ReportHandle = Handle<kle_report, kle_report_free>;

void make_rule(const Config& cfg, RuleHandle& rule) {
  kle_status status =
      cfg.rule_name == "gauss"
          ? kle_rule_gauss_legendre(cfg.a, cfg.b, cfg.n, rule.out())
          : kle_rule_trapezoid(cfg.a, cfg.b, cfg.n, rule.out());
  check_status(status, "config.quadrature");
}

void make_kernel(const Config& cfg, KernelHandle& kernel) {
  check_status(
      kle_kernel_from_json(cfg.kernel.dump().c_str(), cfg.a, cfg.b,
                           kernel.out()),
      "config.kernel");
}

std::vector<double> mean_nodes_for(const Config& cfg, const RuleHandle& rule) {
  const std::string type = cfg.mean["type"].get<std::string>();
  if (type == "zero") return {};
  const std::int32_t n = kle_rule_size(rule);
  if (type == "constant") {
    return std::vector<double>(n, cfg.mean["value"].get<double>());
  }
  const json& values = cfg.mean["values"];
  if (static_cast<std::int32_t>(values.size()) != n) {
    fail_usage("config.mean.values must have one entry per quadrature node");
  }
  std::vector<double> nodes(n);
  for (std::int32_t i = 0; i < n; ++i) {
    if (!values[i].is_number()) fail_usage("config.mean.values must be numeric");
    nodes[i] = values[i].get<double>();
  }
  return nodes;
}

void make_model(const Config& cfg, const KernelHandle& kernel,
                const RuleHandle& rule, ModelHandle& model) {
  if (!cfg.selection_rank && !cfg.selection_threshold) {
    fail_usage("config.selection is required for this command");
  }
  std::vector<double> mean = mean_nodes_for(cfg, rule);
  const double* mean_ptr = mean.empty() ? nullptr : mean.data();
  kle_status status =
      cfg.selection_rank
          ? kle_model_fixed_rank(kernel, rule, mean_ptr, *cfg.selection_rank,
                                 model.out())
          : kle_model_threshold(kernel, rule, mean_ptr,
                                *cfg.selection_threshold, model.out());
  check_status(status, "config.selection");
}

std::filesystem::path prepare_output(const Config& cfg,
                                     const std::string& out_flag) {
  std::string dir = !out_flag.empty() ? out_flag : cfg.output;
  if (dir.empty()) {
    fail_usage("no output directory: set config.output or pass --out");
  }
  std::filesystem::path path(dir);
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) fail_usage("cannot create output directory \"" + dir + "\"");
  return path;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_usage("cannot write \"" + path.string() + "\"");
  out << body;
}

json meta_common(const Config& cfg, const std::string& command) {
  return json{{"command", command},
              {"config", cfg.raw},
              {"seed", cfg.seed},
              {"n", cfg.n}};
}

double kernel_diag(double x, void* ctx) {
  double value = 0.0;
  if (kle_kernel_eval(static_cast<const kle_kernel*>(ctx), x, x, &value) !=
      KLE_OK) {
    return std::nan("");
  }
  return value;
}

/* spectrum.csv: index,lambda,lambda_normalized,rho_cumulative over the full
 * discrete spectrum. */
int cmd_spectrum(const Config& cfg, const std::string& out_flag) {
  const std::filesystem::path out_dir = prepare_output(cfg, out_flag);
  KernelHandle kernel;
  RuleHandle rule;
  make_kernel(cfg, kernel);
  make_rule(cfg, rule);

  DecompHandle dec;
  check_status(kle_decomp_compute(kernel, rule, cfg.n, dec.out()),
               "spectrum decomposition");
  std::vector<double> lambdas(cfg.n);
  check_status(kle_decomp_eigenvalues(dec, lambdas.data()), "eigenvalues");

  double total = 0.0;
  check_status(kle_integrate(rule, kernel_diag, kernel.ptr, &total),
               "total variance");
  if (!(total > 0.0)) fail_usage("kernel has nonpositive total variance");

  std::string csv = "index,lambda,lambda_normalized,rho_cumulative\n";
  double cumulative = 0.0;
  for (std::int32_t i = 0; i < cfg.n; ++i) {
    cumulative += lambdas[i];
    const double rho = std::min(cumulative / total, 1.0);
    csv += std::to_string(i + 1) + ',' + format_double(lambdas[i]) + ',' +
           format_double(lambdas[i] / lambdas[0]) + ',' + format_double(rho) +
           '\n';
  }
  write_file(out_dir / "spectrum.csv", csv);

  json meta = meta_common(cfg, "spectrum");
  meta["total_variance"] = total;
  write_file(out_dir / "spectrum_meta.json", meta.dump(2) + "\n");
  return kExitOk;
}

/* realizations.csv: x,sample_0,...,sample_{N-1} on the quadrature nodes. */
int cmd_sample(const Config& cfg, const std::string& out_flag) {
  if (!cfg.sample_count) fail_usage("config.sampling is required for sample");
  const std::filesystem::path out_dir = prepare_output(cfg, out_flag);
  KernelHandle kernel;
  RuleHandle rule;
  ModelHandle model;
  make_kernel(cfg, kernel);
  make_rule(cfg, rule);
  make_model(cfg, kernel, rule, model);

  const std::int32_t count = *cfg.sample_count;
  EnsembleHandle ensemble;
  check_status(kle_sample(model, count, cfg.seed, ensemble.out()), "sampling");

  std::vector<double> nodes(cfg.n);
  check_status(kle_rule_nodes(rule, nodes.data()), "nodes");
  std::vector<std::vector<double>> columns(count,
                                           std::vector<double>(cfg.n));
  for (std::int32_t s = 0; s < count; ++s) {
    check_status(kle_ensemble_values_on_nodes(ensemble, s, columns[s].data()),
                 "realization");
  }

  std::string csv = "x";
  for (std::int32_t s = 0; s < count; ++s) {
    csv += ",sample_" + std::to_string(s);
  }
  csv += '\n';
  for (std::int32_t k = 0; k < cfg.n; ++k) {
    csv += format_double(nodes[k]);
    for (std::int32_t s = 0; s < count; ++s) {
      csv += ',' + format_double(columns[s][k]);
    }
    csv += '\n';
  }
  write_file(out_dir / "realizations.csv", csv);

  json meta = meta_common(cfg, "sample");
  meta["kernel"] = cfg.kernel;
  meta["r"] = kle_model_rank(model);
  meta["rho"] = kle_model_rho(model);
  meta["count"] = count;
  write_file(out_dir / "meta.json", meta.dump(2) + "\n");
  return kExitOk;
}

/* truncation.csv: one realization of the model restricted to each rank in
 * --ranks; all columns share the same coefficient draws. */
int cmd_truncation(const Config& cfg, const std::string& out_flag,
                   const std::vector<std::int32_t>& ranks) {
  if (ranks.empty()) fail_usage("--ranks is required for truncation");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] < 1) fail_usage("--ranks entries must be >= 1");
    if (i > 0 && ranks[i] <= ranks[i - 1]) {
      fail_usage("--ranks must be strictly ascending");
    }
  }
  const std::filesystem::path out_dir = prepare_output(cfg, out_flag);
  KernelHandle kernel;
  RuleHandle rule;
  make_kernel(cfg, kernel);
  make_rule(cfg, rule);

  std::vector<double> mean = mean_nodes_for(cfg, rule);
  const double* mean_ptr = mean.empty() ? nullptr : mean.data();
  ModelHandle model;
  check_status(kle_model_fixed_rank(kernel, rule, mean_ptr, ranks.back(),
                                    model.out()),
               "--ranks");

  EnsembleHandle ensemble;
  check_status(kle_sample(model, 1, cfg.seed, ensemble.out()), "sampling");

  std::vector<double> nodes(cfg.n);
  check_status(kle_rule_nodes(rule, nodes.data()), "nodes");
  std::vector<std::vector<double>> columns;
  for (std::int32_t r : ranks) {
    std::vector<double> values(cfg.n);
    check_status(kle_ensemble_truncated_values(ensemble, 0, r, values.data()),
                 "truncated realization");
    columns.push_back(std::move(values));
  }

  std::string csv = "x";
  for (std::int32_t r : ranks) csv += ",r" + std::to_string(r);
  csv += '\n';
  for (std::int32_t k = 0; k < cfg.n; ++k) {
    csv += format_double(nodes[k]);
    for (const auto& column : columns) csv += ',' + format_double(column[k]);
    csv += '\n';
  }
  write_file(out_dir / "truncation.csv", csv);

  json meta = meta_common(cfg, "truncation");
  meta["ranks"] = ranks;
  meta["rho"] = kle_model_rho(model);
  write_file(out_dir / "truncation_meta.json", meta.dump(2) + "\n");
  return kExitOk;
}

json report_json(const kle_report* report, bool include_rows) {
  json params = json::object();
  for (std::int32_t i = 0; i < kle_report_params(report); ++i) {
    params[kle_report_param_key(report, i)] = kle_report_param_value(report, i);
  }
  json columns = json::array();
  const std::int32_t n_columns = kle_report_columns(report);
  for (std::int32_t i = 0; i < n_columns; ++i) {
    columns.push_back(kle_report_column_name(report, i));
  }
  json j{{"name", kle_report_name(report)},
         {"parameters", params},
         {"columns", columns}};
  const std::int32_t pass = kle_report_pass(report);
  j["pass"] = pass < 0 ? json(nullptr) : json(pass == 1);
  if (include_rows) {
    json rows = json::array();
    std::vector<double> row(n_columns);
    for (std::int32_t i = 0; i < kle_report_rows(report); ++i) {
      kle_report_row(report, i, row.data());
      rows.push_back(row);
    }
    j["rows"] = rows;
  }
  return j;
}

std::string report_csv(const kle_report* report) {
  const std::int32_t n_columns = kle_report_columns(report);
  std::string csv;
  for (std::int32_t i = 0; i < n_columns; ++i) {
    if (i > 0) csv += ',';
    csv += kle_report_column_name(report, i);
  }
  csv += '\n';
  std::vector<double> row(n_columns);
  for (std::int32_t i = 0; i < kle_report_rows(report); ++i) {
    kle_report_row(report, i, row.data());
    for (std::int32_t c = 0; c < n_columns; ++c) {
      if (c > 0) csv += ',';
      csv += format_double(row[c]);
    }
    csv += '\n';
  }
  return csv;
}

/* verify.json: one entry per diagnostic check; exit 1 when any fails. */
int cmd_verify(const Config& cfg, const std::string& out_flag) {
  const std::filesystem::path out_dir = prepare_output(cfg, out_flag);
  KernelHandle kernel;
  RuleHandle rule;
  make_kernel(cfg, kernel);
  make_rule(cfg, rule);

  kle_report** reports = nullptr;
  std::int32_t count = 0;
  check_status(kle_verify(kernel, rule, cfg.seed, &reports, &count), "verify");

  bool all_pass = true;
  json checks = json::array();
  for (std::int32_t i = 0; i < count; ++i) {
    checks.push_back(report_json(reports[i], true));
    if (kle_report_pass(reports[i]) == 0) all_pass = false;
  }
  kle_report_array_free(reports, count);

  json result = meta_common(cfg, "verify");
  result["pass"] = all_pass;
  result["checks"] = checks;
  write_file(out_dir / "verify.json", result.dump(2) + "\n");

  for (const auto& check : checks) {
    const std::string name = check["name"].get<std::string>();
    const bool pass = !check["pass"].is_null() && check["pass"].get<bool>();
    std::cout << (pass ? "PASS " : "FAIL ") << name << '\n';
  }
  std::cout << (all_pass ? "verify: all checks passed"
                         : "verify: checks FAILED")
            << '\n';
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_study(const Config& cfg, const std::string& out_flag,
              const std::string& which) {
  const std::filesystem::path out_dir = prepare_output(cfg, out_flag);
  ReportHandle report;

  if (which == "grid-refinement") {
    KernelHandle kernel;
    make_kernel(cfg, kernel);
    const std::vector<std::int32_t> indices = {5, 10};
    std::vector<std::int32_t> sizes;
    for (std::int32_t n = 25; n <= cfg.n / 2; n *= 2) sizes.push_back(n);
    if (sizes.empty()) fail_usage("config.quadrature.n too small for the study");
    check_status(
        kle_study_grid_refinement(kernel, indices.data(),
                                  static_cast<std::int32_t>(indices.size()),
                                  sizes.data(),
                                  static_cast<std::int32_t>(sizes.size()),
                                  cfg.n, report.out()),
        "grid refinement study");
  } else if (which == "correlation") {
    const double sigma = cfg.kernel.contains("sigma") &&
                                 cfg.kernel["sigma"].is_number()
                             ? cfg.kernel["sigma"].get<double>()
                             : 1.0;
    const std::vector<double> ells = {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2,
                                      1.0};
    const double x0 = cfg.a + 0.25 * (cfg.b - cfg.a);
    std::vector<double> ys;
    const std::int32_t points = 151;
    for (std::int32_t i = 0; i < points; ++i) {
      ys.push_back(x0 + (cfg.b - x0) * static_cast<double>(i) /
                            static_cast<double>(points - 1));
    }
    check_status(kle_study_correlation(cfg.a, cfg.b, sigma, x0, ells.data(),
                                       static_cast<std::int32_t>(ells.size()),
                                       ys.data(),
                                       static_cast<std::int32_t>(ys.size()),
                                       report.out()),
                 "correlation study");
  } else {
    fail_usage("unknown study \"" + which +
               "\" (expected grid-refinement or correlation)");
  }

  const std::string name = kle_report_name(report);
  write_file(out_dir / (name + ".csv"), report_csv(report));
  json meta = report_json(report, false);
  meta["config"] = cfg.raw;
  write_file(out_dir / (name + ".json"), meta.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("KLE_THREADS")) {
    const int threads = std::atoi(env);
    if (threads >= 1) kle_set_max_threads(threads);
  }

  CLI::App app{"Karhunen-Loeve expansions of random fields on an interval"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::vector<std::int32_t> ranks;
  std::string study_name;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", seed_override, "seed override");
  };

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "eigenvalue table of the covariance operator");
  add_common(spectrum);
  CLI::App* sample =
      app.add_subcommand("sample", "draw realizations of the field");
  add_common(sample);
  CLI::App* truncation = app.add_subcommand(
      "truncation", "one realization at several truncation levels");
  add_common(truncation);
  truncation->add_option("--ranks", ranks, "ascending truncation ranks")
      ->required()
      ->delimiter(',');
  CLI::App* verify =
      app.add_subcommand("verify", "run the diagnostic checks");
  add_common(verify);
  CLI::App* study = app.add_subcommand(
      "study", "parameter studies: grid-refinement or correlation");
  study->add_option("name", study_name, "study name")->required();
  add_common(study);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    Config cfg = parse_config(config_path);
    if (seed_override) cfg.seed = *seed_override;

    if (spectrum->parsed()) return cmd_spectrum(cfg, out_dir);
    if (sample->parsed()) return cmd_sample(cfg, out_dir);
    if (truncation->parsed()) return cmd_truncation(cfg, out_dir, ranks);
    if (verify->parsed()) return cmd_verify(cfg, out_dir);
    if (study->parsed()) return cmd_study(cfg, out_dir, study_name);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

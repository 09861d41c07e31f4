#include "sketchlab/bench.hpp"
#include "sketchlab/families.hpp"
#include "sketchlab/inputs.hpp"
#include "sketchlab/lsr.hpp"
#include "sketchlab/matrix_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

using namespace sketchlab;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2 };

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& c, bool with_config) {
  if (with_config) app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "base seed")->each([&c](const std::string&) { c.seed_set = true; });
  app->add_option("--trials", c.trials, "trial count")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output path (default stdout)");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream os(c.out);
  if (!os) throw std::runtime_error("cannot write " + c.out);
  os << text;
  if (!text.empty() && text.back() != '\n') os << '\n';
}

void emit_json(const Common& c, const std::string& kind, json payload) {
  emit(c, bench::envelope(kind, std::move(payload)).dump(2));
}

bench::ExperimentConfig experiment_from(const Common& c) {
  if (c.config.empty()) throw InvalidArgument("--config is required");
  json j = load_json(c.config);
  if (c.trials > 0) j["trials"] = c.trials;
  if (c.seed_set) j["seed"] = c.seed;
  return bench::ExperimentConfig::from_json(j);
}

// Optional "bracket": [lo, hi] on the mean error and "min_success_rate" in the config file.
int check_expectations(const Common& c, const bench::ExperimentReport& r) {
  const json j = load_json(c.config);
  bool ok = true;
  if (j.contains("bracket")) {
    const auto b = j.at("bracket").get<std::vector<double>>();
    if (b.size() != 2) throw InvalidArgument("bracket must be [lo, hi]");
    ok = ok && r.delta.mean >= b[0] && r.delta.mean <= b[1];
  }
  if (j.contains("min_success_rate")) ok = ok && r.success_rate >= j.at("min_success_rate").get<double>();
  return ok ? kOk : kViolation;
}

int run_gen(const Common& c, bench::InputSpec spec) {
  if (!c.config.empty()) {
    const json j = load_json(c.config);
    spec = bench::InputSpec::from_json(j.contains("input") ? j.at("input") : j);
  }
  if (c.out.empty()) throw InvalidArgument("gen needs --out");
  const bench::GeneratedInput g = bench::generate(spec, c.seed);
  const bool tsv = c.format == "csv" || (c.out.size() >= 4 && c.out.compare(c.out.size() - 4, 4, ".tsv") == 0);
  if (tsv) {
    std::ofstream os(c.out);
    if (!os) throw std::runtime_error("cannot write " + c.out);
    io::write_tsv(os, g.M);
  } else {
    io::write_sklb_file(c.out, g.M);
  }
  const json side{{"schema", bench::kReportSchema},
                  {"kind", "matrix"},
                  {"input", spec.to_json()},
                  {"seed", c.seed},
                  {"rows", g.M.rows()},
                  {"cols", g.M.cols()},
                  {"sigma_next", g.sigma_next},
                  {"file", c.out}};
  std::ofstream sidecar(c.out + ".json");
  sidecar << side.dump(2) << '\n';
  return kOk;
}

int run_approx(const Common& c, bool recursive) {
  bench::ExperimentConfig cfg = experiment_from(c);
  if (recursive && cfg.block_sizes.empty()) throw InvalidArgument("recursive needs block_sizes in the config");
  if (!recursive && !cfg.block_sizes.empty()) throw InvalidArgument("approx takes no block_sizes; use recursive");
  const bench::ExperimentReport r = bench::run_experiment(cfg);
  if (c.format == "csv")
    emit(c, bench::reports_to_csv({r}));
  else
    emit_json(c, "experiment", r.to_json());
  return check_expectations(c, r);
}

struct LsrArgs {
  Index m = 2000, d = 10, k = 0;
  std::string sketch = "structured";
  double xi = 0.5;
  double min_fraction = 0.9;
};

int run_lsr(const Common& c, const LsrArgs& a) {
  const Index k = a.k > 0 ? a.k : 4 * (a.d + 1);
  const int trials = c.trials > 0 ? c.trials : 200;
  Rng rng(c.seed);
  const auto kind = a.sketch == "gaussian" ? lsr::SketchKind::Gaussian : lsr::SketchKind::Structured;
  const lsr::RatioSummary s = lsr::residual_ratio_trial(a.m, a.d, k, kind, trials, rng);
  const double frac = s.fraction_within(a.xi);
  const bool ok = frac >= a.min_fraction;
  if (c.format == "csv") {
    std::string out = "trial,ratio\n";
    for (std::size_t i = 0; i < s.ratios.size(); ++i) out += fmt::format("{},{:.9f}\n", i, s.ratios[i]);
    emit(c, out);
  } else {
    emit_json(c, "lsr",
              {{"m", a.m}, {"d", a.d}, {"k", k}, {"sketch", a.sketch}, {"trials", trials}, {"seed", c.seed},
               {"xi", a.xi}, {"fraction_within", frac}, {"q05", s.q05}, {"q50", s.q50}, {"q95", s.q95},
               {"ratios", s.ratios}, {"pass", ok}});
  }
  return ok ? kOk : kViolation;
}

int run_bench(const Common& c, const std::string& table, const std::string& scale, int threads) {
  bench::TableOptions o;
  o.scale = bench::scale_from_string(scale);
  if (c.seed_set) o.seed = c.seed;
  o.trials = c.trials;
  o.threads = threads;
  std::vector<int> ids;
  if (table == "all") {
    ids = bench::table_ids();
  } else {
    try {
      ids = {std::stoi(table)};
    } catch (const std::exception&) {
      throw InvalidArgument("--table must be 2..9 or all");
    }
  }
  bool ok = true;
  json tables = json::array();
  std::string csv;
  for (int id : ids) {
    const bench::TableResult t = bench::reproduce_table(id, o);
    ok = ok && t.pass();
    tables.push_back(t.to_json());
    csv += bench::table_to_csv(t);
    std::cerr << fmt::format("table {} ({}): {} in {:.1f}s\n", id, bench::to_string(o.scale),
                             t.pass() ? "pass" : "FAIL", t.wall_seconds);
  }
  if (c.format == "csv")
    emit(c, csv);
  else
    emit_json(c, "tables", {{"pass", ok}, {"tables", std::move(tables)}});
  return ok ? kOk : kViolation;
}

int run_audit(const Common& c, const std::vector<Index>& sizes) {
  const auto rows = bench::flop_audit(sizes);
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const bench::AuditRow& r) { return r.pass(); });
  if (c.format == "csv")
    emit(c, bench::audit_to_csv(rows));
  else
    emit_json(c, "audit", bench::audit_to_json(rows));
  return ok ? kOk : kViolation;
}

int run_mc(const Common& c, const std::vector<std::pair<Index, Index>>& shapes) {
  const int trials = c.trials > 0 ? c.trials : 500;
  Rng rng(c.seed);
  bool ok = true;
  json arr = json::array();
  std::string csv = "m,n,trials,mean_norm,se_norm,bound_norm,mean_pinv,se_pinv,bound_pinv,pass\n";
  for (const auto& [m, n] : shapes) {
    const bench::NormSummary s = bench::monte_carlo_gaussian_norms(m, n, trials, rng);
    ok = ok && s.pass();
    arr.push_back(s.to_json());
    csv += s.pinv_checked ? fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", m, n, trials,
                                        s.mean_norm, s.se_norm, s.bound_norm, s.mean_pinv, s.se_pinv,
                                        s.bound_pinv, s.pass() ? 1 : 0)
                          : fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},,,,{}\n", m, n, trials, s.mean_norm,
                                        s.se_norm, s.bound_norm, s.pass() ? 1 : 0);
  }
  if (c.format == "csv")
    emit(c, csv);
  else
    emit_json(c, "mc-norms", {{"pass", ok}, {"seed", c.seed}, {"summaries", std::move(arr)}});
  return ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-multiplier low-rank approximation toolkit"};
  app.require_subcommand(1);
  Common common;

  auto* gen = app.add_subcommand("gen", "generate an input matrix and a JSON sidecar");
  add_common(gen, common, true);
  bench::InputSpec spec;
  gen->add_option("--kind", spec.kind, "svd, laplacian, fd, factor_gaussian")
      ->check(CLI::IsMember({"svd", "laplacian", "fd", "factor_gaussian"}));
  gen->add_option("--n", spec.n, "columns");
  gen->add_option("--m", spec.m, "rows (factor_gaussian)");
  gen->add_option("--r", spec.r, "rank");
  gen->add_option("--tail", spec.tail, "trailing singular value (svd)");
  gen->add_option("--noise", spec.noise, "noise norm (factor_gaussian)");
  gen->add_option("--preset", spec.preset, "small, medium, large (fd)");

  auto* approx = app.add_subcommand("approx", "repeat the range finder over trials");
  add_common(approx, common, true);
  auto* recursive = app.add_subcommand("recursive", "repeat the block-growing range finder over trials");
  add_common(recursive, common, true);

  auto* lsr_cmd = app.add_subcommand("lsr", "sketched least-squares residual ratios");
  add_common(lsr_cmd, common, false);
  LsrArgs la;
  lsr_cmd->add_option("--m", la.m, "rows");
  lsr_cmd->add_option("--d", la.d, "columns of A");
  lsr_cmd->add_option("--k", la.k, "sketch rows (default 4(d+1))");
  lsr_cmd->add_option("--sketch", la.sketch, "gaussian or structured")
      ->check(CLI::IsMember({"gaussian", "structured"}));
  lsr_cmd->add_option("--xi", la.xi, "ratio tolerance");
  lsr_cmd->add_option("--min-fraction", la.min_fraction, "required fraction within [1-xi, 1+xi]");

  auto* bench_cmd = app.add_subcommand("bench", "reproduce an error-norm table");
  add_common(bench_cmd, common, false);
  std::string table = "all";
  std::string scale = "desk";
  int threads = 0;
  bench_cmd->add_option("--table", table, "2..9 or all");
  bench_cmd->add_option("--scale", scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
  bench_cmd->add_option("--threads", threads, "worker threads (0: hardware)");

  auto* audit = app.add_subcommand("audit", "flop and random-variable audit of the catalog");
  add_common(audit, common, false);
  std::vector<Index> sizes{128, 512, 1024};
  audit->add_option("--n", sizes, "orders (powers of two)");

  auto* mc = app.add_subcommand("mc-norms", "Monte Carlo Gaussian norm expectations");
  add_common(mc, common, false);
  std::vector<Index> mc_m{100, 200, 400}, mc_n{100, 100, 100};
  mc->add_option("--m", mc_m, "row counts");
  mc->add_option("--n", mc_n, "column counts (paired with --m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      if (spec.kind == "fd" && gen->count("--r") == 0) spec.r = inputs::fd_preset(spec.preset).expected_rank;
      return run_gen(common, spec);
    }
    if (*approx) return run_approx(common, false);
    if (*recursive) return run_approx(common, true);
    if (*lsr_cmd) return run_lsr(common, la);
    if (*bench_cmd) return run_bench(common, table, scale, threads);
    if (*audit) return run_audit(common, sizes);
    if (*mc) {
      if (mc_m.size() != mc_n.size()) throw InvalidArgument("--m and --n need the same number of values");
      std::vector<std::pair<Index, Index>> shapes;
      for (std::size_t i = 0; i < mc_m.size(); ++i) shapes.emplace_back(mc_m[i], mc_n[i]);
      return run_mc(common, shapes);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "sketchlab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "sketchlab: " << e.what() << '\n';
    return kViolation;
  }
  return kUsage;
}

#include <doctest.h>

#include "sketchlab/bench.hpp"
#include "sketchlab/families.hpp"
#include "sketchlab/inputs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

using namespace sketchlab;
using namespace sketchlab::bench;

#ifndef SKETCHLAB_REFERENCE_DOC
#error "SKETCHLAB_REFERENCE_DOC must name the document holding the reference tables"
#endif

namespace {

ExperimentConfig svd_config(Index n, Index r, const std::string& recipe, Index l, int trials) {
  ExperimentConfig c;
  c.label = recipe;
  c.input.kind = "svd";
  c.input.n = n;
  c.input.r = r;
  c.multiplier = mult::recipe(recipe, n, l);
  c.trials = trials;
  c.seed = 42;
  return c;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Numbers written as 1.23e-08, 1.23E-08 or 1.23\times 10^{-8}.
std::vector<double> numbers_in(const std::string& line) {
  static const std::regex re(R"((\d+\.\d+)\s*(?:[eE]([-+]?\d+)|\$?\s*\\times\s*10\^\{([-+]?\d+)\}))");
  std::vector<double> out;
  for (auto it = std::sregex_iterator(line.begin(), line.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string e = m[2].matched ? m[2].str() : m[3].str();
    out.push_back(std::stod(m[1].str() + "e" + e));
  }
  return out;
}

bool contains_value(const std::vector<double>& v, double x) {
  return std::any_of(v.begin(), v.end(), [x](double y) { return std::abs(y - x) <= 1e-9 * std::abs(x); });
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  return a == std::string::npos ? "" : s.substr(a);
}

// Lines of the source document whose leading cells equal `prefix` when split on '&'.
std::vector<std::string> rows_with_prefix(const std::vector<std::string>& lines, const std::vector<std::string>& prefix) {
  std::vector<std::string> out;
  for (const auto& line : lines) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '&');) {
      while (!c.empty() && std::isspace(static_cast<unsigned char>(c.back()))) c.pop_back();
      cells.push_back(trim(c));
    }
    if (cells.size() < prefix.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < prefix.size() && ok; ++i) ok = cells[i] == prefix[i];
    if (ok) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("input spec round trip and validation") {
  InputSpec s;
  s.kind = "factor_gaussian";
  s.m = 64;
  s.n = 48;
  s.r = 5;
  s.noise = 1e-12;
  const InputSpec t = InputSpec::from_json(s.to_json());
  CHECK(t.to_json() == s.to_json());
  CHECK_FALSE(t.deterministic());
  CHECK(InputSpec::from_json({{"kind", "laplacian"}, {"n", 200}}).deterministic());
  CHECK_THROWS_AS(InputSpec::from_json({{"kind", "mystery"}}), InvalidArgument);

  const GeneratedInput g = generate(t, 3);
  CHECK(g.M.rows() == 64);
  CHECK(g.M.cols() == 48);
  CHECK(g.sigma_next == doctest::Approx(linalg::singular_values(g.M)[5]));
}

TEST_CASE("aggregates match an ordered recomputation bit for bit") {
  const ExperimentReport rep = run_experiment(svd_config(128, 8, "3-ah", 12, 12));
  REQUIRE(rep.deltas.size() == 12);
  const double sum = std::accumulate(rep.deltas.begin(), rep.deltas.end(), 0.0);
  const double mean = sum / 12.0;
  double ss = 0.0;
  for (double d : rep.deltas) ss += (d - mean) * (d - mean);
  CHECK(rep.delta.mean == mean);
  CHECK(rep.delta.std == std::sqrt(ss / 12.0));
  CHECK(rep.delta.max == *std::max_element(rep.deltas.begin(), rep.deltas.end()));
  const Aggregates again = aggregate(rep.deltas);
  CHECK(again.mean == rep.delta.mean);
  CHECK(again.std == rep.delta.std);
  CHECK(again.max == rep.delta.max);

  const Aggregates empty = aggregate({});
  CHECK(empty.mean == 0.0);
}

TEST_CASE("reports are reproducible from the config echo") {
  ExperimentConfig c = svd_config(128, 8, "3-asph", 12, 8);
  c.threads = 1;
  const ExperimentReport a = run_experiment(c);
  c.threads = 4;
  const ExperimentReport b = run_experiment(c);
  CHECK(a.deltas == b.deltas);
  CHECK(a.flops == b.flops);

  const ExperimentConfig echoed = ExperimentConfig::from_json(a.to_json().at("config"));
  CHECK(echoed.multiplier == c.multiplier);
  CHECK(echoed.to_json() == a.config.to_json());
  const ExperimentReport c2 = run_experiment(echoed);
  CHECK(c2.deltas == a.deltas);

  const ExperimentReport parsed = ExperimentReport::from_json(a.to_json());
  CHECK(parsed.deltas == a.deltas);
  CHECK(parsed.delta.mean == a.delta.mean);
  CHECK(parsed.tau_used == a.tau_used);

  c.seed = 43;
  CHECK(run_experiment(c).deltas != a.deltas);
}

TEST_CASE("single trial with tau = ||M|| succeeds") {
  ExperimentConfig c = svd_config(64, 4, "gaussian", 2, 1);
  c.tau = 1.0;  // sigma_1 = 1 for the spectrum generator
  const ExperimentReport r = run_experiment(c);
  CHECK(r.success_rate == 1.0);
  CHECK(r.config.trials == 1);
  CHECK(r.to_json().at("config").at("tau") == 1.0);
}

TEST_CASE("config parsing") {
  const nlohmann::json j = {{"label", "x"},
                            {"input", {{"kind", "svd"}, {"n", 128}, {"r", 8}}},
                            {"multiplier", {{"recipe", "3-ah"}, {"l", 12}}},
                            {"trials", 3},
                            {"estimator", "frievalds"},
                            {"seed", 5}};
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.multiplier == mult::recipe("3-ah", 128, 12));
  CHECK(c.estimator.mode == rf::ErrorEstimator::Mode::Frievalds);
  CHECK(c.tau < 0);
  const ExperimentReport r = run_experiment(c);
  CHECK(r.tau_used == doctest::Approx(1e-9));

  nlohmann::json bad = j;
  bad["trials"] = 0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), InvalidArgument);
  bad = j;
  bad["multiplier"] = {{"recipe", "no-such"}, {"l", 4}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), InvalidArgument);
  bad = j;
  bad.erase("multiplier");
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), InvalidArgument);
}

TEST_CASE("grouped runs share inputs and reject mismatches") {
  const ExperimentConfig a = svd_config(128, 8, "3-ah", 12, 6);
  const ExperimentConfig b = svd_config(128, 8, "ternary", 12, 6);
  const auto group = run_experiment_group({a, b});
  CHECK(group[0].deltas == run_experiment(a).deltas);
  CHECK(group[1].deltas == run_experiment(b).deltas);

  ExperimentConfig other = b;
  other.input.r = 4;
  CHECK_THROWS_AS(run_experiment_group({a, other}), InvalidArgument);
  other = b;
  other.trials = 5;
  CHECK_THROWS_AS(run_experiment_group({a, other}), InvalidArgument);

  ExperimentConfig wide = a;
  wide.multiplier = mult::recipe("3-ah", 64, 12);
  CHECK_THROWS_AS(run_experiment(wide), InvalidArgument);
}

TEST_CASE("abridged Hadamard on SVD-spectrum inputs lands in the bracket") {
  const ExperimentReport r = run_experiment(svd_config(256, 8, "3-ah", 12, 30));
  CHECK(r.delta.mean >= 1e-9);
  CHECK(r.delta.mean <= 1e-6);
  CHECK(r.numerical_rank == 8);
}

TEST_CASE("Laplacian with three power iterations") {
  ExperimentConfig c;
  c.input.kind = "laplacian";
  c.input.n = 200;
  c.input.r = 25;
  c.multiplier = mult::recipe("gaussian", 200, 25);
  c.power_iterations = 3;
  c.trials = 20;
  c.seed = 9;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.delta.mean >= 1e-7);
  CHECK(r.delta.mean <= 1e-3);
}

TEST_CASE("table layouts") {
  TableOptions o;
  const TableResult t2 = table_layout(2, o);
  REQUIRE(t2.rows.size() == 6);
  for (const auto& row : t2.rows) {
    CHECK(row.cells.size() == 3);
    for (const auto& c : row.cells) {
      CHECK(c.bracket.lo == 1e-9);
      CHECK(c.bracket.hi == 1e-6);
      CHECK(c.config.trials == (row.params.at("n") == 1024 ? 20 : 100));
    }
  }
  CHECK(table_layout(6, o).rows.size() == 2);
  CHECK(table_layout(9, o).rows.size() == 18);
  CHECK(table_layout(8, o).rows.front().cells.size() == 8);
  for (const auto& row : table_layout(8, o).rows)
    for (const auto& c : row.cells) CHECK(c.config.multiplier == mult::recipe(c.column, row.params.at("n"), row.params.at("r")));

  o.scale = Scale::Full;
  const TableResult t6 = table_layout(6, o);
  CHECK(t6.rows.size() == 4);
  CHECK(t6.rows.front().cells.front().config.trials == 1000);
  o.scale = Scale::Desk;
  o.trials = 500;
  CHECK(table_layout(3, o).rows.front().cells.front().config.trials == 100);

  CHECK_THROWS_AS(table_layout(1, o), InvalidArgument);
  CHECK_THROWS_AS(table_layout(10, o), InvalidArgument);
  CHECK(scale_from_string("full") == Scale::Full);
  CHECK_THROWS_AS(scale_from_string("huge"), InvalidArgument);
  for (int id : table_ids()) CHECK(table_layout(id, TableOptions{}).rows.size() > 0);
}

TEST_CASE("reference means agree with the source tables") {
  const auto lines = read_lines(SKETCHLAB_REFERENCE_DOC);
  const std::map<std::string, std::string> names = {{"gaussian", "Gaussian"},
                                                    {"gaussian-toeplitz", "Toeplitz"},
                                                    {"gaussian-circulant", "Circulant"},
                                                    {"3-apf", "3-APF"},
                                                    {"3-aph", "3-APH"}};
  int checked = 0;
  for (int id : table_ids()) {
    TableOptions o;
    o.scale = Scale::Full;
    const TableResult t = table_layout(id, o);
    for (const auto& row : t.rows) {
      for (const auto& c : row.cells) {
        REQUIRE(c.reference_mean.has_value());
        std::vector<std::string> prefix;
        if (id == 2 || id == 8) {
          prefix = {std::to_string(row.params.at("n").get<Index>()), std::to_string(row.params.at("r").get<Index>())};
        } else if (id >= 3 && id <= 5) {
          prefix = {std::to_string(row.params.at("r").get<Index>()), std::to_string(row.params.at("n").get<Index>())};
        } else if (id == 6) {
          prefix = {std::to_string(row.params.at("n").get<Index>()), names.at(c.column)};
        } else if (id == 7) {
          const auto geo = inputs::fd_preset(row.params.at("preset"));
          prefix = {std::to_string(geo.rows.size()), std::to_string(geo.cols.size()), names.at(c.column)};
        }
        std::vector<std::string> candidates;
        if (id == 9) {
          const std::string key = "Class " + std::to_string(row.params.at("class").get<int>());
          for (const auto& line : lines)
            if (line.rfind(key + "\t", 0) == 0 || line.rfind(key + " ", 0) == 0) candidates.push_back(line);
        } else {
          candidates = rows_with_prefix(lines, prefix);
        }
        bool found = false;
        for (const auto& line : candidates) found = found || contains_value(numbers_in(line), *c.reference_mean);
        INFO("table " << id << " row " << row.label << " column " << c.column);
        CHECK(found);
        ++checked;
      }
    }
  }
  CHECK(checked == 18 + 6 * 3 + 20 + 15 + 48 + 54);
}

TEST_CASE("flop audit") {
  const auto rows = flop_audit(std::vector<Index>{128, 512, 1024});
  for (const auto& r : rows) {
    INFO(r.family << " n=" << r.n);
    CHECK(r.pass());
  }
  auto find = [&](const std::string& fam, Index n) {
    return *std::find_if(rows.begin(), rows.end(), [&](const AuditRow& r) { return r.family == fam && r.n == n; });
  };
  CHECK(find("ah", 1024).additions == 3072);
  CHECK(find("ah", 1024).multiplications == 0);
  CHECK(find("inverse_bidiagonal", 512).additions == 511);
  const AuditRow g = find("gaussian", 512);
  CHECK(g.additions + g.multiplications == 523776);
  CHECK(g.random_variables == 512u * 512u);

  AuditRow broken = find("ah", 128);
  broken.additions -= 1;
  CHECK_FALSE(broken.pass());
  CHECK(audit_to_json(rows).at("pass") == true);
  CHECK_THROWS_AS(flop_audit(Index{100}), InvalidArgument);
}

TEST_CASE("Gaussian norm expectations") {
  Rng rng(11);
  const NormSummary sq = monte_carlo_gaussian_norms(100, 100, 500, rng);
  CHECK(sq.bound_norm == 21.0);
  CHECK(sq.mean_norm < 21.0);
  CHECK(sq.norm_ok);
  CHECK_FALSE(sq.pinv_checked);
  CHECK_FALSE(sq.notice.empty());
  CHECK(sq.pass());

  const NormSummary tall = monte_carlo_gaussian_norms(200, 100, 500, rng);
  CHECK(tall.bound_pinv == doctest::Approx(0.3844).epsilon(1e-3));
  CHECK(tall.mean_pinv <= 0.3844);
  CHECK(tall.pass());
  CHECK(tall.se_norm > 0);

  // For a single column ||G^+|| = 1 / ||g||, and E 1/||g|| = Gamma((m-1)/2) / (sqrt 2 Gamma(m/2)).
  const NormSummary col = monte_carlo_gaussian_norms(100, 1, 2000, rng);
  const double exact = std::exp(std::lgamma(49.5) - std::lgamma(50.0)) / std::sqrt(2.0);
  CHECK(col.mean_pinv == doctest::Approx(exact).epsilon(0.01));
  CHECK(col.mean_pinv <= std::exp(1.0) * 10.0 / 99.0);

  CHECK_THROWS_AS(monte_carlo_gaussian_norms(10, 5, 50, rng), InvalidArgument);
}

TEST_CASE("serialization") {
  const auto rep = run_experiment(svd_config(64, 4, "3-ah", 8, 3));
  const auto env = envelope("experiment", rep.to_json());
  CHECK(env.at("schema") == kReportSchema);
  CHECK(env.at("kind") == "experiment");
  const std::string csv = reports_to_csv({rep, rep});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  TableOptions o;
  o.trials = 2;
  const TableResult t = table_layout(3, o);
  const std::string tcsv = table_to_csv(t);
  CHECK(std::count(tcsv.begin(), tcsv.end(), '\n') == 7);
  CHECK(t.to_json().at("rows").size() == 6);
  const std::string acsv = audit_to_csv(flop_audit(Index{128}));
  CHECK(acsv.find("ah,128,real,384,0,384") != std::string::npos);
}

TEST_CASE("small table run") {
  TableOptions o;
  o.trials = 5;
  const TableResult t = reproduce_table(5, o);
  for (const auto& row : t.rows) {
    REQUIRE(row.cells.front().report.has_value());
    CHECK(row.cells.front().report->deltas.size() == 5);
  }
  CHECK(t.pass());
  CHECK(t.to_json().at("pass") == true);
}

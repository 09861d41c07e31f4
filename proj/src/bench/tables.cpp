#include "sketchlab/bench.hpp"
#include "sketchlab/families.hpp"
#include "sketchlab/inputs.hpp"

#include <chrono>
#include <map>

namespace sketchlab::bench {

using nlohmann::json;

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::Desk;
  if (s == "full") return Scale::Full;
  throw InvalidArgument("scale must be desk or full, got '" + s + "'");
}

const char* to_string(Scale s) { return s == Scale::Desk ? "desk" : "full"; }

bool TableCell::pass() const {
  if (!bracket.asserted) return true;
  return report.has_value() && bracket.contains(report->delta.mean);
}

bool TableResult::pass() const {
  for (const auto& row : rows)
    for (const auto& c : row.cells)
      if (!c.pass()) return false;
  return true;
}

json TableResult::to_json() const {
  json jrows = json::array();
  for (const auto& row : rows) {
    json cells = json::array();
    for (const auto& c : row.cells) {
      json jc{{"column", c.column},
              {"bracket", {c.bracket.lo, c.bracket.hi}},
              {"asserted", c.bracket.asserted},
              {"pass", c.pass()}};
      jc["reference_mean"] = c.reference_mean ? json(*c.reference_mean) : json(nullptr);
      if (c.report) {
        jc["mean"] = c.report->delta.mean;
        jc["std"] = c.report->delta.std;
        jc["max"] = c.report->delta.max;
        jc["success_rate"] = c.report->success_rate;
        jc["report"] = c.report->to_json();
      } else {
        jc["config"] = c.config.to_json();
      }
      cells.push_back(std::move(jc));
    }
    jrows.push_back({{"label", row.label}, {"params", row.params}, {"cells", std::move(cells)}});
  }
  return json{{"table", id},   {"title", title}, {"scale", to_string(scale)},
              {"pass", pass()}, {"wall_seconds", wall_seconds}, {"rows", std::move(jrows)}};
}

namespace {

constexpr Bracket kSvdBracket{1e-9, 1e-6, true};
constexpr Bracket kLaplacianBracket{1e-7, 1e-3, true};
constexpr Bracket kFdBracket{1e-6, 1e-2, true};
constexpr Bracket kInformational{0.0, 1.0, false};

constexpr Index kDeskMaxN = 1024;
constexpr int kDeskTrials = 100;
constexpr int kDeskTrialsLarge = 20;  // n = 1024 rows and the class table
constexpr int kFullTrials = 1000;

// Oversampling for the SVD-input tables.
constexpr Index kOversample = 4;
constexpr Index kLaplacianWidth = 25;
constexpr int kPowerIterations = 3;

struct Builder {
  const TableOptions& opts;
  std::uint64_t seed;

  int trials(Index n) const {
    if (opts.scale == Scale::Full) return opts.trials > 0 ? opts.trials : kFullTrials;
    const int base = n >= kDeskMaxN ? kDeskTrialsLarge : kDeskTrials;
    return opts.trials > 0 ? std::min(opts.trials, kDeskTrials) : base;
  }

  TableCell cell(const std::string& column, const InputSpec& in, const std::string& recipe, Index l, int power,
                 double xi, Bracket br, std::optional<double> ref, int ntrials) const {
    TableCell c;
    c.column = column;
    c.bracket = br;
    c.reference_mean = ref;
    ExperimentConfig& cfg = c.config;
    cfg.label = column;
    cfg.input = in;
    cfg.multiplier = mult::recipe(recipe, input_cols(in), l);
    cfg.power_iterations = power;
    cfg.trials = ntrials;
    cfg.seed = seed;
    cfg.xi = xi;
    cfg.threads = opts.threads;
    return c;
  }
};

InputSpec svd_input(Index n, Index r) {
  InputSpec s;
  s.kind = "svd";
  s.n = n;
  s.r = r;
  return s;
}

InputSpec laplacian_input(Index n) {
  InputSpec s;
  s.kind = "laplacian";
  s.n = n;
  s.r = kLaplacianWidth;
  return s;
}

InputSpec fd_input(const std::string& preset) {
  InputSpec s;
  s.kind = "fd";
  s.preset = preset;
  s.r = inputs::fd_preset(preset).expected_rank;
  s.n = input_cols(s);
  return s;
}

struct NR {
  Index n, r;
};
constexpr NR kNr[] = {{256, 8}, {256, 32}, {512, 8}, {512, 32}, {1024, 8}, {1024, 32}};
// Tables 3 to 5 list r before n.
constexpr NR kRn[] = {{256, 8}, {512, 8}, {1024, 8}, {256, 32}, {512, 32}, {1024, 32}};

TableRow nr_row(const NR& p, bool r_first) {
  TableRow row;
  row.label = r_first ? "r=" + std::to_string(p.r) + " n=" + std::to_string(p.n)
                      : "n=" + std::to_string(p.n) + " r=" + std::to_string(p.r);
  row.params = {{"n", p.n}, {"r", p.r}};
  return row;
}

TableResult table_svd_three(const Builder& b) {
  static const double ref[6][3] = {{2.25e-08, 2.70e-08, 2.52e-08}, {5.95e-08, 1.47e-07, 3.19e-08},
                                   {4.80e-08, 2.22e-07, 4.76e-08}, {6.22e-08, 8.91e-08, 6.39e-08},
                                   {5.65e-08, 2.86e-08, 1.25e-08}, {1.94e-07, 5.33e-08, 4.72e-08}};
  static const char* cols[3] = {"3-ah", "3-asph", "ternary"};
  TableResult t;
  t.title = "SVD-spectrum inputs, abridged Hadamard and ternary multipliers";
  for (int i = 0; i < 6; ++i) {
    TableRow row = nr_row(kNr[i], false);
    for (int j = 0; j < 3; ++j)
      row.cells.push_back(b.cell(cols[j], svd_input(kNr[i].n, kNr[i].r), cols[j], kNr[i].r + kOversample, 0, 1e-5,
                                 kSvdBracket, ref[i][j], b.trials(kNr[i].n)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

TableResult table_svd_single(const Builder& b, const std::string& recipe, const std::string& title,
                             const double (&ref)[6]) {
  TableResult t;
  t.title = title;
  for (int i = 0; i < 6; ++i) {
    TableRow row = nr_row(kRn[i], true);
    row.cells.push_back(b.cell(recipe, svd_input(kRn[i].n, kRn[i].r), recipe, kRn[i].r + kOversample, 0, 1e-5,
                               kSvdBracket, ref[i], b.trials(kRn[i].n)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

const char* kFiveCols[5] = {"gaussian", "gaussian-toeplitz", "gaussian-circulant", "3-apf", "3-aph"};

TableResult table_laplacian(const Builder& b) {
  static const Index ns[4] = {200, 400, 2000, 4000};
  static const double ref[4][5] = {{1.58e-05, 1.83e-05, 3.14e-05, 8.50e-06, 2.18e-05},
                                   {1.53e-05, 1.82e-05, 4.37e-05, 8.33e-06, 2.18e-05},
                                   {2.10e-05, 2.02e-05, 6.23e-05, 1.31e-05, 2.11e-05},
                                   {2.18e-05, 2.52e-05, 8.98e-05, 5.69e-05, 3.17e-05}};
  TableResult t;
  t.title = "Single-layer Laplacian inputs, three power iterations";
  for (int i = 0; i < 4; ++i) {
    if (b.opts.scale == Scale::Desk && ns[i] > kDeskMaxN) continue;
    TableRow row;
    row.label = "n=" + std::to_string(ns[i]);
    row.params = {{"n", ns[i]}, {"l", kLaplacianWidth}};
    for (int j = 0; j < 5; ++j)
      row.cells.push_back(b.cell(kFiveCols[j], laplacian_input(ns[i]), kFiveCols[j], kLaplacianWidth,
                                 kPowerIterations, 1e-5, kLaplacianBracket, ref[i][j], b.trials(ns[i])));
    t.rows.push_back(std::move(row));
  }
  return t;
}

TableResult table_fd(const Builder& b) {
  static const char* presets[3] = {"small", "medium", "large"};
  static const double ref[3][5] = {{1.53e-05, 1.37e-05, 2.79e-05, 4.84e-04, 4.84e-04},
                                   {4.02e-05, 8.19e-05, 8.72e-05, 1.24e-04, 1.29e-04},
                                   {6.09e-05, 1.07e-04, 1.04e-04, 1.84e-04, 1.38e-04}};
  TableResult t;
  t.title = "Finite-difference inverse blocks, three power iterations";
  for (int i = 0; i < 3; ++i) {
    const InputSpec in = fd_input(presets[i]);
    TableRow row;
    row.label = presets[i];
    row.params = {{"preset", presets[i]}, {"n", in.n}, {"l", in.r}};
    for (int j = 0; j < 5; ++j)
      row.cells.push_back(b.cell(kFiveCols[j], in, kFiveCols[j], in.r, kPowerIterations, 1e-5, kFdBracket, ref[i][j],
                                 b.trials(in.n)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

TableResult table_lowrk(const Builder& b) {
  static const double ref[6][8] = {
      {5.94e-09, 4.35e-08, 2.64e-08, 2.20e-08, 7.73e-07, 5.15e-09, 4.08e-09, 2.10e-09},
      {2.40e-08, 2.55e-09, 8.23e-08, 1.58e-08, 4.58e-09, 1.36e-08, 2.26e-09, 8.83e-09},
      {1.11e-08, 8.01e-09, 2.36e-09, 7.48e-09, 1.53e-08, 8.15e-09, 1.39e-08, 3.86e-09},
      {1.61e-08, 4.81e-09, 1.61e-08, 2.83e-09, 2.35e-08, 3.48e-08, 2.25e-08, 1.67e-08},
      {5.40e-09, 3.44e-09, 6.82e-08, 4.39e-08, 1.20e-08, 4.44e-09, 2.68e-09, 4.30e-09},
      {2.18e-08, 2.03e-08, 8.72e-08, 2.77e-08, 3.15e-08, 7.99e-09, 9.64e-09, 1.49e-08}};
  TableResult t;
  t.title = "SVD-spectrum inputs, eight sparse multiplier classes, l = r";
  for (int i = 0; i < 6; ++i) {
    TableRow row = nr_row(kNr[i], false);
    for (int c = 1; c <= 8; ++c) {
      const std::string name = "lowrk-" + std::to_string(c);
      row.cells.push_back(b.cell(name, svd_input(kNr[i].n, kNr[i].r), name, kNr[i].r, 0, 1e-5, kSvdBracket,
                                 ref[i][c - 1], b.trials(kNr[i].n)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

TableResult table_classes(const Builder& b) {
  static const double ref[18][3] = {
      {3.54e-09, 4.10e-14, 1.61e-06}, {1.16e-08, 6.07e-13, 4.67e-06}, {1.23e-08, 1.69e-13, 4.52e-06},
      {1.25e-08, 2.46e-13, 4.72e-06}, {1.13e-08, 1.93e-13, 4.38e-06}, {1.12e-08, 9.25e-13, 5.12e-06},
      {1.16e-08, 5.51e-13, 4.79e-06}, {1.33e-08, 1.98e-13, 4.60e-06}, {1.08e-08, 2.09e-13, 4.47e-06},
      {1.18e-08, 1.87e-13, 4.63e-06}, {1.18e-08, 1.78e-13, 4.55e-06}, {1.28e-08, 2.33e-13, 4.49e-06},
      {1.43e-08, 1.78e-13, 4.74e-06}, {1.22e-08, 2.21e-13, 4.75e-06}, {1.51e-08, 3.57e-13, 4.61e-06},
      {1.19e-08, 2.24e-13, 4.74e-06}, {1.26e-08, 2.15e-13, 4.59e-06}, {1.31e-08, 1.25e-14, 1.83e-06}};
  const Index n = 1024, r = 32;
  const int ntrials = b.opts.scale == Scale::Desk ? std::min(b.trials(n), kDeskTrialsLarge) : b.trials(n);
  const InputSpec svd = svd_input(n, r);
  const InputSpec lap = laplacian_input(400);
  const InputSpec fd = fd_input("large");
  TableResult t;
  t.title = "Seventeen sparse multiplier classes and the Gaussian reference";
  for (int c = 0; c <= 17; ++c) {
    const std::string name = "class-" + std::to_string(c);
    TableRow row;
    row.label = name;
    row.params = {{"class", c}};
    row.cells.push_back(b.cell("svd", svd, name, r + kOversample, 0, 1e-6, kSvdBracket, ref[c][0], ntrials));
    row.cells.push_back(b.cell("laplacian", lap, name, kLaplacianWidth, kPowerIterations, 1e-6, kInformational,
                               ref[c][1], ntrials));
    row.cells.push_back(
        b.cell("fd-large", fd, name, fd.r, kPowerIterations, 1e-6, kInformational, ref[c][2], ntrials));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

std::vector<int> table_ids() { return {2, 3, 4, 5, 6, 7, 8, 9}; }

TableResult table_layout(int id, const TableOptions& opts) {
  const Builder b{opts, derive_seed(opts.seed, static_cast<std::uint64_t>(id))};
  static const double gauss[6] = {7.54e-8, 4.57e-8, 1.03e-7, 5.41e-8, 1.75e-7, 1.79e-7};
  static const double gcirc[6] = {3.24e-8, 5.58e-8, 1.03e-7, 1.12e-7, 1.38e-7, 1.18e-7};
  static const double scirc[6] = {7.70e-9, 1.10e-8, 1.69e-8, 1.51e-8, 2.11e-8, 3.21e-8};
  TableResult t;
  switch (id) {
    case 2: t = table_svd_three(b); break;
    case 3: t = table_svd_single(b, "gaussian", "SVD-spectrum inputs, Gaussian multipliers", gauss); break;
    case 4:
      t = table_svd_single(b, "gaussian-circulant", "SVD-spectrum inputs, Gaussian subcirculant multipliers", gcirc);
      break;
    case 5: t = table_svd_single(b, "sign-circulant", "SVD-spectrum inputs, +-1 subcirculant multipliers", scirc); break;
    case 6: t = table_laplacian(b); break;
    case 7: t = table_fd(b); break;
    case 8: t = table_lowrk(b); break;
    case 9: t = table_classes(b); break;
    default: throw InvalidArgument("unknown table id " + std::to_string(id) + " (expected 2..9)");
  }
  t.id = id;
  t.scale = opts.scale;
  return t;
}

TableResult reproduce_table(int id, const TableOptions& opts) {
  TableResult t = table_layout(id, opts);
  const auto start = std::chrono::steady_clock::now();
  // Cells with the same input, seed and trial count draw each trial's input once.
  std::map<std::string, std::vector<TableCell*>> groups;
  std::vector<std::string> order;
  for (auto& row : t.rows)
    for (auto& c : row.cells) {
      const std::string key =
          c.config.input.to_json().dump() + "|" + std::to_string(c.config.seed) + "|" + std::to_string(c.config.trials);
      if (!groups.count(key)) order.push_back(key);
      groups[key].push_back(&c);
    }
  for (const auto& key : order) {
    std::vector<ExperimentConfig> cfgs;
    for (TableCell* c : groups[key]) cfgs.push_back(c->config);
    auto reports = run_experiment_group(cfgs);
    for (std::size_t i = 0; i < reports.size(); ++i) groups[key][i]->report = std::move(reports[i]);
  }
  t.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

}  // namespace sketchlab::bench

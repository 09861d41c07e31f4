#include "sketchlab/bench.hpp"
#include "sketchlab/families.hpp"
#include "sketchlab/inputs.hpp"
#include "sketchlab/matrix_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

namespace sketchlab::bench {

using nlohmann::json;

bool InputSpec::deterministic() const { return kind == "laplacian" || kind == "fd" || kind == "file"; }

json InputSpec::to_json() const {
  json j{{"kind", kind}, {"r", r}};
  if (kind == "svd") {
    j["n"] = n;
    j["tail"] = tail;
  } else if (kind == "laplacian") {
    j["n"] = n;
  } else if (kind == "fd") {
    j["preset"] = preset;
  } else if (kind == "factor_gaussian") {
    j["m"] = m > 0 ? m : n;
    j["n"] = n;
    j["noise"] = noise;
  } else if (kind == "file") {
    j["path"] = path;
  }
  return j;
}

InputSpec InputSpec::from_json(const json& j) {
  InputSpec s;
  s.kind = j.value("kind", std::string("svd"));
  s.n = j.value("n", s.n);
  s.m = j.value("m", Index{0});
  s.r = j.value("r", s.r);
  s.tail = j.value("tail", s.tail);
  s.noise = j.value("noise", 0.0);
  s.preset = j.value("preset", std::string());
  s.path = j.value("path", std::string());
  static const char* kinds[] = {"svd", "laplacian", "fd", "factor_gaussian", "file"};
  if (std::none_of(std::begin(kinds), std::end(kinds), [&](const char* k) { return s.kind == k; }))
    throw InvalidArgument("input: unknown kind '" + s.kind + "'");
  return s;
}

namespace {

double sigma_at(const DenseMatrix& M, Index r) {
  const RVec s = linalg::singular_values(M);
  return r < s.size() ? s[r] : 0.0;
}

GeneratedInput build_input(const InputSpec& spec, std::uint64_t seed) {
  GeneratedInput g;
  g.r = spec.r;
  Rng rng(seed);
  if (spec.kind == "svd") {
    g.M = inputs::svd_spectrum_matrix({spec.n, spec.r, spec.tail}, rng);
    g.sigma_next = spec.tail;
    return g;
  }
  if (spec.kind == "laplacian") {
    g.M = inputs::laplacian_matrix(spec.n);
  } else if (spec.kind == "fd") {
    const auto geo = inputs::fd_preset(spec.preset);
    g.M = inputs::finite_difference_inverse(geo);
  } else if (spec.kind == "factor_gaussian") {
    g.M = inputs::factor_gaussian({spec.m > 0 ? spec.m : spec.n, spec.n, spec.r, spec.noise}, rng);
  } else if (spec.kind == "file") {
    g.M = io::read_matrix_file(spec.path);
  } else {
    throw InvalidArgument("input: unknown kind '" + spec.kind + "'");
  }
  g.sigma_next = sigma_at(g.M, spec.r);
  return g;
}

// Deterministic inputs are built once per process.
const GeneratedInput& cached_input(const InputSpec& spec) {
  static std::mutex mu;
  static std::map<std::string, GeneratedInput> cache;
  const std::string key = spec.to_json().dump();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_input(spec, 0)).first;
  return it->second;
}

}  // namespace

GeneratedInput generate(const InputSpec& spec, std::uint64_t seed) {
  if (spec.deterministic()) return cached_input(spec);
  return build_input(spec, seed);
}

Index input_cols(const InputSpec& spec) {
  if (spec.kind == "fd") return inputs::fd_preset(spec.preset).cols.size();
  if (spec.kind == "file") return io::read_matrix_file(spec.path).cols();
  return spec.n;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
  if (power_iterations < 0) throw InvalidArgument("experiment: power_iterations must be >= 0");
  if (!(xi > 0)) throw InvalidArgument("experiment: xi must be positive");
  if (multiplier.family.empty()) throw InvalidArgument("experiment: no multiplier");
}

json ExperimentConfig::to_json() const {
  json j{{"label", label},
         {"input", input.to_json()},
         {"multiplier", sketchlab::to_json(multiplier)},
         {"tau", tau},
         {"estimator", estimator.mode == rf::ErrorEstimator::Mode::Exact ? "exact" : "frievalds"},
         {"power_iterations", power_iterations},
         {"trials", trials},
         {"seed", seed},
         {"xi", xi}};
  if (estimator.mode == rf::ErrorEstimator::Mode::Frievalds) j["frievalds_k"] = estimator.k;
  if (!block_sizes.empty()) j["block_sizes"] = block_sizes;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.label = j.value("label", std::string());
  if (j.contains("input")) c.input = InputSpec::from_json(j.at("input"));
  if (!j.contains("multiplier")) throw InvalidArgument("experiment: missing multiplier");
  const json& mj = j.at("multiplier");
  if (mj.contains("recipe")) {
    const Index n = input_cols(c.input);
    const Index l = mj.value("l", c.input.r + 4);
    c.multiplier = mult::recipe(mj.at("recipe").get<std::string>(), n, l);
  } else {
    c.multiplier = descriptor_from_json(mj);
  }
  if (j.contains("block_sizes")) c.block_sizes = j.at("block_sizes").get<std::vector<Index>>();
  c.tau = j.value("tau", -1.0);
  const std::string est = j.value("estimator", std::string("exact"));
  if (est == "frievalds")
    c.estimator = rf::ErrorEstimator::frievalds(j.value("frievalds_k", Index{8}), 0);
  else if (est != "exact")
    throw InvalidArgument("experiment: estimator must be exact or frievalds");
  c.power_iterations = j.value("power_iterations", 0);
  c.trials = j.value("trials", 1);
  c.seed = j.value("seed", std::uint64_t{0});
  c.xi = j.value("xi", 1e-5);
  c.threads = j.value("threads", 0);
  c.validate();
  return c;
}

Aggregates aggregate(const std::vector<double>& v) {
  Aggregates a;
  if (v.empty()) return a;
  double sum = 0.0;
  a.max = v.front();
  for (double x : v) {
    sum += x;
    a.max = std::max(a.max, x);
  }
  a.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - a.mean) * (x - a.mean);
  a.std = std::sqrt(ss / static_cast<double>(v.size()));
  return a;
}

json ExperimentReport::to_json() const {
  return json{{"config", config.to_json()},
              {"deltas", deltas},
              {"successes", successes},
              {"stages", stages},
              {"flops", flops},
              {"mean", delta.mean},
              {"std", delta.std},
              {"max", delta.max},
              {"mean_flops", mean_flops},
              {"success_rate", success_rate},
              {"tau", tau_used},
              {"numerical_rank", numerical_rank},
              {"wall_seconds", wall_seconds}};
}

ExperimentReport ExperimentReport::from_json(const json& j) {
  ExperimentReport r;
  r.config = ExperimentConfig::from_json(j.at("config"));
  r.deltas = j.at("deltas").get<std::vector<double>>();
  r.successes = j.at("successes").get<std::vector<int>>();
  r.stages = j.value("stages", std::vector<int>{});
  r.flops = j.value("flops", std::vector<double>{});
  r.delta = {j.at("mean").get<double>(), j.at("std").get<double>(), j.at("max").get<double>()};
  r.mean_flops = j.value("mean_flops", 0.0);
  r.success_rate = j.value("success_rate", 0.0);
  r.tau_used = j.value("tau", 0.0);
  r.numerical_rank = j.value("numerical_rank", Index{0});
  r.wall_seconds = j.value("wall_seconds", 0.0);
  return r;
}

namespace {

struct TrialOut {
  double delta = 0.0;
  int success = 0;
  int stage = 1;
  double flops = 0.0;
  double tau = 0.0;
};

TrialOut run_one(const ExperimentConfig& c, const GeneratedInput& in, std::uint64_t tseed) {
  Descriptor d = c.multiplier;
  reseed(d, derive_seed(tseed, 2));
  const Multiplier B = mult::build(d);
  TrialOut out;
  out.tau = c.tau >= 0 ? c.tau : 10.0 * in.sigma_next;
  rf::Options o;
  o.estimator = c.estimator;
  if (o.estimator.mode == rf::ErrorEstimator::Mode::Frievalds) o.estimator.seed = derive_seed(tseed, 3);
  o.power_iterations = c.power_iterations;
  rf::RangeFinderResult res;
  if (c.block_sizes.empty()) {
    res = rf::range_finder(in.M, B, out.tau, o);
  } else {
    rf::RecursiveOptions ro;
    ro.base = o;
    ro.cross_check = false;
    res = rf::recursive_range_finder(in.M, B, c.block_sizes, out.tau, ro).result;
  }
  out.delta = res.delta;
  out.success = res.success() ? 1 : 0;
  out.stage = res.stage;
  out.flops = static_cast<double>(res.flops.total());
  return out;
}

void check_shared(const std::vector<ExperimentConfig>& cfgs) {
  if (cfgs.empty()) throw InvalidArgument("experiment group: no configs");
  const std::string in = cfgs.front().input.to_json().dump();
  for (const auto& c : cfgs) {
    c.validate();
    if (c.input.to_json().dump() != in || c.seed != cfgs.front().seed || c.trials != cfgs.front().trials)
      throw InvalidArgument("experiment group: configs must share input, seed and trials");
  }
}

}  // namespace

std::vector<ExperimentReport> run_experiment_group(const std::vector<ExperimentConfig>& cfgs) {
  check_shared(cfgs);
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig& head = cfgs.front();
  const int trials = head.trials;
  const std::size_t k = cfgs.size();
  std::vector<std::vector<TrialOut>> outs(k, std::vector<TrialOut>(static_cast<std::size_t>(trials)));
  Index rank0 = 0;

  for (const auto& c : cfgs) {
    const Index n = input_cols(c.input);
    const Multiplier probe = mult::build(c.multiplier);
    if (probe.rows() != n)
      throw InvalidArgument("experiment '" + c.label + "': multiplier rows differ from input columns");
    if (!c.block_sizes.empty()) {
      Index sum = 0;
      for (Index b : c.block_sizes) sum += b;
      if (probe.cols() != n || sum != n)
        throw InvalidArgument("experiment '" + c.label + "': block sizes must sum to n for an n x n multiplier");
    }
  }

  std::atomic<int> next{0};
  std::mutex err_mu;
  std::string error;
  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        const std::uint64_t tseed = trial_seed(head.seed, static_cast<std::uint64_t>(t));
        const GeneratedInput in = generate(head.input, derive_seed(tseed, 1));
        if (t == 0) rank0 = linalg::numerical_rank(in.M, head.xi);
        for (std::size_t i = 0; i < k; ++i) outs[i][static_cast<std::size_t>(t)] = run_one(cfgs[i], in, tseed);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (error.empty()) error = "trial " + std::to_string(t) + ": " + e.what();
        next.store(trials);
      }
    }
  };
  int threads = head.threads > 0 ? head.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, trials);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!error.empty()) throw std::runtime_error("experiment '" + head.label + "' aborted at " + error);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<ExperimentReport> reports(k);
  for (std::size_t i = 0; i < k; ++i) {
    ExperimentReport& r = reports[i];
    r.config = cfgs[i];
    double succ = 0.0;
    for (const TrialOut& o : outs[i]) {
      r.deltas.push_back(o.delta);
      r.successes.push_back(o.success);
      r.stages.push_back(o.stage);
      r.flops.push_back(o.flops);
      succ += o.success;
    }
    r.delta = aggregate(r.deltas);
    r.mean_flops = aggregate(r.flops).mean;
    r.success_rate = succ / static_cast<double>(trials);
    r.tau_used = outs[i].front().tau;
    r.numerical_rank = rank0;
    r.wall_seconds = wall / static_cast<double>(k);
  }
  return reports;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) { return run_experiment_group({cfg}).front(); }

}  // namespace sketchlab::bench

#include "sketchlab/bench.hpp"
#include "sketchlab/linalg.hpp"

#include <cmath>
#include <numbers>

namespace sketchlab::bench {

using nlohmann::json;

json NormSummary::to_json() const {
  json j{{"m", m},         {"n", n},           {"trials", trials},   {"mean_norm", mean_norm},
         {"se_norm", se_norm}, {"bound_norm", bound_norm}, {"norm_ok", norm_ok}, {"pinv_checked", pinv_checked},
         {"pass", pass()}};
  if (pinv_checked) {
    j["mean_pinv"] = mean_pinv;
    j["se_pinv"] = se_pinv;
    j["bound_pinv"] = bound_pinv;
    j["pinv_ok"] = pinv_ok;
  }
  if (!notice.empty()) j["notice"] = notice;
  return j;
}

namespace {

void mean_se(const std::vector<double>& v, double& mean, double& se) {
  const Aggregates a = aggregate(v);
  mean = a.mean;
  const double k = static_cast<double>(v.size());
  se = v.size() > 1 ? a.std * std::sqrt(k / (k - 1)) / std::sqrt(k) : 0.0;
}

}  // namespace

NormSummary monte_carlo_gaussian_norms(Index m, Index n, int trials, Rng& rng) {
  if (m < 1 || n < 1) throw InvalidArgument("monte_carlo_gaussian_norms: m and n must be positive");
  if (trials < 100) throw InvalidArgument("monte_carlo_gaussian_norms: trials must be >= 100");
  NormSummary s;
  s.m = m;
  s.n = n;
  s.trials = trials;
  s.pinv_checked = m != n;
  if (!s.pinv_checked) s.notice = "pseudo-inverse bound needs m != n; check skipped";
  std::vector<double> norms, pinvs;
  for (int t = 0; t < trials; ++t) {
    const RVec sv = linalg::singular_values(linalg::gaussian_matrix(m, n, rng));
    norms.push_back(sv[0]);
    if (s.pinv_checked) pinvs.push_back(1.0 / sv[sv.size() - 1]);
  }
  const double M = static_cast<double>(m), N = static_cast<double>(n);
  mean_se(norms, s.mean_norm, s.se_norm);
  s.bound_norm = 1.0 + std::sqrt(M) + std::sqrt(N);
  s.norm_ok = s.mean_norm < s.bound_norm;
  if (s.pinv_checked) {
    mean_se(pinvs, s.mean_pinv, s.se_pinv);
    s.bound_pinv = std::numbers::e * std::sqrt(M) / std::abs(M - N);
    s.pinv_ok = s.mean_pinv <= s.bound_pinv;
  }
  return s;
}

}  // namespace sketchlab::bench

#include "sketchlab/bench.hpp"
#include "sketchlab/families.hpp"

#include <cmath>

namespace sketchlab::bench {

using nlohmann::json;

bool AuditRow::pass() const {
  const double measured = static_cast<double>(additions + multiplications);
  const bool flops_ok = exact ? measured == flop_budget : measured <= flop_budget;
  return flops_ok && static_cast<double>(random_variables) <= rv_budget;
}

namespace {

constexpr int kDepth = 3;
constexpr Index kTaps = 10;

AuditRow row(const std::string& family, const Multiplier& B, double flop_budget, double rv_budget,
             std::string formula, bool exact = false) {
  AuditRow r;
  r.family = family;
  r.n = B.cols();
  r.real = B.is_real();
  r.additions = B.apply_cost().additions;
  r.multiplications = B.apply_cost().multiplications;
  r.random_variables = B.random_variables();
  r.flop_budget = flop_budget;
  r.rv_budget = rv_budget;
  r.exact = exact;
  r.budget_formula = std::move(formula);
  return r;
}

}  // namespace

std::vector<AuditRow> flop_audit(Index n) {
  if (n < 16 || (n & (n - 1)) != 0) throw InvalidArgument("flop_audit: n must be a power of two >= 16");
  const double N = static_cast<double>(n);
  const double d = kDepth;
  const double q = static_cast<double>(kTaps);
  const int full = static_cast<int>(std::lround(std::log2(N)));
  std::vector<AuditRow> rows;
  rows.push_back(row("ah", mult::abridged_hadamard(n, kDepth), d * N, 0, "dn", true));
  rows.push_back(row("asph", mult::abridged_variant("asph", n, kDepth, 1), (d + 1) * N, 2 * N, "(d+1)n"));
  rows.push_back(row("af", mult::abridged_fourier(n, kDepth), 1.5 * d * N, 0, "1.5dn"));
  rows.push_back(row("aspf", mult::abridged_variant("aspf", n, kDepth, 1), (1.5 * d + 1) * N, 2 * N, "(1.5d+1)n"));
  rows.push_back(row("sparse_f_circulant", mult::sparse_f_circulant(n, kTaps, 1.0, 1), q * N, 2 * q + 1, "qn"));
  rows.push_back(row("sparse_f_circulant", mult::sparse_f_circulant(n, kTaps, cd(0, 1), 1, Field::Complex),
                     (2 * q - 1) * N, 2 * q + 1, "(2q-1)n"));
  rows.push_back(
      row("abridged_f_circulant", mult::abridged_f_circulant(n, kDepth, 1.0, 1), (3 * d + 2) * N, N, "(3d+2)n"));
  rows.push_back(
      row("abridged_f_circulant", mult::abridged_f_circulant(n, kDepth, -1.0, 1), (3 * d + 2) * N, N, "(3d+2)n"));
  rows.push_back(row("abridged_f_circulant", mult::abridged_f_circulant(n, full, 1.0, 1), (3.0 * full + 2) * N, N,
                     "(3d+2)n, d=log2 n"));
  rows.push_back(row("inverse_bidiagonal", mult::inverse_bidiagonal(n, 1), N - 1, N - 1, "n-1"));
  rows.push_back(row("gaussian", mult::gaussian(n, n, 1), (2 * N - 1) * N, N * N, "(2n-1)n", true));
  return rows;
}

std::vector<AuditRow> flop_audit(const std::vector<Index>& sizes) {
  std::vector<AuditRow> out;
  for (Index n : sizes) {
    auto rows = flop_audit(n);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

json audit_to_json(const std::vector<AuditRow>& rows) {
  json arr = json::array();
  bool all = true;
  for (const AuditRow& r : rows) {
    all = all && r.pass();
    arr.push_back({{"family", r.family},
                   {"n", r.n},
                   {"field", r.real ? "real" : "complex"},
                   {"additions", r.additions},
                   {"multiplications", r.multiplications},
                   {"flops", r.additions + r.multiplications},
                   {"flop_budget", r.flop_budget},
                   {"budget", r.budget_formula},
                   {"exact", r.exact},
                   {"random_variables", r.random_variables},
                   {"rv_budget", r.rv_budget},
                   {"pass", r.pass()}});
  }
  return json{{"pass", all}, {"rows", std::move(arr)}};
}

}  // namespace sketchlab::bench

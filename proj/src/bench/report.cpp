#include "sketchlab/bench.hpp"

#include <fmt/format.h>

namespace sketchlab::bench {

using nlohmann::json;

json envelope(const std::string& kind, json payload) {
  return json{{"schema", kReportSchema}, {"kind", kind}, {"payload", std::move(payload)}};
}

std::string reports_to_csv(const std::vector<ExperimentReport>& reports) {
  std::string out = "label,trials,mean,std,max,success_rate,mean_flops,tau,numerical_rank,wall_seconds\n";
  for (const auto& r : reports)
    out += fmt::format("{},{},{:.6e},{:.6e},{:.6e},{:.4f},{:.6e},{:.6e},{},{:.3f}\n", r.config.label,
                       r.config.trials, r.delta.mean, r.delta.std, r.delta.max, r.success_rate, r.mean_flops,
                       r.tau_used, r.numerical_rank, r.wall_seconds);
  return out;
}

std::string table_to_csv(const TableResult& t) {
  std::string out = "table,row,column,trials,mean,std,max,reference_mean,bracket_lo,bracket_hi,asserted,pass\n";
  for (const auto& row : t.rows)
    for (const auto& c : row.cells) {
      const std::string ref = c.reference_mean ? fmt::format("{:.3e}", *c.reference_mean) : "";
      const std::string stats = c.report ? fmt::format("{:.6e},{:.6e},{:.6e}", c.report->delta.mean,
                                                       c.report->delta.std, c.report->delta.max)
                                         : ",,";
      out += fmt::format("{},\"{}\",{},{},{},{},{:.0e},{:.0e},{},{}\n", t.id, row.label, c.column, c.config.trials,
                         stats, ref, c.bracket.lo, c.bracket.hi, c.bracket.asserted ? 1 : 0, c.pass() ? 1 : 0);
    }
  return out;
}

std::string audit_to_csv(const std::vector<AuditRow>& rows) {
  std::string out = "family,n,field,additions,multiplications,flops,flop_budget,budget,exact,random_variables,"
                    "rv_budget,pass\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{:.0f},\"{}\",{},{},{:.0f},{}\n", r.family, r.n, r.real ? "real" : "complex",
                       r.additions, r.multiplications, r.additions + r.multiplications, r.flop_budget,
                       r.budget_formula, r.exact ? 1 : 0, r.random_variables, r.rv_budget, r.pass() ? 1 : 0);
  return out;
}

}  // namespace sketchlab::bench

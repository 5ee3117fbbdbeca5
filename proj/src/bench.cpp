#include "pptfe/bench.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pptfe {

std::vector<BenchRow> BenchReport::series(const std::string& algorithm) const {
  std::vector<BenchRow> out;
  for (const auto& r : rows)
    if (r.algorithm == algorithm) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const BenchRow& a, const BenchRow& b) { return a.dim < b.dim; });
  return out;
}

std::string BenchReport::to_csv() const {
  std::ostringstream os;
  os << "algorithm,l,reps,mean_seconds,pairings,exponentiations,hashes\n";
  os.precision(9);
  for (const auto& r : rows)
    os << r.algorithm << ',' << r.dim << ',' << r.reps << ',' << std::fixed << r.mean_seconds << ','
       << r.counts.pairings << ',' << r.exponentiations() << ',' << r.counts.hashes << '\n';
  return os.str();
}

std::string BenchReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"algorithm", r.algorithm},
                         {"l", r.dim},
                         {"reps", r.reps},
                         {"mean_seconds", r.mean_seconds},
                         {"pairings", r.counts.pairings},
                         {"exponentiations", r.exponentiations()},
                         {"source_exponentiations", r.counts.exps},
                         {"target_exponentiations", r.counts.gt_exps},
                         {"hashes", r.counts.hashes}});
  nlohmann::json out{{"backend", backend}, {"rows", rows_json}};
  for (const auto& c : check_shape(*this)) out["shape"].push_back({{"check", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  return out.dump();
}

double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2 || x.size() != y.size()) return 0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0;
  return (sxy * sxy) / (sxx * syy);
}

std::vector<ShapeCheck> check_shape(const BenchReport& report) {
  std::vector<ShapeCheck> checks;
  for (const char* alg : {"setup", "encrypt", "ppkeygen", "decrypt"}) {
    const auto s = report.series(alg);
    std::vector<double> xs, ys;
    bool monotone = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      xs.push_back(static_cast<double>(s[i].dim));
      ys.push_back(s[i].mean_seconds);
      if (i > 0 && !(s[i].mean_seconds > s[i - 1].mean_seconds)) monotone = false;
    }
    const double r2 = linear_r2(xs, ys);
    std::ostringstream detail;
    detail << "r2=" << r2;
    checks.push_back({std::string(alg) + " monotone in l", monotone && s.size() >= 2, detail.str()});
    checks.push_back({std::string(alg) + " linear in l", r2 >= kMinLinearR2, detail.str()});
  }

  const auto tr = report.series("trace");
  double lo = 0, hi = 0;
  for (const auto& r : tr) {
    lo = lo == 0 ? r.mean_seconds : std::min(lo, r.mean_seconds);
    hi = std::max(hi, r.mean_seconds);
  }
  const double spread = lo > 0 ? hi / lo : 0;
  std::ostringstream tdetail;
  tdetail << "max/min=" << spread;
  checks.push_back({"trace flat in l", !tr.empty() && spread <= kMaxTraceSpread, tdetail.str()});

  std::map<std::size_t, std::vector<const BenchRow*>> by_dim;
  for (const auto& r : report.rows) by_dim[r.dim].push_back(&r);
  bool slowest = !by_dim.empty();
  std::string where;
  for (const auto& [dim, rows] : by_dim) {
    const BenchRow* top = *std::max_element(rows.begin(), rows.end(), [](const BenchRow* a, const BenchRow* b) {
      return a->mean_seconds < b->mean_seconds;
    });
    if (top->algorithm != "ppkeygen") {
      slowest = false;
      where += " l=" + std::to_string(dim) + ":" + top->algorithm;
    }
  }
  checks.push_back({"ppkeygen slowest at every l", slowest, where.empty() ? "ok" : "slowest was" + where});
  return checks;
}

}  // namespace pptfe

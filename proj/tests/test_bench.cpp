#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <cmath>
#include <sstream>

#include "pptfe/bench.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;

namespace {

BenchRow row(const std::string& alg, std::size_t l, double secs) { return {alg, l, 10, secs, {}}; }

// Idealized timings: linear for the l-dependent algorithms, constant trace,
// ppkeygen dominating.
BenchReport synthetic() {
  BenchReport r;
  r.backend = "toy";
  for (std::size_t l : {10, 20, 30, 40, 50}) {
    const double x = static_cast<double>(l);
    r.rows.push_back(row("setup", l, 0.001 * x));
    r.rows.push_back(row("encrypt", l, 0.002 * x));
    r.rows.push_back(row("ppkeygen", l, 0.010 * x + 0.05));
    r.rows.push_back(row("decrypt", l, 0.0005 * x + 0.01));
    r.rows.push_back(row("trace", l, 0.004));
  }
  return r;
}

bool check_ok(const std::vector<ShapeCheck>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c.ok;
  FAIL("no check named " << name);
  return false;
}

}  // namespace

TEST_CASE("linear_r2 against hand-computed values") {
  CHECK(linear_r2({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
  // y = x^2 on 1..4: r = 0.984..., r^2 = 0.9690...
  CHECK(linear_r2({1, 2, 3, 4}, {1, 4, 9, 16}) == doctest::Approx(0.96898).epsilon(1e-4));
  CHECK(linear_r2({1, 2, 3}, {1, 3, 2}) == doctest::Approx(0.25));
  CHECK(linear_r2({1}, {1}) == 0);
  CHECK(linear_r2({1, 2}, {3, 3}) == 0);
}

TEST_CASE("shape checks on synthetic reports") {
  auto good = synthetic();
  for (const auto& c : check_shape(good)) CHECK_MESSAGE(c.ok, c.name << " " << c.detail);

  auto non_monotone = synthetic();
  for (auto& r : non_monotone.rows)
    if (r.algorithm == "encrypt" && r.dim == 30) r.mean_seconds = 0.01;
  CHECK_FALSE(check_ok(check_shape(non_monotone), "encrypt monotone in l"));

  auto quadratic = synthetic();
  for (auto& r : quadratic.rows)
    if (r.algorithm == "setup") r.mean_seconds = std::pow(static_cast<double>(r.dim), 4) * 1e-9;
  CHECK_FALSE(check_ok(check_shape(quadratic), "setup linear in l"));

  auto growing_trace = synthetic();
  for (auto& r : growing_trace.rows)
    if (r.algorithm == "trace") r.mean_seconds = 0.001 * static_cast<double>(r.dim);
  CHECK_FALSE(check_ok(check_shape(growing_trace), "trace flat in l"));

  auto fast_issue = synthetic();
  for (auto& r : fast_issue.rows)
    if (r.algorithm == "ppkeygen" && r.dim == 10) r.mean_seconds = 0.005;
  CHECK_FALSE(check_ok(check_shape(fast_issue), "ppkeygen slowest at every l"));
}

TEST_CASE("CSV and JSON output") {
  const auto r = synthetic();
  const auto csv = r.to_csv();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "algorithm,l,reps,mean_seconds,pairings,exponentiations,hashes");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 25);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["backend"] == "toy");
  CHECK(j["rows"].size() == 25);
  CHECK(j["shape"].size() == 10);
}

TEST_CASE("bench refuses fewer than ten repetitions") {
  SeededRng rng(1);
  try {
    (void)run_bench<Toy>({1, 2}, 9, rng);
    FAIL("accepted 9 repetitions");
  } catch (const Error& e) {
    CHECK(e.family() == ErrorFamily::kUsage);
  }
  CHECK_THROWS_AS(run_bench<Toy>({}, 10, rng), Error);
  CHECK_THROWS_AS(run_bench<Toy>({0}, 10, rng), DimensionError);
}

TEST_CASE("toy bench rows carry the operation counts of each algorithm") {
  SeededRng rng(2);
  const auto report = run_bench<Toy>({1, 4, 7}, 10, rng);
  REQUIRE(report.rows.size() == 15);
  CHECK(report.backend == "toy");
  for (const auto& r : report.rows) {
    const std::uint64_t l = r.dim;
    CAPTURE(r.algorithm);
    CAPTURE(l);
    CHECK(r.reps == 10);
    CHECK(r.mean_seconds > 0);
    if (r.algorithm == "setup") {
      CHECK(r.counts.pairings == 1);
      CHECK(r.exponentiations() == l + 2);
    } else if (r.algorithm == "encrypt") {
      CHECK(r.counts.pairings == 0);
      CHECK(r.exponentiations() == 2 * l + 3);
    } else if (r.algorithm == "decrypt") {
      CHECK(r.counts.pairings == 5);
      CHECK(r.counts.exps == l + 2);
    } else if (r.algorithm == "trace") {
      CHECK(r.counts.pairings == 4);
      CHECK(r.counts.exps == 2);
      CHECK(r.counts.gt_exps == 1);
    } else {
      CHECK(r.algorithm == "ppkeygen");
      CHECK(r.counts.hashes == 4);
    }
  }
  // Issuance cost grows by the same amount for each added coordinate.
  const auto pk = report.series("ppkeygen");
  REQUIRE(pk.size() == 3);
  CHECK(pk[1].counts.pairings - pk[0].counts.pairings == pk[2].counts.pairings - pk[1].counts.pairings);
  CHECK(pk[1].exponentiations() - pk[0].exponentiations() == pk[2].exponentiations() - pk[1].exponentiations());
  CHECK(pk[1].exponentiations() > pk[0].exponentiations());
}

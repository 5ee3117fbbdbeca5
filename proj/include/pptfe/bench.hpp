#pragma once

// Timing and operation-count harness over a dimension grid.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "pptfe/op_counter.hpp"
#include "pptfe/ppkeygen.hpp"
#include "pptfe/scheme.hpp"

namespace pptfe {

inline constexpr std::size_t kMinBenchReps = 10;
inline constexpr std::size_t kBenchTraceCandidates = 10;
inline const std::vector<std::size_t> kDefaultBenchGrid = {10, 20, 30, 40, 50};

struct BenchRow {
  std::string algorithm;  // setup | encrypt | ppkeygen | decrypt | trace
  std::size_t dim = 0;
  std::size_t reps = 0;
  double mean_seconds = 0;
  OpCounts counts;  // one run's operations

  std::uint64_t exponentiations() const { return counts.exps + counts.gt_exps; }
};

struct BenchReport {
  std::string backend;
  std::vector<BenchRow> rows;

  std::vector<BenchRow> series(const std::string& algorithm) const;
  std::string to_csv() const;
  std::string to_json() const;
};

struct ShapeCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

inline constexpr double kMinLinearR2 = 0.9;
inline constexpr double kMaxTraceSpread = 1.5;

// Coefficient of determination of the least-squares line through (x, y).
double linear_r2(const std::vector<double>& x, const std::vector<double>& y);

// Monotone growth and linearity for the dimension-dependent algorithms,
// flatness for trace, and ppkeygen slowest at every grid point.
std::vector<ShapeCheck> check_shape(const BenchReport& report);

namespace bench_detail {

template <class Fn>
double time_once(Fn& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return elapsed.count();
}

template <class Fn>
OpCounts count_once(Fn& fn) {
  CountScope scope;
  fn();
  return scope.delta();
}

}  // namespace bench_detail

// Single-threaded. Each repetition round visits every (l, algorithm) cell
// once, so slow drift in machine speed spreads evenly over the grid instead
// of skewing whichever dimension happened to run during it. Trace uses a
// fixed candidate list with the key's identity first, so its cost is the
// fixed part plus one target-group exponentiation.
template <PairingGroup G>
BenchReport run_bench(const std::vector<std::size_t>& grid, std::size_t reps, Rng& rng) {
  using Scalar = typename G::Scalar;
  if (reps < kMinBenchReps) throw Error(ErrorFamily::kUsage, "bench needs at least 10 repetitions");
  if (grid.empty()) throw Error(ErrorFamily::kUsage, "bench grid is empty");

  struct Fixture {
    std::size_t l;
    SetupOutput<G> sys;
    std::vector<Scalar> x, y, candidates;
    KeyContext<G> ctx;
    Ciphertext<G> ct;
    FunctionalKey<G> key;
  };
  std::vector<Fixture> fixtures;
  for (const std::size_t l : grid) {
    if (l == 0) throw DimensionError("grid dimensions must be positive");
    auto sample_vec = [&] {
      std::vector<Scalar> v;
      for (std::size_t i = 0; i < l; ++i) v.push_back(Scalar::from_u64(rng.next_u64() % 51));
      return v;
    };
    Fixture f{l, setup<G>(l, rng), sample_vec(), sample_vec(), {}, {}, {}, {}};
    Scalar theta;
    do theta = Scalar::random(rng); while (theta.is_zero());
    f.ctx = {f.y, theta};
    f.ct = encrypt(f.sys.pp, f.x, rng);
    f.key = keygen(f.sys.pp, f.sys.msk, f.ctx, rng);
    f.candidates.push_back(theta);
    while (f.candidates.size() < kBenchTraceCandidates) f.candidates.push_back(Scalar::random(rng));
    fixtures.push_back(std::move(f));
  }

  static constexpr const char* kAlgorithms[] = {"setup", "encrypt", "ppkeygen", "decrypt", "trace"};
  auto run = [&rng](const Fixture& f, std::size_t alg) {
    const auto& pp = f.sys.pp;
    switch (alg) {
      case 0: (void)setup<G>(f.l, rng); break;
      case 1: (void)encrypt(pp, f.x, rng); break;
      case 2: {
        auto [state, msg1] = user_round1(pp, f.ctx.theta, f.y, rng);
        const auto msg2 = kgc_respond(pp, f.sys.msk, msg1, rng);
        (void)user_finalize(pp, state, msg2);
        break;
      }
      case 3:
        if (!decrypt(pp, f.key, f.ctx, f.ct)) throw std::logic_error("bench decrypt failed");
        break;
      default:
        if (!trace(pp, f.sys.tsk, f.key, std::span<const Scalar>(f.candidates)))
          throw std::logic_error("bench trace failed");
    }
  };

  BenchReport report;
  report.backend = std::string(to_string(G::kId));
  std::vector<double> totals(fixtures.size() * std::size(kAlgorithms), 0.0);
  for (const auto& f : fixtures)
    for (std::size_t a = 0; a < std::size(kAlgorithms); ++a) {
      auto fn = [&] { run(f, a); };
      report.rows.push_back({kAlgorithms[a], f.l, reps, 0, bench_detail::count_once(fn)});  // doubles as warm-up
    }
  for (std::size_t rep = 0; rep < reps; ++rep)
    for (std::size_t i = 0; i < fixtures.size(); ++i)
      for (std::size_t a = 0; a < std::size(kAlgorithms); ++a) {
        auto fn = [&] { run(fixtures[i], a); };
        totals[i * std::size(kAlgorithms) + a] += bench_detail::time_once(fn);
      }
  for (std::size_t k = 0; k < totals.size(); ++k) report.rows[k].mean_seconds = totals[k] / static_cast<double>(reps);
  return report;
}

}  // namespace pptfe

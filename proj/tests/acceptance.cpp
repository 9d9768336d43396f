// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "truth_tables.hpp"
#include "zeroflow/classifier.hpp"
#include "zeroflow/error.hpp"
#include "zeroflow/flows.hpp"
#include "zeroflow/lattice_fit.hpp"
#include "zeroflow/measure.hpp"
#include "zeroflow/models.hpp"

using namespace zeroflow;

namespace {

constexpr double kDisplacedAbsErr = 1e-10;
constexpr double kDisplacedSeconds = 10.0;
constexpr double kJacobiAbsErr = 1e-8;
constexpr std::size_t kJacobiDim = 2000;
constexpr std::size_t kScaleLevels = 1000;
constexpr double kScaleTol = 1e-6;
constexpr double kScaleSeconds = 600.0;
constexpr std::size_t kCfSaturation = 25;
constexpr std::size_t kCfResolved = 100;
constexpr int kInterlacingTrials = 1000;
constexpr std::size_t kInterlacingMaxDegree = 60;
constexpr double kWeightSumErr = 1e-12;
constexpr std::size_t kMeasureMaxDegree = 200;
constexpr std::size_t kMomentMaxDegree = 40;
constexpr double kMomentRelErr = 1e-9;
constexpr int kCfIdentityPoints = 100;
constexpr double kCfIdentityRelErr = 1e-10;
constexpr double kMassErr = 1e-8;
constexpr double kLatticeResidual = 1e-10;
constexpr double kRabiMinResidual = 1e-3;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

MonicRecurrence from_random(const oracle::RandomRecurrence& r) {
  return MonicRecurrence::tabulated(r.c, std::vector<double>(r.lam.begin() + 1, r.lam.end()));
}

std::vector<MonicRecurrence> builtin_models() {
  return {displaced_recurrence(0.2),
          displaced_recurrence(0.5),
          displaced_recurrence(1.0),
          rabi_recurrence({0.2, 0.4, Parity::plus}),
          rabi_recurrence({0.2, 0.4, Parity::minus}),
          rabi_recurrence({1.0, 0.4, Parity::plus}),
          rabi_recurrence({1.0, 0.4, Parity::minus})};
}

Outcome displaced_exactness() {
  double worst = 0.0, slowest = 0.0;
  bool ok = true;
  for (double kappa : {0.1, 0.5, 1.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_flows(displaced_recurrence(kappa), 100, 1e-12, default_schedule(100));
    const double dt = seconds_since(t0);
    const auto exact = displaced_oscillator_spectrum(kappa, 100);
    ok = ok && r.all_converged() && dt < kDisplacedSeconds;
    for (std::size_t l = 0; l < 100; ++l) worst = std::max(worst, std::abs(r.levels[l].xi - exact[l]));
    slowest = std::max(slowest, dt);
  }
  ok = ok && worst < kDisplacedAbsErr;
  return {ok, fmt("max |err| %.3g over 300 levels, slowest %.2fs", worst, slowest)};
}

Outcome rabi_cross_validation() {
  double worst = 0.0;
  bool ok = true;
  for (Parity parity : {Parity::plus, Parity::minus}) {
    const auto rec = rabi_recurrence({0.2, 0.4, parity});
    const auto r = run_flows(rec, 50, 1e-10, default_schedule(50));
    const auto t = rec.table(kJacobiDim);
    const auto ev = oracle::jacobi_eigenvalues(t.c, t.lam, kJacobiDim);
    ok = ok && r.all_converged();
    for (std::size_t l = 0; l < 50; ++l) worst = std::max(worst, std::abs(r.levels[l].xi - ev[l]));
  }
  ok = ok && worst < kJacobiAbsErr;
  return {ok, fmt("max |xi - eig| %.3g over 2 x 50 levels (Jacobi dim %zu)", worst, kJacobiDim)};
}

Outcome scale_target() {
  bool ok = true;
  std::string detail;
  for (Parity parity : {Parity::plus, Parity::minus}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_flows(rabi_recurrence({0.2, 0.4, parity}), kScaleLevels, kScaleTol,
                             default_schedule(kScaleLevels), cli::thread_budget());
    const double dt = seconds_since(t0);
    std::size_t converged = 0;
    for (const auto& lv : r.levels) converged += lv.converged && std::isfinite(lv.xi);
    ok = ok && converged >= kScaleLevels && dt < kScaleSeconds;
    detail += fmt("%s: %zu converged, n_final %zu, %.1fs; ", parity == Parity::plus ? "+" : "-",
                  converged, r.n_final, dt);
  }
  return {ok, detail};
}

Outcome cf_failure() {
  const auto r = cli::cf_compare(displaced_recurrence(0.5), -0.5, 100.0, 1e-3, 1.0, std::nullopt,
                                 1e-10, cli::thread_budget());
  const bool ok = r.cf_total <= kCfSaturation && r.level_total >= kCfResolved;
  return {ok, fmt("continued fraction sees %zu roots, zero flows resolve %zu levels (depth %zu)",
                  r.cf_total, r.level_total, r.depth)};
}

Outcome interlacing() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> degree(2, kInterlacingMaxDegree);
  std::size_t violations = 0, checks = 0;
  for (int trial = 0; trial < kInterlacingTrials; ++trial) {
    const std::size_t top = degree(rng);
    const auto rec = from_random(oracle::random_recurrence(rng, top));
    std::vector<double> prev = zeros_of(rec, 1, 1).zeros;
    for (std::size_t n = 1; n < top; ++n) {
      const auto next = zeros_of(rec, n + 1, n + 1).zeros;
      for (std::size_t l = 0; l < n; ++l) {
        const double slack = 4.0 * bisection_tolerance(prev[l]);
        ++checks;
        if (!(next[l] < prev[l] + slack) || !(prev[l] < next[l + 1] + slack)) ++violations;
      }
      prev = next;
    }
  }
  return {violations == 0, fmt("%zu violations in %zu checks", violations, checks)};
}

Outcome measure_normalization() {
  double worst_sum = 0.0, worst_moment = 0.0;
  bool positive = true;
  const std::vector<std::size_t> degrees{1, 2, 3, 5, 10, 20, 40, 80, 120, 160, 200};
  for (const auto& rec : builtin_models()) {
    for (std::size_t n : degrees) {
      if (n > kMeasureMaxDegree) continue;
      const auto m = partial_fractions(rec, n);
      for (const auto& w : m.weights) positive = positive && w.sign() > 0;
      worst_sum = std::max(worst_sum, std::abs(m.total_weight() - 1.0));
    }
    for (std::size_t n = 1; n <= kMomentMaxDegree; ++n) {
      const auto a = partial_fractions(rec, n);
      const auto b = partial_fractions(rec, n + 1);
      for (unsigned j = 0; j <= 2 * n - 1; ++j) {
        // rounding in either sum is relative to its absolute moment
        double scale_a = 0.0, scale_b = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          scale_a += a.weights[k].to_double() * std::pow(std::abs(a.nodes[k]), j);
        for (std::size_t k = 0; k <= n; ++k)
          scale_b += b.weights[k].to_double() * std::pow(std::abs(b.nodes[k]), j);
        const double scale = std::max(scale_a, scale_b);
        worst_moment = std::max(worst_moment, std::abs(a.moment(j) - b.moment(j)) / scale);
      }
    }
  }
  const bool ok = positive && worst_sum < kWeightSumErr && worst_moment < kMomentRelErr;
  return {ok, fmt("weights %s, max |sum - 1| %.3g, max moment drift %.3g",
                  positive ? "positive" : "NOT positive", worst_sum, worst_moment)};
}

Outcome cf_identity() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> xs(-3.0, 40.0);
  constexpr std::size_t depth = 60;
  double worst = 0.0;
  for (const auto& rec : builtin_models()) {
    std::vector<double> poles = zeros_of(rec, depth, depth).zeros;
    const auto e_zeros = zeros_of(rec.associated(1), depth - 1, depth - 1).zeros;
    poles.insert(poles.end(), e_zeros.begin(), e_zeros.end());
    int taken = 0;
    while (taken < kCfIdentityPoints) {
      const double x = xs(rng);
      bool near = false;
      for (double p : poles) near = near || std::abs(x - p) < 1e-6;
      if (near) continue;
      ++taken;
      worst = std::max(worst, std::abs(eval_E(rec, x, depth) * eval_F(rec, x, depth) + 1.0));
    }
  }
  return {worst < kCfIdentityRelErr,
          fmt("max |E F + 1| %.3g over %d points x 7 models", worst, kCfIdentityPoints)};
}

Outcome mass_formula() {
  const auto rec = displaced_recurrence(0.2);
  const double mass = spectral_mass(rec, -0.04).mass;
  const double err = std::abs(mass - std::exp(-0.04));
  int divergent = 0;
  const double gaps[] = {0.46, 1.46, 2.46, 5.1};
  for (double x : gaps) {
    try {
      (void)spectral_mass(rec, x);
    } catch (const Error& e) {
      divergent += e.code() == Errc::Divergent;
    }
  }
  const bool ok = err < kMassErr && divergent == 4;
  return {ok, fmt("ground-state mass error %.3g, %d/4 gap points Divergent", err, divergent)};
}

std::vector<double> family_levels(Family f, double u0, double u1, double u2, double q) {
  std::vector<double> v;
  for (int i = 1; i <= 50; ++i) {
    const double n = i;
    switch (f) {
      case Family::linear: v.push_back(u0 + u1 * n); break;
      case Family::quadratic: v.push_back(u0 + u1 * n + u2 * n * n); break;
      case Family::linear_q: v.push_back(u0 + u1 * std::pow(q, n)); break;
      case Family::q_quadratic: v.push_back(u0 + u1 * std::pow(q, n) + u2 * std::pow(q, -n)); break;
    }
  }
  return v;
}

Outcome lattice_round_trip() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mag(0.5, 2.0), qd(0.85, 0.95), off(-2.0, 2.0);
  int identified = 0, total = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    for (Family f : kAllFamilies) {
      const double u0 = off(rng), u1 = mag(rng), u2 = mag(rng), q = qd(rng);
      std::vector<double> levels;
      switch (f) {
        case Family::linear: levels = family_levels(f, u0, u1, 0, 0); break;
        case Family::quadratic: levels = family_levels(f, u0, u1, u2, 0); break;
        case Family::linear_q: levels = family_levels(f, u0, -u1, 0, q); break;
        case Family::q_quadratic: levels = family_levels(f, u0, -u1, u2, q); break;
      }
      const auto best = solvability_distance(levels);
      ++total;
      identified += best.family == f && best.residual < kLatticeResidual;
      worst = std::max(worst, best.residual);
    }
  }
  double rabi_best = std::numeric_limits<double>::infinity();
  for (Parity parity : {Parity::plus, Parity::minus}) {
    const auto r = run_flows(rabi_recurrence({0.2, 0.4, parity}), 50, 1e-10, default_schedule(50));
    std::vector<double> levels;
    for (const auto& lv : r.levels) levels.push_back(lv.xi);
    rabi_best = std::min(rabi_best, solvability_distance(levels).residual);
  }
  const bool ok = identified == total && rabi_best > kRabiMinResidual;
  return {ok, fmt("%d/%d re-identified (max residual %.3g); Rabi best residual %.3g", identified,
                  total, worst, rabi_best)};
}

Outcome perron_kreuser() {
  struct Prefactors {
    double a, b, t1, t2;
    const char* const* cases;
    const char* const* dominant;
  };
  const Prefactors sets[] = {{2.0, 1.0, 2.0, 0.5, truth::kCasesLarge, truth::kDominantLarge},
                             {0.5, 1.0, 0.5, 0.25, truth::kCasesSmall, truth::kDominantSmall}};
  const char labels[] = {'a', 'b', 'c', 'd', '.'};
  int mismatches = 0, cells = 0;
  for (const auto& s : sets) {
    for (int row = 0; row < 9; ++row) {
      for (int j = -8; j <= 4; ++j) {
        const ClassReport r =
            classify({Rational(4 - row, 4), Rational(j, 4), s.a, s.b, s.t1, s.t2});
        ++cells;
        const char got = labels[static_cast<int>(r.case_label)];
        mismatches += got != s.cases[row][j + 8];
        mismatches += (r.dominant_excluded ? 'x' : '.') != s.dominant[row][j + 8];
        mismatches += r.in_class != (r.case_label != CaseLabel::none);
      }
    }
  }
  const auto rabi = classify(rabi_raw({0.2, 0.4, Parity::plus}).asymptotics);
  const bool ok = mismatches == 0 && rabi.case_label == CaseLabel::a;
  return {ok, fmt("%d mismatches over %d cells; Rabi case %s", mismatches, cells,
                  to_string(rabi.case_label).c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"displaced oscillator exactness", displaced_exactness},
      {"Rabi cross-validation against Jacobi matrix", rabi_cross_validation},
      {"scale target of 1000 levels per parity", scale_target},
      {"continued-fraction root detection saturates", cf_failure},
      {"zero interlacing on random recurrences", interlacing},
      {"measure normalization and moment matching", measure_normalization},
      {"continued-fraction identity E F = -1", cf_identity},
      {"spectral mass and divergence", mass_formula},
      {"lattice classifier round trip", lattice_round_trip},
      {"Perron-Kreuser truth table", perron_kreuser},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "zeroflow/error.hpp"
#include "zeroflow/flows.hpp"
#include "zeroflow/models.hpp"

using namespace zeroflow;

namespace {

MonicRecurrence hermite() {
  return MonicRecurrence([](std::size_t) { return 0.0; },
                         [](std::size_t n) { return static_cast<double>(n); });
}

MonicRecurrence from_random(const oracle::RandomRecurrence& r) {
  return MonicRecurrence::tabulated(r.c, std::vector<double>(r.lam.begin() + 1, r.lam.end()));
}

double slack(double x) { return 4.0 * bisection_tolerance(x); }

}  // namespace

TEST_CASE("zeros_of small examples") {
  const auto h = zeros_of(hermite(), 3, 3).zeros;
  REQUIRE(h.size() == 3);
  CHECK(h[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-15));
  CHECK(std::abs(h[1]) < 1e-15);
  CHECK(h[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  const auto q = zeros_of(displaced_recurrence(0.2), 2, 2).zeros;
  CHECK(q[0] == doctest::Approx((1.0 - std::sqrt(1.16)) / 2.0).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx((1.0 + std::sqrt(1.16)) / 2.0).epsilon(1e-14));

  const auto one = zeros_of(rabi_recurrence({0.2, 0.4, Parity::plus}), 1, 1).zeros;
  CHECK(std::abs(one[0] - 0.4) <= bisection_tolerance(0.4));
}

TEST_CASE("zeros_of agrees with the Jacobi eigensolver") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = oracle::random_recurrence(rng, 50);
    const auto z = zeros_of(from_random(r), 50, 50, trial % 3 + 1).zeros;
    const auto ev = oracle::jacobi_eigenvalues(r.c, r.lam, 50);
    for (std::size_t k = 0; k < 50; ++k)
      CHECK(std::abs(z[k] - ev[k]) < 1e-11 * std::max(1.0, std::abs(ev[k])));
  }
}

TEST_CASE("zeros_of validates its arguments") {
  for (auto [n, count] : {std::pair<std::size_t, std::size_t>{3, 4}, {0, 0}}) {
    try {
      (void)zeros_of(hermite(), n, count);
      FAIL("expected InvalidArgument");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidArgument);
    }
  }
}

TEST_CASE("run_flows on the displaced oscillator") {
  const auto r = run_flows(displaced_recurrence(0.2), 5, 1e-10, default_schedule(5));
  CHECK(r.all_converged());
  const auto exact = displaced_oscillator_spectrum(0.2, 5);
  for (std::size_t l = 0; l < 5; ++l) {
    CHECK(r.levels[l].l == l + 1);
    CHECK(r.levels[l].converged);
    CHECK(std::abs(r.levels[l].xi - exact[l]) < 1e-10);
  }
}

TEST_CASE("run_flows on Rabi against the Jacobi matrix") {
  for (Parity parity : {Parity::plus, Parity::minus}) {
    const auto rec = rabi_recurrence({0.2, 0.4, parity});
    const auto r = run_flows(rec, 10, 1e-8, default_schedule(10), 2);
    const auto t = rec.table(2000);
    const auto ev = oracle::jacobi_eigenvalues(t.c, t.lam, 2000);
    for (std::size_t l = 0; l < 10; ++l) CHECK(std::abs(r.levels[l].xi - ev[l]) < 1e-8);
    for (std::size_t l = 1; l < 10; ++l) CHECK(r.levels[l].xi > r.levels[l - 1].xi);
    for (const auto& f : r.flows)
      for (std::size_t k = 1; k < f.history.size(); ++k)
        CHECK(f.history[k].second <= f.history[k - 1].second + slack(f.history[k].second));
  }
}

TEST_CASE("run_flows is independent of the thread count") {
  const auto rec = rabi_recurrence({0.9, 1.7, Parity::minus});
  const auto a = run_flows(rec, 40, 1e-11, default_schedule(40), 1);
  const auto b = run_flows(rec, 40, 1e-11, default_schedule(40), 4);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    CHECK(a.levels[l].xi == b.levels[l].xi);
    CHECK(a.levels[l].n_converged == b.levels[l].n_converged);
  }
  CHECK(a.flows[39].history == b.flows[39].history);
}

TEST_CASE("exhausted schedule returns a partial result") {
  const auto rec = rabi_recurrence({1.0, 0.4, Parity::plus});
  const auto r = run_flows(rec, 30, 1e-12, Schedule::explicit_points({30, 31}));
  CHECK(r.budget_exceeded);
  CHECK_FALSE(r.all_converged());
  CHECK_FALSE(r.levels.back().converged);
  CHECK(r.levels.back().n_converged == 31);
  CHECK(r.n_final == 31);
}

TEST_CASE("tabulated models cap the schedule") {
  std::vector<double> c, lam;
  for (int n = 0; n < 40; ++n) c.push_back(n);
  for (int n = 1; n < 40; ++n) lam.push_back(0.04 * n);
  const auto rec = MonicRecurrence::tabulated(c, lam);
  const auto r = run_flows(rec, 3, 1e-10, default_schedule(3));
  CHECK(r.n_final <= 40);
  CHECK(r.levels[0].xi == doctest::Approx(-0.04).epsilon(1e-12));
}

TEST_CASE("flow_trace examples") {
  const auto f = flow_trace(displaced_recurrence(0.2), 1, Schedule::explicit_points({10, 20, 40}),
                            1e-12);
  REQUIRE(!f.history.empty());
  CHECK(std::abs(f.history.back().second + 0.04) < 1e-6);
  for (std::size_t k = 1; k < f.history.size(); ++k)
    CHECK(f.history[k].second <= f.history[k - 1].second + slack(-0.04));

  const auto single = flow_trace(hermite(), 1, Schedule::explicit_points({7}), 1e-10);
  CHECK(single.history.size() == 1);
  CHECK_FALSE(single.converged);
  CHECK_FALSE(single.xi);

  const auto h = flow_trace(hermite(), 1, Schedule::explicit_points({2, 4, 8}), 1e-12);
  REQUIRE(h.history.size() == 3);
  CHECK(h.history[0].second == doctest::Approx(-1.0));
  CHECK(h.history[1].second < h.history[0].second);
  CHECK(h.history[2].second < h.history[1].second);
}

TEST_CASE("schedules") {
  const auto g = Schedule::geometric(30, 1.5, 100).points();
  CHECK(g == std::vector<std::size_t>{30, 45, 68, 100});
  CHECK(default_schedule(10).points().front() == 30);
  try {
    (void)Schedule::explicit_points({5, 5});
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
  }
}

TEST_CASE("associated zeros coagulate for higher flows") {
  // at l = 4 the second-associated zero still trails by about 4e-5
  const auto rec = rabi_recurrence({0.2, 0.4, Parity::plus});
  const auto four = coagulation_triple(rec, 80, 4);
  CHECK(std::abs(four.first_associated - four.base) < 1e-5);
  for (std::size_t l = 5; l <= 8; ++l) {
    const auto t = coagulation_triple(rec, 80, l);
    CAPTURE(l);
    CHECK(std::abs(t.second_associated - t.first_associated) < 1e-5);
    CHECK(std::abs(t.first_associated - t.base) < 1e-5);
  }
  const auto two = coagulation_triple(rec, 80, 2);
  CHECK(two.second_associated < two.first_associated);
  CHECK(two.first_associated < two.base);
}

TEST_CASE("interlacing on random recurrences") {
  std::mt19937_64 rng(2024);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = oracle::random_recurrence(rng, 41);
    const auto rec = from_random(r);
    std::vector<double> prev = zeros_of(rec, 1, 1).zeros;
    for (std::size_t n = 2; n <= 40; ++n) {
      const auto cur = zeros_of(rec, n, n).zeros;
      for (std::size_t l = 0; l + 1 < n; ++l) {
        const double tol = slack(prev[l]);
        if (!(cur[l] < prev[l] + tol) || !(prev[l] < cur[l + 1] + tol)) ++violations;
      }
      prev = cur;
    }
  }
  CHECK(violations == 0);
}

#include "zeroflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zeroflow/error.hpp"
#include "zeroflow/parallel.hpp"

namespace zeroflow {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Upward movement of a flow tolerated as rounding noise.
double monotone_slack(double x) noexcept {
  return 4.0 * bisection_tolerance(x) + 64.0 * kEps * std::max(1.0, std::fabs(x));
}

struct Bracket {
  std::size_t index;
  double lo;
  double hi;
};

// Splits (lo, hi] with count(lo) = klo < index <= khi = count(hi) until every
// requested index sits alone in its bracket.
void isolate(const CoefficientTable& t, std::size_t n, double lo, std::size_t klo, double hi,
             std::size_t khi, std::span<const std::size_t> indices, std::vector<Bracket>& out) {
  if (indices.empty()) return;
  if (khi - klo == 1) {
    out.push_back({indices.front(), lo, hi});
    return;
  }
  const double mid = lo + 0.5 * (hi - lo);
  if (!(mid > lo && mid < hi) || hi - lo <= 4.0 * bisection_tolerance(mid)) {
    throw Error(Errc::ZeroCollision,
                "zeros " + std::to_string(klo + 1) + ".." + std::to_string(khi) + " of P_" +
                    std::to_string(n) + " cannot be separated near x = " + std::to_string(mid));
  }
  const std::size_t kmid = count_zeros_below(t, mid, n);
  const auto split = std::upper_bound(indices.begin(), indices.end(), kmid);
  const auto left = indices.subspan(0, static_cast<std::size_t>(split - indices.begin()));
  const auto right = indices.subspan(left.size());
  isolate(t, n, lo, klo, mid, kmid, left, out);
  isolate(t, n, mid, kmid, hi, khi, right, out);
}

double bisect(const CoefficientTable& t, std::size_t n, const Bracket& b) {
  double lo = b.lo;
  double hi = b.hi;
  for (;;) {
    const double width_tol = bisection_tolerance(std::max(std::fabs(lo), std::fabs(hi)));
    if (hi - lo <= width_tol) break;
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if (count_zeros_below(t, mid, n) >= b.index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

std::vector<std::size_t> usable_points(const MonicRecurrence& rec, const Schedule& schedule) {
  std::vector<std::size_t> pts = schedule.points();
  if (const auto limit = rec.max_degree()) {
    if (pts.front() > *limit) {
      throw Error(Errc::DegreeOutOfRange, "schedule starts at degree " + std::to_string(pts.front()) +
                                              " beyond the usable degree " + std::to_string(*limit));
    }
    const bool clipped = pts.back() > *limit;
    std::erase_if(pts, [&](std::size_t p) { return p > *limit; });
    if (clipped && pts.back() != *limit) pts.push_back(*limit);
  }
  return pts;
}

}  // namespace

double bisection_tolerance(double x) noexcept {
  return std::ldexp(std::max(1.0, std::fabs(x)), -50);
}

Schedule Schedule::geometric(std::size_t n_start, double growth, std::size_t n_max) {
  if (n_start == 0) throw Error(Errc::InvalidArgument, "schedule start must be >= 1");
  if (!(growth > 1.0) || !std::isfinite(growth)) {
    throw Error(Errc::InvalidArgument, "growth factor must be > 1");
  }
  if (n_max < n_start) throw Error(Errc::InvalidArgument, "n_max must be >= n_start");
  std::vector<std::size_t> pts{n_start};
  while (pts.back() < n_max) {
    const auto grown = static_cast<std::size_t>(std::ceil(growth * static_cast<double>(pts.back())));
    pts.push_back(std::min(n_max, std::max(grown, pts.back() + 1)));
  }
  return Schedule(std::move(pts));
}

Schedule Schedule::explicit_points(std::vector<std::size_t> points) {
  if (points.empty()) throw Error(Errc::InvalidArgument, "schedule needs at least one point");
  if (points.front() == 0) throw Error(Errc::InvalidArgument, "schedule degrees must be >= 1");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] <= points[i - 1]) {
      throw Error(Errc::InvalidArgument, "schedule degrees must be strictly increasing");
    }
  }
  return Schedule(std::move(points));
}

Schedule default_schedule(std::size_t n_levels, std::size_t n_max) {
  const std::size_t start = n_levels + kDefaultStartMargin;
  return Schedule::geometric(start, kDefaultGrowth, std::max(n_max, start));
}

std::vector<double> solve_zeros(const CoefficientTable& t, std::size_t n,
                                std::span<const std::size_t> indices,
                                std::span<const double> anchors, unsigned threads) {
  if (indices.empty()) return {};
  if (indices.front() == 0 || indices.back() > n) {
    throw Error(Errc::InvalidArgument, "zero indices must lie in [1, n]");
  }
  if (!std::is_sorted(indices.begin(), indices.end()) ||
      std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw Error(Errc::InvalidArgument, "zero indices must be strictly increasing");
  }

  const auto [lower, upper] = zero_bounds(t, n);
  std::vector<double> points{lower, upper};
  for (double a : anchors) {
    if (a > lower && a < upper) points.push_back(a);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<std::size_t> counts(points.size());
  detail::parallel_for(points.size(), threads,
                       [&](std::size_t i) { counts[i] = count_zeros_below(t, points[i], n); });
  if (counts.front() != 0 || counts.back() != n) {
    throw Error(Errc::InvalidArgument, "Sturm counts at the Gershgorin bounds are inconsistent");
  }

  // keep anchors whose counts are monotone; rounding can break ties otherwise
  std::vector<double> grid{points.front()};
  std::vector<std::size_t> grid_counts{counts.front()};
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (counts[i] >= grid_counts.back()) {
      grid.push_back(points[i]);
      grid_counts.push_back(counts[i]);
    }
  }

  // group the requested indices by the anchor interval containing them
  struct Segment {
    std::size_t cell;
    std::size_t first;
    std::size_t last;
  };
  std::vector<Segment> segments;
  std::size_t cell = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    while (grid_counts[cell + 1] < indices[k]) ++cell;
    if (!segments.empty() && segments.back().cell == cell) {
      segments.back().last = k + 1;
    } else {
      segments.push_back({cell, k, k + 1});
    }
  }

  std::vector<std::vector<Bracket>> per_segment(segments.size());
  detail::parallel_for(segments.size(), threads, [&](std::size_t s) {
    const Segment& seg = segments[s];
    isolate(t, n, grid[seg.cell], grid_counts[seg.cell], grid[seg.cell + 1],
            grid_counts[seg.cell + 1], indices.subspan(seg.first, seg.last - seg.first),
            per_segment[s]);
  });
  std::vector<Bracket> brackets;
  brackets.reserve(indices.size());
  for (auto& v : per_segment) brackets.insert(brackets.end(), v.begin(), v.end());

  std::vector<double> zeros(brackets.size());
  detail::parallel_for(brackets.size(), threads,
                       [&](std::size_t i) { zeros[i] = bisect(t, n, brackets[i]); });

  for (std::size_t i = 1; i < zeros.size(); ++i) {
    if (indices[i] == indices[i - 1] + 1 &&
        zeros[i] - zeros[i - 1] <= 4.0 * bisection_tolerance(zeros[i])) {
      throw Error(Errc::ZeroCollision, "zeros " + std::to_string(indices[i - 1]) + " and " +
                                           std::to_string(indices[i]) + " of P_" +
                                           std::to_string(n) + " coincide within tolerance");
    }
  }
  return zeros;
}

ZeroTableau zeros_of(const MonicRecurrence& rec, std::size_t n, std::size_t count,
                     unsigned threads) {
  if (count < 1 || count > n) throw Error(Errc::InvalidArgument, "zeros_of needs 1 <= count <= n");
  const CoefficientTable t = rec.table(n);
  std::vector<std::size_t> indices(count);
  for (std::size_t i = 0; i < count; ++i) indices[i] = i + 1;
  return ZeroTableau{n, solve_zeros(t, n, indices, {}, threads)};
}

SpectrumResult run_flows(const MonicRecurrence& rec, std::size_t n_levels, double tol,
                         const Schedule& schedule, unsigned threads) {
  if (n_levels < 1) throw Error(Errc::InvalidArgument, "n_levels must be >= 1");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be > 0");
  const std::vector<std::size_t> points = usable_points(rec, schedule);
  if (points.front() < n_levels) {
    throw Error(Errc::InvalidArgument, "schedule must start at a degree >= n_levels");
  }

  SpectrumResult result;
  result.model_descriptor = rec.description();
  result.tolerance = tol;
  result.flows.resize(n_levels);
  result.levels.resize(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) {
    result.flows[l].l = l + 1;
    result.levels[l].l = l + 1;
    result.levels[l].last_decrement = std::numeric_limits<double>::quiet_NaN();
  }

  std::vector<double> current(n_levels, 0.0);
  std::size_t remaining = n_levels;
  for (std::size_t k = 0; k < points.size() && remaining > 0; ++k) {
    const std::size_t n = points[k];
    const CoefficientTable t = rec.table(n);

    std::vector<std::size_t> targets;
    targets.reserve(remaining);
    for (std::size_t l = 0; l < n_levels; ++l) {
      if (!result.levels[l].converged) targets.push_back(l + 1);
    }
    std::span<const double> anchors;
    if (k > 0) anchors = current;
    const std::vector<double> values = solve_zeros(t, n, targets, anchors, threads);

    for (std::size_t i = 0; i < targets.size(); ++i) {
      const std::size_t l = targets[i] - 1;
      const double x = values[i];
      LevelResult& level = result.levels[l];
      ZeroFlow& flow = result.flows[l];
      if (k > 0) {
        const double decrement = current[l] - x;
        const double slack = monotone_slack(x);
        if (decrement < -slack) {
          throw Error(Errc::NonMonotoneFlow,
                      "flow " + std::to_string(l + 1) + " increased from " + std::to_string(current[l]) +
                          " to " + std::to_string(x) + " at degree " + std::to_string(n),
                      l + 1);
        }
        const double previous = level.last_decrement;
        const bool tail_monotone = std::isnan(previous) || decrement <= previous + slack;
        level.last_decrement = decrement;
        if (decrement < tol && tail_monotone) {
          level.converged = true;
          flow.converged = true;
          flow.xi = x;
          --remaining;
        }
      }
      flow.history.emplace_back(n, x);
      level.xi = x;
      level.n_converged = n;
      current[l] = x;
    }
    result.n_final = n;
  }
  result.budget_exceeded = remaining > 0;
  return result;
}

ZeroFlow flow_trace(const MonicRecurrence& rec, std::size_t l, const Schedule& schedule, double tol,
                    unsigned threads) {
  if (l < 1) throw Error(Errc::InvalidArgument, "flow index l must be >= 1");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be > 0");
  const std::vector<std::size_t> points = usable_points(rec, schedule);
  if (points.front() < l) throw Error(Errc::InvalidArgument, "schedule must start at a degree >= l");

  ZeroFlow flow;
  flow.l = l;
  const std::size_t index[] = {l};
  double previous_decrement = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::size_t n = points[k];
    const CoefficientTable t = rec.table(n);
    std::vector<double> anchor;
    if (k > 0) anchor.push_back(flow.history.back().second);
    const double x = solve_zeros(t, n, index, anchor, threads).front();
    if (k > 0) {
      const double decrement = flow.history.back().second - x;
      const double slack = monotone_slack(x);
      if (decrement < -slack) {
        throw Error(Errc::NonMonotoneFlow,
                    "flow " + std::to_string(l) + " increased at degree " + std::to_string(n), l);
      }
      const bool tail_monotone =
          std::isnan(previous_decrement) || decrement <= previous_decrement + slack;
      flow.history.emplace_back(n, x);
      if (decrement < tol && tail_monotone) {
        flow.converged = true;
        flow.xi = x;
        break;
      }
      previous_decrement = decrement;
    } else {
      flow.history.emplace_back(n, x);
    }
  }
  return flow;
}

CoagulationTriple coagulation_triple(const MonicRecurrence& rec, std::size_t n, std::size_t l) {
  if (l < 2 || n < l) throw Error(Errc::InvalidArgument, "coagulation_triple needs 2 <= l <= n");
  CoagulationTriple triple;
  triple.second_associated = zeros_of(rec.associated(2), n - 1, l - 1).zeros.back();
  triple.first_associated = zeros_of(rec.associated(1), n, l).zeros.back();
  triple.base = zeros_of(rec, n + 1, l + 1).zeros.back();
  return triple;
}

}  // namespace zeroflow

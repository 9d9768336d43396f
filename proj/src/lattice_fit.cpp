#include "zeroflow/lattice_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zeroflow/error.hpp"

namespace zeroflow {
namespace {

constexpr std::size_t kMinLevels = 4;
constexpr int kGridPoints = 400;
constexpr int kGoldenIterations = 200;

struct LinearSolve {
  Eigen::VectorXd coef;
  double rms = std::numeric_limits<double>::infinity();
  bool ok = false;
};

LinearSolve least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  LinearSolve out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < design.cols()) return out;
  out.coef = qr.solve(y);
  const Eigen::VectorXd r = design * out.coef - y;
  out.rms = std::sqrt(r.squaredNorm() / static_cast<double>(y.size()));
  out.ok = std::isfinite(out.rms);
  return out;
}

// Columns 1, q^(n-1) and, for the quadratic case, q^(K-n); both powers stay
// in (0, 1] so the design is well scaled.
Eigen::MatrixXd q_design(std::size_t k, double q, bool with_inverse) {
  Eigen::MatrixXd m(k, with_inverse ? 3 : 2);
  for (std::size_t i = 0; i < k; ++i) {
    const double n = static_cast<double>(i + 1);
    m(i, 0) = 1.0;
    m(i, 1) = std::pow(q, n - 1.0);
    if (with_inverse) m(i, 2) = std::pow(q, static_cast<double>(k) - n);
  }
  return m;
}

double q_of(double t) { return std::exp(-std::exp(t)); }

LatticeFit fit_polynomial(const Eigen::VectorXd& y, Family family) {
  const std::size_t k = static_cast<std::size_t>(y.size());
  const int cols = family == Family::linear ? 2 : 3;
  Eigen::MatrixXd m(k, cols);
  for (std::size_t i = 0; i < k; ++i) {
    const double n = static_cast<double>(i + 1);
    m(i, 0) = 1.0;
    m(i, 1) = n;
    if (cols == 3) m(i, 2) = n * n;
  }
  const LinearSolve s = least_squares(m, y);
  if (!s.ok) throw Error(Errc::DegenerateFit, "design matrix is rank-deficient");
  LatticeFit fit;
  fit.family = family;
  fit.u0 = s.coef(0);
  fit.u1 = s.coef(1);
  fit.u2 = cols == 3 ? s.coef(2) : 0.0;
  fit.residual = s.rms;
  fit.levels_used = k;
  return fit;
}

LatticeFit fit_q(const Eigen::VectorXd& y, Family family) {
  const std::size_t k = static_cast<std::size_t>(y.size());
  const bool with_inverse = family == Family::q_quadratic;
  auto rms_at = [&](double t) {
    return least_squares(q_design(k, q_of(t), with_inverse), y).rms;
  };

  // t = log(-log q) spreads q over (kQMargin, 1 - kQMargin) evenly in scale.
  const double t_lo = std::log(-std::log1p(-kQMargin));
  const double t_hi = std::log(-std::log(kQMargin));
  const double step = (t_hi - t_lo) / (kGridPoints - 1);
  int best = -1;
  double best_rms = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGridPoints; ++i) {
    const double r = rms_at(t_lo + step * i);
    if (r < best_rms) {
      best_rms = r;
      best = i;
    }
  }
  if (best < 0) throw Error(Errc::DegenerateFit, "no admissible q gives a full-rank design");

  double a = t_lo + step * std::max(best - 1, 0);
  double b = t_lo + step * std::min(best + 1, kGridPoints - 1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = rms_at(c);
  double fd = rms_at(d);
  for (int it = 0; it < kGoldenIterations && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = rms_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = rms_at(d);
    }
  }
  double t = fc <= fd ? c : d;
  if (std::min(fc, fd) > best_rms) t = t_lo + step * best;

  const double q = q_of(t);
  const LinearSolve s = least_squares(q_design(k, q, with_inverse), y);
  if (!s.ok) throw Error(Errc::DegenerateFit, "design matrix is rank-deficient");
  LatticeFit fit;
  fit.family = family;
  fit.q = q;
  fit.u0 = s.coef(0);
  fit.u1 = s.coef(1) / q;
  fit.u2 = with_inverse ? s.coef(2) * std::pow(q, static_cast<double>(k)) : 0.0;
  fit.residual = s.rms;
  fit.levels_used = k;
  return fit;
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::linear: return "linear";
    case Family::quadratic: return "quadratic";
    case Family::linear_q: return "linear-q";
    case Family::q_quadratic: return "q-quadratic";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  for (Family f : kAllFamilies) {
    std::string alt(to_string(f));
    std::replace(alt.begin(), alt.end(), '-', '_');
    if (name == to_string(f) || name == alt) return f;
  }
  return std::nullopt;
}

std::size_t parameter_count(Family family) noexcept {
  switch (family) {
    case Family::linear: return 2;
    case Family::quadratic: return 3;
    case Family::linear_q: return 3;
    case Family::q_quadratic: return 4;
  }
  return 0;
}

double LatticeFit::evaluate(double n) const {
  switch (family) {
    case Family::linear: return u0 + u1 * n;
    case Family::quadratic: return u0 + u1 * n + u2 * n * n;
    case Family::linear_q: return u0 + u1 * std::pow(*q, n);
    case Family::q_quadratic: return u0 + u1 * std::pow(*q, n) + u2 * std::pow(*q, -n);
  }
  return 0.0;
}

LatticeFit fit_lattice(std::span<const double> spectrum, Family family) {
  if (spectrum.size() < kMinLevels)
    throw Error(Errc::TooFewLevels, "lattice fit needs at least 4 levels", spectrum.size());
  Eigen::VectorXd y(static_cast<Eigen::Index>(spectrum.size()));
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (!std::isfinite(spectrum[i]))
      throw Error(Errc::DegenerateFit, "spectrum value is not finite", i + 1);
    if (i > 0 && !(spectrum[i] > spectrum[i - 1]))
      throw Error(Errc::DegenerateFit, "spectrum is not strictly increasing", i + 1);
    y(static_cast<Eigen::Index>(i)) = spectrum[i];
  }
  if (family == Family::linear || family == Family::quadratic) return fit_polynomial(y, family);
  return fit_q(y, family);
}

LatticeFit solvability_distance(std::span<const double> spectrum) {
  std::vector<LatticeFit> fits;
  for (Family f : kAllFamilies) fits.push_back(fit_lattice(spectrum, f));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : fits) best = std::min(best, f.residual);
  double scale = 1.0;
  for (double v : spectrum) scale = std::max(scale, std::abs(v));
  const double tie = std::max(2.0 * best, 1e-12 * scale);
  for (const auto& f : fits)
    if (f.residual <= tie) return f;
  return fits.front();
}

}  // namespace zeroflow

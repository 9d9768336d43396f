#include "zeroflow/classifier.hpp"

#include <cmath>
#include <sstream>

#include "zeroflow/error.hpp"

namespace zeroflow {

std::string to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::a: return "a";
    case CaseLabel::b: return "b";
    case CaseLabel::c: return "c";
    case CaseLabel::d: return "d";
    case CaseLabel::none: return "none";
  }
  return "none";
}

namespace {

const Rational kMinusHalf(-1, 2);
const Rational kMinusOne(-1);

void require_roots(const RecurrenceAsymptotics& asym, const char* where) {
  if (!asym.t1 || !asym.t2) {
    throw Error(Errc::MissingRoots,
                std::string(where) + " needs the characteristic roots t1, t2 of t^2 + a t + b = 0");
  }
}

}  // namespace

ClassReport classify(const RecurrenceAsymptotics& asym) {
  const Rational& alpha = asym.alpha;
  const Rational& beta = asym.beta;
  const double abs_a = std::fabs(asym.a);
  const double abs_b = std::fabs(asym.b);

  ClassReport report;
  std::ostringstream why;
  why << "alpha=" << alpha.to_string() << ", beta=" << beta.to_string() << ": ";

  if (alpha > kMinusHalf) {
    const Rational edge = alpha + kMinusHalf;
    if (beta < edge) {
      report.case_label = CaseLabel::a;
      why << "beta < alpha - 1/2";
    } else if (beta == edge) {
      if (abs_b < abs_a) {
        report.case_label = CaseLabel::b;
        why << "beta = alpha - 1/2 and |b| < |a|";
      } else {
        why << "beta = alpha - 1/2 but |b| >= |a|";
      }
    } else {
      why << "beta > alpha - 1/2";
    }
  } else if (alpha == kMinusHalf) {
    if (beta < kMinusOne) {
      if (abs_a >= 1.0) {
        report.case_label = CaseLabel::c;
        why << "alpha = -1/2, beta < -1 and |a| >= 1";
      } else {
        why << "alpha = -1/2, beta < -1 but |a| < 1";
      }
    } else if (beta == kMinusOne) {
      require_roots(asym, "alpha = -1/2, beta = -1");
      if (std::fabs(*asym.t1) >= 1.0 && std::fabs(*asym.t2) < 1.0) {
        report.case_label = CaseLabel::d;
        why << "alpha = -1/2, beta = -1, |t1| >= 1 and |t2| < 1";
      } else {
        why << "alpha = -1/2, beta = -1 but the roots fail |t1| >= 1 > |t2|";
      }
    } else {
      why << "alpha = -1/2 and beta > -1";
    }
  } else {
    why << "alpha < -1/2";
  }
  report.in_class = report.case_label != CaseLabel::none;
  if (!report.in_class) why << " (no alternative applies)";

  const Rational two_alpha = Rational(2) * alpha;
  if (two_alpha > beta) {
    report.dominant_excluded = alpha > kMinusHalf || (alpha == kMinusHalf && abs_a >= 1.0);
  } else if (two_alpha == beta) {
    if (alpha > kMinusHalf) {
      report.dominant_excluded = true;
    } else if (alpha == kMinusHalf) {
      require_roots(asym, "2 alpha = beta with alpha = -1/2");
      report.dominant_excluded = std::fabs(*asym.t1) >= 1.0;
    }
  }
  why << "; dominant solutions " << (report.dominant_excluded ? "excluded" : "not excluded");
  report.detail = why.str();
  return report;
}

RecurrenceAsymptotics with_characteristic_roots(RecurrenceAsymptotics asym) {
  const double a = asym.a;
  const double b = asym.b;
  const double disc = a * a - 4.0 * b;
  double r1 = 0.0;
  double r2 = 0.0;
  if (disc >= 0.0) {
    // stable form: q = -(a + sign(a) sqrt(disc)) / 2, roots q and b / q
    const double q = -0.5 * (a + std::copysign(std::sqrt(disc), a));
    r1 = std::fabs(q);
    r2 = q != 0.0 ? std::fabs(b / q) : 0.0;
  } else {
    r1 = r2 = std::sqrt(b);
  }
  if (r2 > r1) std::swap(r1, r2);
  asym.t1 = r1;
  asym.t2 = r2;
  return asym;
}

}  // namespace zeroflow

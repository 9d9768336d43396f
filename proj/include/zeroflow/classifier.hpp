#pragma once

#include <string>

#include "zeroflow/recurrence.hpp"

namespace zeroflow {

enum class CaseLabel { a, b, c, d, none };

std::string to_string(CaseLabel label);

/// Which Perron-Kreuser alternative (if any) places a recurrence in the
/// class with a minimal solution and discrete spectrum. Invariant:
/// in_class == (case_label != CaseLabel::none).
struct ClassReport {
  bool in_class = false;
  CaseLabel case_label = CaseLabel::none;
  /// Dominant solutions are not Bargmann-normalizable.
  bool dominant_excluded = false;
  std::string detail;
};

/// Pure and total on finite inputs. Throws Error(MissingRoots) when the
/// alpha = -1/2, beta = -1 branch is reached without t1 and t2.
///
/// The alternatives, with exact comparisons on alpha and beta:
///   (a) alpha > -1/2 and beta < alpha - 1/2
///   (b) alpha > -1/2 and beta = alpha - 1/2 and |b| < |a|
///   (c) alpha = -1/2 and |a| >= 1 and beta < -1
///   (d) alpha = -1/2 and beta = -1 and |t1| >= 1 and |t2| < 1
/// Dominant solutions are excluded when 2 alpha > beta and (alpha > -1/2 or
/// alpha = -1/2 with |a| >= 1), or 2 alpha = beta and (alpha > -1/2 or
/// alpha = -1/2 with |t1| >= 1).
ClassReport classify(const RecurrenceAsymptotics& asym);

/// Fills t1, t2 with the moduli of the roots of t^2 + a t + b = 0, ordered
/// so that |t2| <= |t1|. Complex pairs give equal moduli.
RecurrenceAsymptotics with_characteristic_roots(RecurrenceAsymptotics asym);

}  // namespace zeroflow

#include "zeroflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "zeroflow/error.hpp"

namespace zeroflow {

namespace {

double parity_sign(Parity p) { return p == Parity::plus ? 1.0 : -1.0; }

double alternating(std::size_t n) { return n % 2 == 0 ? 1.0 : -1.0; }

void validate(const RabiParams& p) {
  if (!std::isfinite(p.kappa) || !std::isfinite(p.delta)) {
    throw Error(Errc::KappaZero, "kappa and delta must be finite");
  }
  if (p.kappa == 0.0) throw Error(Errc::KappaZero, "kappa must be nonzero");
}

std::string describe(const RabiParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "rabi(kappa=" << p.kappa << ", delta=" << p.delta
     << ", parity=" << (p.parity == Parity::plus ? '+' : '-') << ")";
  return os.str();
}

}  // namespace

MonicRecurrence rabi_recurrence(const RabiParams& p) {
  validate(p);
  const double shift = parity_sign(p.parity) * p.delta;
  const double k2 = p.kappa * p.kappa;
  return MonicRecurrence(
      [shift](std::size_t n) { return static_cast<double>(n) + alternating(n) * shift; },
      [k2](std::size_t n) { return static_cast<double>(n) * k2; }, describe(p));
}

RawRecurrence rabi_raw(const RabiParams& p) {
  validate(p);
  const double shift = parity_sign(p.parity) * p.delta;
  const double kappa = p.kappa;
  RawRecurrence raw;
  raw.a = [shift, kappa](std::size_t n, double x) {
    const double nd = static_cast<double>(n);
    return (nd - x + alternating(n) * shift) / (kappa * (nd + 1.0));
  };
  raw.b = [](std::size_t n) { return 1.0 / (static_cast<double>(n) + 1.0); };
  raw.asymptotics.alpha = Rational(0);
  raw.asymptotics.beta = Rational(-1);
  raw.asymptotics.a = -1.0 / kappa;
  raw.asymptotics.b = 1.0;
  return raw;
}

MonicRecurrence displaced_recurrence(double kappa) {
  if (!std::isfinite(kappa) || kappa == 0.0) throw Error(Errc::KappaZero, "kappa must be nonzero");
  const double k2 = kappa * kappa;
  std::ostringstream os;
  os.precision(17);
  os << "displaced(kappa=" << kappa << ")";
  return MonicRecurrence([](std::size_t n) { return static_cast<double>(n); },
                         [k2](std::size_t n) { return static_cast<double>(n) * k2; }, os.str());
}

std::vector<double> displaced_oscillator_spectrum(double kappa, std::size_t n_levels) {
  std::vector<double> levels(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) levels[l] = static_cast<double>(l) - kappa * kappa;
  return levels;
}

MonicRecurrence TabulatedModel::recurrence() const {
  return MonicRecurrence::tabulated(c, lam, description.empty() ? "tabulated" : description);
}

std::size_t TabulatedModel::max_degree() const { return std::min(c.size(), lam.size() + 1); }

TabulatedModel parse_tabulated(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ParseError, "tabulated model must be a JSON object");

  TabulatedModel model;
  try {
    if (doc.contains("description")) model.description = doc.at("description").get<std::string>();
    model.c = doc.at("c").get<std::vector<double>>();
    model.lam = doc.at("lam").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("tabulated model schema: ") + e.what());
  }
  if (model.c.empty()) throw Error(Errc::ParseError, "\"c\" must not be empty");
  for (std::size_t i = 0; i < model.c.size(); ++i) {
    if (!std::isfinite(model.c[i])) throw Error(Errc::ParseError, "c[" + std::to_string(i) + "] is not finite");
  }
  for (std::size_t i = 0; i < model.lam.size(); ++i) {
    if (!(model.lam[i] > 0.0) || !std::isfinite(model.lam[i])) {
      throw Error(Errc::NonPositiveLambda,
                  "lam[" + std::to_string(i) + "] (lambda_" + std::to_string(i + 1) + ") must be positive",
                  i + 1);
    }
  }
  return model;
}

TabulatedModel load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tabulated(buf.str());
}

}  // namespace zeroflow

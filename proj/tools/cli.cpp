#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "zeroflow/classifier.hpp"
#include "zeroflow/error.hpp"
#include "zeroflow/flows.hpp"
#include "zeroflow/lattice_fit.hpp"
#include "zeroflow/measure.hpp"
#include "zeroflow/models.hpp"
#include "zeroflow/parallel.hpp"

namespace zeroflow::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// Raised for invalid user input; the message starts with the field name.
struct ConfigError {
  std::string message;
};

[[noreturn]] void reject(const std::string& field, const std::string& why) {
  throw ConfigError{field + ": " + why};
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

struct ModelOptions {
  std::string model = "rabi";
  double kappa = kUnset;
  double delta = 0.0;
  std::string parity = "+";
  std::string table;
};

struct ScheduleOptions {
  std::size_t levels = 10;
  double tol = 1e-10;
  std::size_t n_start = 0;
  double growth = kDefaultGrowth;
  std::size_t n_max = kDefaultNMax;
};

struct OutputOptions {
  std::string format = "csv";
  std::string out;
};

void add_model_options(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--model", m.model, "rabi, displaced or tabulated")
      ->check(CLI::IsMember({"rabi", "displaced", "tabulated"}))
      ->capture_default_str();
  cmd->add_option("--kappa", m.kappa, "coupling g/omega");
  cmd->add_option("--delta", m.delta, "qubit splitting mu/omega (rabi)")->capture_default_str();
  cmd->add_option("--parity", m.parity, "parity subspace, + or -")->capture_default_str();
  cmd->add_option("--table", m.table, "tabulated model JSON {description, c, lam}");
}

void add_schedule_options(CLI::App* cmd, ScheduleOptions& s, bool with_levels) {
  if (with_levels)
    cmd->add_option("--levels", s.levels, "number of levels")->capture_default_str();
  cmd->add_option("--tol", s.tol, "absolute convergence tolerance")->capture_default_str();
  cmd->add_option("--n-start", s.n_start, "first degree (default levels + 20)");
  cmd->add_option("--growth", s.growth, "schedule growth factor")->capture_default_str();
  cmd->add_option("--n-max", s.n_max, "largest degree")->capture_default_str();
}

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "write output here instead of stdout");
}

struct Model {
  std::unique_ptr<MonicRecurrence> rec;
  std::optional<RecurrenceAsymptotics> asymptotics;
  std::string descriptor;
};

Parity parse_parity(const std::string& text) {
  if (text == "+" || text == "plus") return Parity::plus;
  if (text == "-" || text == "minus") return Parity::minus;
  reject("parity", "expected + or -, got '" + text + "'");
}

Model build_model(const ModelOptions& m) {
  Model out;
  if (m.model == "rabi" || m.model == "displaced") {
    if (std::isnan(m.kappa)) reject("kappa", "required for model " + m.model);
    if (!std::isfinite(m.kappa) || m.kappa == 0.0) reject("kappa", "must be finite and nonzero");
    if (!std::isfinite(m.delta)) reject("delta", "must be finite");
    if (m.model == "rabi") {
      const RabiParams p{m.kappa, m.delta, parse_parity(m.parity)};
      out.rec = std::make_unique<MonicRecurrence>(rabi_recurrence(p));
      out.asymptotics = rabi_raw(p).asymptotics;
      out.descriptor = out.rec->description();
    } else {
      out.rec = std::make_unique<MonicRecurrence>(displaced_recurrence(m.kappa));
      out.asymptotics = rabi_raw({m.kappa, 0.0, Parity::plus}).asymptotics;
      out.descriptor = out.rec->description();
    }
    return out;
  }
  if (m.table.empty()) reject("table", "required for model tabulated");
  try {
    const TabulatedModel t = load_tabulated(m.table);
    out.rec = std::make_unique<MonicRecurrence>(t.recurrence());
    out.descriptor = t.description.empty() ? "tabulated:" + m.table : t.description;
  } catch (const Error& e) {
    reject("table", e.what());
  }
  return out;
}

Schedule build_schedule(const ScheduleOptions& s, std::size_t levels, const Model& model) {
  if (!(s.tol > 0.0) || !std::isfinite(s.tol)) reject("tol", "must be positive");
  if (!(s.growth > 1.0) || !std::isfinite(s.growth)) reject("growth", "must exceed 1");
  const auto cap = model.rec->max_degree();
  if (cap && levels > *cap)
    reject("levels", "table supports at most " + std::to_string(*cap) + " levels");
  std::size_t start = s.n_start == 0 ? levels + kDefaultStartMargin : s.n_start;
  std::size_t n_max = s.n_max;
  if (cap) {
    // a finite table caps the defaults rather than failing on them
    if (s.n_start == 0) start = std::min(start, *cap);
    if (start > *cap) reject("n-start", "table supports degrees up to " + std::to_string(*cap));
    n_max = std::min(n_max, *cap);
  }
  if (start < levels) reject("n-start", "must be at least the number of levels");
  if (n_max < start) reject("n-max", "must be at least n-start");
  return Schedule::geometric(start, s.growth, n_max);
}

void check_in_class(const Model& model) {
  if (!model.asymptotics) return;
  const ClassReport r = classify(with_characteristic_roots(*model.asymptotics));
  if (!r.in_class) reject("model", "recurrence is outside the solvable class: " + r.detail);
}

// Writes to --out when given, else to the caller's stream.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) reject("out", "cannot open '" + path + "' for writing");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

private:
  std::ofstream file_;
  std::ostream* os_;
};

int cmd_spectrum(const ModelOptions& mo, const ScheduleOptions& so, const OutputOptions& oo,
                 double omega, std::ostream& out) {
  if (so.levels == 0) reject("levels", "must be at least 1");
  if (!(omega > 0.0) || !std::isfinite(omega)) reject("omega", "must be positive");
  const Model model = build_model(mo);
  check_in_class(model);
  const Schedule schedule = build_schedule(so, so.levels, model);
  Sink sink(oo.out, out);

  const SpectrumResult r = run_flows(*model.rec, so.levels, so.tol, schedule, thread_budget());
  std::ostream& os = sink.stream();
  if (oo.format == "csv") {
    os << "l,xi,n_converged,last_decrement,converged\n";
    for (const auto& lv : r.levels) {
      os << lv.l << ',' << num(lv.xi * omega) << ',' << lv.n_converged << ','
         << num(lv.last_decrement * omega) << ',' << (lv.converged ? "true" : "false") << '\n';
    }
  } else {
    json doc;
    doc["model"] = model.descriptor;
    doc["tolerance"] = so.tol;
    doc["omega"] = omega;
    doc["n_final"] = r.n_final;
    doc["budget_exceeded"] = r.budget_exceeded;
    json levels = json::array();
    for (const auto& lv : r.levels) {
      levels.push_back({{"l", lv.l},
                        {"xi", lv.xi * omega},
                        {"n_converged", lv.n_converged},
                        {"last_decrement", num_json(lv.last_decrement * omega)},
                        {"converged", lv.converged}});
    }
    doc["levels"] = std::move(levels);
    os << doc.dump(2) << '\n';
  }
  return r.budget_exceeded ? kExitPartial : kExitOk;
}

int cmd_flow(const ModelOptions& mo, const ScheduleOptions& so, const OutputOptions& oo,
             std::size_t level, std::ostream& out) {
  if (level == 0) reject("level", "must be at least 1");
  const Model model = build_model(mo);
  check_in_class(model);
  const Schedule schedule = build_schedule(so, level, model);
  Sink sink(oo.out, out);

  const ZeroFlow f = flow_trace(*model.rec, level, schedule, so.tol, thread_budget());
  std::ostream& os = sink.stream();
  if (oo.format == "csv") {
    os << "n,x\n";
    for (const auto& [n, x] : f.history) os << n << ',' << num(x) << '\n';
  } else {
    json doc;
    doc["model"] = model.descriptor;
    doc["l"] = level;
    doc["tolerance"] = so.tol;
    doc["converged"] = f.converged;
    doc["xi"] = f.xi ? json(*f.xi) : json(nullptr);
    json history = json::array();
    for (const auto& [n, x] : f.history) history.push_back({{"n", n}, {"x", x}});
    doc["history"] = std::move(history);
    os << doc.dump(2) << '\n';
  }
  return f.converged ? kExitOk : kExitPartial;
}

struct CfOptions {
  double from = kUnset;
  double to = kUnset;
  double step = 1e-3;
  double bin = 1.0;
  std::size_t depth = 0;
};

int cmd_cf_compare(const ModelOptions& mo, const ScheduleOptions& so, const OutputOptions& oo,
                   const CfOptions& co, std::ostream& out) {
  if (!std::isfinite(co.from)) reject("from", "required");
  if (!std::isfinite(co.to)) reject("to", "required");
  if (!(co.step > 0.0) || !std::isfinite(co.step)) reject("step", "must be positive");
  if (!(co.bin > 0.0) || !std::isfinite(co.bin)) reject("bin", "must be positive");
  if (!(so.tol > 0.0)) reject("tol", "must be positive");
  const Model model = build_model(mo);
  check_in_class(model);
  Sink sink(oo.out, out);

  const CfComparison r =
      cf_compare(*model.rec, co.from, co.to, co.step, co.bin,
                 co.depth == 0 ? std::nullopt : std::optional<std::size_t>(co.depth), so.tol,
                 thread_budget());
  std::ostream& os = sink.stream();
  if (oo.format == "csv") {
    os << "bin_lo,bin_hi,cf_roots,zeroflow_levels\n";
    for (const auto& b : r.bins)
      os << num(b.lo) << ',' << num(b.hi) << ',' << b.cf_roots << ',' << b.levels << '\n';
  } else {
    json doc;
    doc["model"] = model.descriptor;
    doc["depth"] = r.depth;
    doc["step"] = co.step;
    doc["cf_total"] = r.cf_total;
    doc["zeroflow_total"] = r.level_total;
    json bins = json::array();
    for (const auto& b : r.bins) {
      bins.push_back({{"bin_lo", b.lo},
                      {"bin_hi", b.hi},
                      {"cf_roots", b.cf_roots},
                      {"zeroflow_levels", b.levels}});
    }
    doc["bins"] = std::move(bins);
    os << doc.dump(2) << '\n';
  }
  return r.levels_converged ? kExitOk : kExitPartial;
}

struct ClassifyOptions {
  std::string alpha;
  std::string beta;
  double a = kUnset;
  double b = kUnset;
  double t1 = kUnset;
  double t2 = kUnset;
  bool roots = false;
};

json report_json(const ClassReport& r) {
  return {{"in_class", r.in_class},
          {"case", to_string(r.case_label)},
          {"dominant_excluded", r.dominant_excluded},
          {"detail", r.detail}};
}

int cmd_classify(const ClassifyOptions& co, const ModelOptions& mo, bool model_given,
                 const OutputOptions& oo, std::ostream& out) {
  RecurrenceAsymptotics asym;
  if (model_given) {
    const Model model = build_model(mo);
    if (!model.asymptotics) reject("model", "tabulated models carry no asymptotics");
    asym = with_characteristic_roots(*model.asymptotics);
  } else {
    if (co.alpha.empty()) reject("alpha", "required (or pass --model)");
    if (co.beta.empty()) reject("beta", "required (or pass --model)");
    try {
      asym.alpha = Rational::parse(co.alpha);
    } catch (const Error& e) {
      reject("alpha", e.what());
    }
    try {
      asym.beta = Rational::parse(co.beta);
    } catch (const Error& e) {
      reject("beta", e.what());
    }
    if (!std::isfinite(co.a)) reject("a", "required and finite");
    if (!std::isfinite(co.b)) reject("b", "required and finite");
    asym.a = co.a;
    asym.b = co.b;
    if (std::isnan(co.t1) != std::isnan(co.t2)) reject("t1", "t1 and t2 go together");
    if (!std::isnan(co.t1)) {
      asym.t1 = co.t1;
      asym.t2 = co.t2;
    } else if (co.roots) {
      asym = with_characteristic_roots(asym);
    }
  }
  ClassReport r;
  try {
    r = classify(asym);
  } catch (const Error& e) {
    if (e.code() == Errc::MissingRoots) reject("t1", e.what());
    throw;
  }
  Sink sink(oo.out, out);
  sink.stream() << report_json(r).dump(2) << '\n';
  return kExitOk;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

// Reads levels from spectrum output: CSV with an `xi` column (or a single
// numeric column), or JSON with levels[].xi or a bare array.
std::vector<double> read_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) reject("input", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<double> values;
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      const json doc = json::parse(text);
      const json& arr = doc.is_array() ? doc : doc.at("levels");
      for (const auto& v : arr) values.push_back(v.is_number() ? v.get<double>() : v.at("xi").get<double>());
    } catch (const json::exception& e) {
      reject("input", std::string("bad JSON: ") + e.what());
    }
    return values;
  }
  std::stringstream lines(text);
  std::string line;
  std::optional<std::size_t> column;
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (!column) {
      const auto it = std::find(cells.begin(), cells.end(), "xi");
      if (it != cells.end()) {
        column = static_cast<std::size_t>(it - cells.begin());
        continue;
      }
      column = 0;
      if (!to_number(cells[0])) continue;
    }
    if (*column >= cells.size()) reject("input", "row " + std::to_string(row) + " is short");
    const auto v = to_number(cells[*column]);
    if (!v) reject("input", "row " + std::to_string(row) + " is not numeric");
    values.push_back(*v);
  }
  return values;
}

json fit_json(const LatticeFit& f) {
  return {{"family", to_string(f.family)},
          {"u0", f.u0},
          {"u1", f.u1},
          {"u2", f.u2},
          {"q", f.q ? json(*f.q) : json(nullptr)},
          {"residual", f.residual},
          {"levels_used", f.levels_used}};
}

int cmd_classify_spectrum(const std::string& input, const std::string& family_name,
                          const OutputOptions& oo, std::ostream& out) {
  if (input.empty()) reject("input", "spectrum file required");
  std::optional<Family> family;
  if (!family_name.empty()) {
    family = parse_family(family_name);
    if (!family) reject("family", "unknown family '" + family_name + "'");
  }
  const std::vector<double> spectrum = read_spectrum(input);
  LatticeFit fit;
  try {
    fit = family ? fit_lattice(spectrum, *family) : solvability_distance(spectrum);
  } catch (const Error& e) {
    if (e.code() == Errc::TooFewLevels || e.code() == Errc::DegenerateFit)
      reject("input", e.what());
    throw;
  }
  Sink sink(oo.out, out);
  sink.stream() << fit_json(fit).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ZEROFLOW_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

CfComparison cf_compare(const MonicRecurrence& rec, double from, double to, double step,
                        double bin, std::optional<std::size_t> depth, double tol,
                        unsigned threads) {
  CfComparison out;
  if (!(to > from)) return out;

  const auto cap = rec.max_degree();
  auto clip = [&](std::size_t n) { return cap ? std::min(n, *cap) : n; };

  // Levels below `to`: Sturm counts at `to` grow with n and settle once every
  // flow that ends below `to` has crossed it.
  std::size_t n = clip(64);
  std::size_t below = count_zeros_below(rec, to, n);
  while (true) {
    const std::size_t next_n = clip(std::max(2 * n, 2 * below + 64));
    if (next_n == n) break;
    const std::size_t next = count_zeros_below(rec, to, next_n);
    n = next_n;
    if (next == below) break;
    below = next;
  }

  std::vector<double> levels;
  std::size_t flow_degree = 0;
  if (below > 0) {
    const SpectrumResult r =
        run_flows(rec, below, tol, default_schedule(below, clip(kDefaultNMax)), threads);
    out.levels_converged = !r.budget_exceeded;
    flow_degree = r.n_final;
    for (const auto& lv : r.levels) levels.push_back(lv.xi);
  }
  out.depth = clip(depth.value_or(std::max<std::size_t>(64, flow_degree)));
  const CoefficientTable table = rec.table(out.depth);

  const auto points = static_cast<std::size_t>(std::floor((to - from) / step)) + 1;
  std::vector<double> f(points);
  std::vector<char> valid(points, 1);
  detail::parallel_for(points, threads, [&](std::size_t i) {
    try {
      f[i] = eval_F(table, from + step * static_cast<double>(i), out.depth);
      if (!std::isfinite(f[i])) valid[i] = 0;
    } catch (const Error&) {
      valid[i] = 0;
    }
  });

  const auto bins = static_cast<std::size_t>(std::ceil((to - from) / bin));
  out.bins.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.bins[k].lo = from + bin * static_cast<double>(k);
    out.bins[k].hi = std::min(to, from + bin * static_cast<double>(k + 1));
  }
  auto bin_of = [&](double x) {
    const auto k = static_cast<std::size_t>(std::max(0.0, std::floor((x - from) / bin)));
    return std::min(k, bins - 1);
  };

  int last_sign = 0;
  for (std::size_t i = 0; i < points; ++i) {
    if (!valid[i] || f[i] == 0.0) continue;
    const int sign = f[i] > 0.0 ? 1 : -1;
    if (last_sign > 0 && sign < 0) {
      ++out.bins[bin_of(from + step * static_cast<double>(i))].cf_roots;
      ++out.cf_total;
    }
    last_sign = sign;
  }
  for (double xi : levels) {
    if (xi < from || xi > to) continue;
    ++out.bins[bin_of(xi)].levels;
    ++out.level_total;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point spectra of three-term recurrences from flows of polynomial zeros."};
  app.name("zeroflow");
  app.require_subcommand(1);

  ModelOptions model;
  ScheduleOptions sched;
  OutputOptions output;
  double omega = 1.0;
  std::size_t level = 1;
  CfOptions cf;
  ClassifyOptions cls;
  std::string input;
  std::string family;

  auto* spectrum = app.add_subcommand(
      "spectrum", "Converged levels. CSV columns: l,xi,n_converged,last_decrement,converged");
  add_model_options(spectrum, model);
  add_schedule_options(spectrum, sched, true);
  add_output_options(spectrum, output);
  spectrum->add_option("--omega", omega, "multiply energies by this field frequency")
      ->capture_default_str();

  auto* flow = app.add_subcommand("flow", "History of one zero flow. CSV columns: n,x");
  add_model_options(flow, model);
  add_schedule_options(flow, sched, false);
  add_output_options(flow, output);
  flow->add_option("--level", level, "flow index l (1-based)")->capture_default_str();

  auto* cfc = app.add_subcommand(
      "cf-compare",
      "Roots of the continued fraction found by a sign scan versus zero-flow levels. "
      "CSV columns: bin_lo,bin_hi,cf_roots,zeroflow_levels");
  add_model_options(cfc, model);
  add_output_options(cfc, output);
  cfc->add_option("--tol", sched.tol, "zero-flow tolerance")->capture_default_str();
  cfc->add_option("--from", cf.from, "scan start");
  cfc->add_option("--to", cf.to, "scan end");
  cfc->add_option("--step", cf.step, "scan step")->capture_default_str();
  cfc->add_option("--bin", cf.bin, "bin width")->capture_default_str();
  cfc->add_option("--depth", cf.depth, "continued fraction depth (default from the flows)");

  auto* classify_cmd = app.add_subcommand(
      "classify", "Classify asymptotics a_n ~ a n^alpha, b_n ~ b n^beta (JSON report)");
  add_model_options(classify_cmd, model);
  classify_cmd->add_option("--alpha", cls.alpha, "exponent of a_n, rational such as -1/2");
  classify_cmd->add_option("--beta", cls.beta, "exponent of b_n, rational");
  classify_cmd->add_option("--a", cls.a, "prefactor of a_n");
  classify_cmd->add_option("--b", cls.b, "prefactor of b_n");
  classify_cmd->add_option("--t1", cls.t1, "larger characteristic root modulus");
  classify_cmd->add_option("--t2", cls.t2, "smaller characteristic root modulus");
  classify_cmd->add_flag("--roots", cls.roots, "derive t1, t2 from a and b");
  classify_cmd->add_option("--out", output.out, "write output here instead of stdout");

  auto* classify_spectrum_cmd = app.add_subcommand(
      "classify-spectrum", "Fit a spectrum (CSV or JSON) to the exactly solvable lattices");
  classify_spectrum_cmd->add_option("input", input, "spectrum file")->required();
  classify_spectrum_cmd->add_option("--family", family,
                            "linear, quadratic, linear-q or q-quadratic (default: best)");
  classify_spectrum_cmd->add_option("--out", output.out, "write output here instead of stdout");

  std::vector<const char*> argv{"zeroflow"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*spectrum) return cmd_spectrum(model, sched, output, omega, out);
    if (*flow) return cmd_flow(model, sched, output, level, out);
    if (*cfc) return cmd_cf_compare(model, sched, output, cf, out);
    if (*classify_cmd)
      return cmd_classify(cls, model, classify_cmd->count("--model") > 0, output, out);
    if (*classify_spectrum_cmd) return cmd_classify_spectrum(input, family, output, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.message << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace zeroflow::cli

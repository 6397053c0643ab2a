#include "cspde/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cspde {

namespace {

enum class Type { Real, Int, Bool, Text, Reals, Words };
enum class Bound { None, Positive, NonNegative };

struct Param {
  std::string key;
  Type type;
  std::string fallback;
  Bound bound;
  std::string help;
};

const std::vector<Param> kQuadParams = {
    {"nodes_per_panel", Type::Int, "16", Bound::Positive, "Gauss-Legendre nodes per time panel"},
    {"panels", Type::Int, "6", Bound::Positive, "geometric panels in the time quadrature"},
    {"panel_ratio", Type::Real, "0.25", Bound::Positive, "ratio between consecutive panel ends"},
    {"decay_span", Type::Real, "36", Bound::Positive, "T_max = decay_span / lambda"},
};

std::vector<Param> with_quad(std::vector<Param> p) {
  p.insert(p.end(), kQuadParams.begin(), kQuadParams.end());
  return p;
}

const std::map<std::string, std::vector<Param>>& schemas() {
  static const std::map<std::string, std::vector<Param>> s = {
      {"simulate",
       {{"moment_p", Type::Real, "2", Bound::Positive, "exponent p of E|X_t|^p"},
        {"write_path", Type::Bool, "true", Bound::None, "write the first trajectory to path.csv"},
        {"variance_check", Type::Bool, "false", Bound::None,
         "compare per-mode variances with the exact convolution variances (zero drift)"},
        {"check_times", Type::Reals, "", Bound::Positive, "times for the variance check (default: all)"}}},
      {"ou-eval",
       {{"functions", Type::Words, "cos, sin, gaussian, sin_cos, clipped_linear", Bound::None,
         "test functions on mode 1 (sin_cos uses modes 1, 2)"},
        {"times", Type::Reals, "0.1, 1", Bound::Positive, "evaluation times t"},
        {"z_scales", Type::Reals, "0, 1", Bound::None, "shifts z = scale * e_1"},
        {"probes", Type::Int, "10", Bound::Positive, "random (x, h) pairs"},
        {"probe_scale", Type::Real, "0.5", Bound::Positive, "standard deviation of random x entries"},
        {"eps", Type::Real, "0.001", Bound::Positive, "central difference step"},
        {"abs_tol", Type::Real, "0.0001", Bound::NonNegative, "absolute slack added to 3 SE"}}},
      {"resolvent",
       with_quad({{"functions", Type::Words, "gaussian, cos, sin_cos", Bound::None, "test functions"},
                  {"lambdas", Type::Reals, "2, 8", Bound::Positive, "resolvent parameters"},
                  {"z_scales", Type::Reals, "0, 1", Bound::None, "shifts z = scale * e_1"},
                  {"x", Type::Reals, "0.3, -0.2", Bound::None, "evaluation point (padded with zeros)"}})},
      {"verify-bounds",
       {{"t_min", Type::Real, "0.0001", Bound::Positive, "smallest time"},
        {"t_max", Type::Real, "10", Bound::Positive, "largest time"},
        {"points", Type::Int, "40", Bound::Positive, "log-spaced time points"}}},
      {"verify-regularity",
       with_quad({{"theta", Type::Real, "0.5", Bound::Positive, "Holder exponent of the kink family"},
                  {"lambdas", Type::Reals, "1, 4, 16, 64", Bound::Positive, "resolvent parameters"},
                  {"family_modes", Type::Int, "8", Bound::Positive, "kinks on modes 1..family_modes"},
                  {"random_probes", Type::Int, "0", Bound::NonNegative, "random x probes besides x = 0"},
                  {"probe_scale", Type::Real, "0.5", Bound::Positive, "standard deviation of random probes"},
                  {"max_ratio", Type::Real, "3", Bound::Positive, "allowed spread of the scaled column"}})},
      {"contraction",
       with_quad({{"function", Type::Text, "kink", Bound::None, "test function g"},
                  {"function_mode", Type::Int, "1", Bound::Positive, "mode of g"},
                  {"theta", Type::Real, "0.5", Bound::Positive, "Holder exponent"},
                  {"lambdas", Type::Reals, "4, 16, 64", Bound::Positive, "resolvent parameters"},
                  {"probes", Type::Int, "8", Bound::Positive, "probe points from the invariant measure"}})},
      {"martingale-check",
       {{"s_time", Type::Real, "0.5", Bound::NonNegative, "time s"},
        {"t_time", Type::Real, "1", Bound::Positive, "time t"},
        {"marker_time", Type::Real, "0.25", Bound::NonNegative, "marker time s_1 <= s"},
        {"bias_factor", Type::Real, "5", Bound::NonNegative, "bias budget in units of solver.dt"},
        {"qv_modes", Type::Reals, "1, 2", Bound::Positive, "modes for quadratic variation tests"}}},
      {"uniqueness",
       {{"mode", Type::Text, "calibration", Bound::None, "closure | calibration | burgers"},
        {"control", Type::Text, "none", Bound::None, "none | sign_flip"},
        {"meta_reps", Type::Int, "200", Bound::Positive, "independent repetitions"},
        {"functional_mode", Type::Int, "1", Bound::Positive, "compared functional x -> x_k at T"},
        {"functions", Type::Words, "cos, gaussian, sin_cos", Bound::None, "closure test functions"},
        {"shuffles", Type::Int, "2000", Bound::Positive, "permutations per test"},
        {"alpha", Type::Real, "0.01", Bound::Positive, "test level"},
        {"max_reject_rate", Type::Real, "0.02", Bound::NonNegative, "allowed rejection rate"},
        {"ou_samples", Type::Int, "100000", Bound::Positive, "samples for the closure reference"}}},
      {"exp-moment",
       {{"horizons", Type::Reals, "0.025, 0.05, 0.1", Bound::Positive, "horizons T on the saved grid"}}},
  };
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

double to_real(const std::string& v, const std::string& where) {
  const std::string t = trim(v);
  if (t.empty()) fail(where, "expected a number");
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) fail(where, "expected a number, got '" + t + "'");
  if (std::isnan(d)) fail(where, "NaN is not allowed");
  return d;
}

std::int64_t to_int(const std::string& v, const std::string& where) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    fail(where, "expected an integer, got '" + t + "'");
  return i;
}

std::uint64_t to_uint(const std::string& v, const std::string& where) {
  const std::string t = trim(v);
  if (t.empty() || t[0] == '-') fail(where, "expected a non-negative integer, got '" + t + "'");
  char* end = nullptr;
  errno = 0;
  const unsigned long long i = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    fail(where, "expected a non-negative integer, got '" + t + "'");
  return i;
}

std::size_t to_count(const std::string& v, const std::string& where) {
  const std::int64_t i = to_int(v, where);
  if (i < 1) fail(where, "must be >= 1");
  return static_cast<std::size_t>(i);
}

bool to_bool(const std::string& v, const std::string& where) {
  const std::string t = trim(v);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  fail(where, "expected true or false, got '" + t + "'");
}

std::vector<std::string> split(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_reals(const std::string& v, const std::string& where) {
  std::vector<double> out;
  for (const auto& item : split(v)) out.push_back(to_real(item, where));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

void check_bound(double v, Bound b, const std::string& where) {
  if (b == Bound::Positive && !(v > 0.0)) fail(where, "must be > 0");
  if (b == Bound::NonNegative && !(v >= 0.0)) fail(where, "must be >= 0");
}

// Validates one [experiment] value and returns its canonical text.
std::string canonical(const Param& p, const std::string& raw, const std::string& where) {
  switch (p.type) {
    case Type::Real: {
      const double v = to_real(raw, where);
      check_bound(v, p.bound, where);
      return fmt(v);
    }
    case Type::Int: {
      const std::int64_t v = to_int(raw, where);
      check_bound(static_cast<double>(v), p.bound, where);
      return std::to_string(v);
    }
    case Type::Bool: return to_bool(raw, where) ? "true" : "false";
    case Type::Text: {
      const std::string t = trim(raw);
      if (t.empty()) fail(where, "must not be empty");
      return t;
    }
    case Type::Reals: {
      const auto v = to_reals(raw, where);
      for (double x : v) check_bound(x, p.bound, where);
      return join(v);
    }
    case Type::Words: return join(split(raw));
  }
  return raw;
}

Model model_from(const std::string& v, const std::string& where) {
  if (v == "burgers1d") return Model::Burgers1D;
  if (v == "cahn_hilliard3d") return Model::CahnHilliard3D;
  fail(where, "expected burgers1d or cahn_hilliard3d, got '" + v + "'");
}

std::string model_name(Model m) { return m == Model::Burgers1D ? "burgers1d" : "cahn_hilliard3d"; }

NoiseRule noise_from(const std::string& v, const std::string& where) {
  if (v == "cylindrical") return NoiseRule::Cylindrical;
  if (v == "inverse_square") return NoiseRule::InverseSquare;
  fail(where, "expected cylindrical or inverse_square, got '" + v + "'");
}

std::string noise_name(NoiseRule r) { return r == NoiseRule::Cylindrical ? "cylindrical" : "inverse_square"; }

const std::set<std::string> kDriftKinds = {"zero",     "constant",          "burgers",
                                           "cahn_hilliard", "nonlocal", "classical_burgers",
                                           "classical_burgers_nonlocal"};

const std::set<std::string> kFunctionNames = {"zero",          "constant",     "identity", "signed_power",
                                              "clipped_power", "clipped_sqrt", "square",   "tanh",
                                              "table"};

const Param* find_param(const std::string& experiment, const std::string& key) {
  const auto it = schemas().find(experiment);
  if (it == schemas().end()) return nullptr;
  for (const Param& p : it->second)
    if (p.key == key) return &p;
  return nullptr;
}

void validate(const ExperimentConfig& c) {
  if (c.model.m == 0) fail("model.m", "must be >= 1");
  if (c.model.grid != 0 && c.model.grid < min_grid_points(c.model.model, c.model.m))
    fail("model.grid", "must be >= " + std::to_string(min_grid_points(c.model.model, c.model.m)) +
                           " for m = " + std::to_string(c.model.m));
  if (!kDriftKinds.count(c.drift.kind)) fail("drift.kind", "unknown drift '" + c.drift.kind + "'");
  if (!kFunctionNames.count(c.drift.function))
    fail("drift.function", "unknown function '" + c.drift.function + "'");
  if (c.drift.function == "table" &&
      (c.drift.table_x.size() < 2 || c.drift.table_x.size() != c.drift.table_y.size()))
    fail("drift.table_x", "table needs matching table_x/table_y with at least two points");
  if (c.drift.z.size() > c.model.m) fail("drift.z", "more entries than model.m");
  if (c.drift.truncate && !(*c.drift.truncate > 0.0)) fail("drift.truncate", "must be > 0");
  if ((c.drift.kind == "burgers" || c.drift.kind == "classical_burgers" ||
       c.drift.kind == "classical_burgers_nonlocal") &&
      c.model.model != Model::Burgers1D)
    fail("drift.kind", c.drift.kind + " requires model.model = burgers1d");
  if (c.drift.kind == "cahn_hilliard" && c.model.model != Model::CahnHilliard3D)
    fail("drift.kind", "cahn_hilliard requires model.model = cahn_hilliard3d");
  if (c.solver.x0.size() > c.model.m) fail("solver.x0", "more entries than model.m");
  build_solver(c).validate();
  if (c.mc.N == 0) fail("mc.N", "must be >= 1");
  if (c.output.precision < 1 || c.output.precision > 17) fail("output.precision", "must be in [1, 17]");
  if (c.experiment.empty()) fail("experiment.type", "missing");
  if (!schemas().count(c.experiment)) fail("experiment.type", "unknown experiment '" + c.experiment + "'");
  // Experiment-specific ranges.
  auto words_in = [&](const std::string& key, const std::set<std::string>& allowed) {
    for (const auto& w : c.words(key))
      if (!allowed.count(w)) fail("experiment." + key, "unknown value '" + w + "'");
  };
  const std::set<std::string> functions = {"constant", "linear", "square", "cos", "sin",
                                           "clipped_linear", "kink", "gaussian", "sin_cos"};
  if (c.experiment == "uniqueness") {
    words_in("mode", {"closure", "calibration", "burgers"});
    words_in("control", {"none", "sign_flip"});
    words_in("functions", functions);
    if (!(c.real("alpha") < 1.0)) fail("experiment.alpha", "must be < 1");
  }
  if (c.experiment == "ou-eval" || c.experiment == "resolvent") words_in("functions", functions);
  if (c.experiment == "contraction") words_in("function", functions);
  if (c.experiment == "verify-bounds" && !(c.real("t_min") < c.real("t_max")))
    fail("experiment.t_max", "must exceed experiment.t_min");
  if (c.experiment == "verify-regularity" && !(c.real("theta") <= 1.0))
    fail("experiment.theta", "must be <= 1");
  if (c.experiment == "martingale-check" &&
      !(c.real("marker_time") <= c.real("s_time") && c.real("s_time") < c.real("t_time")))
    fail("experiment.s_time", "need marker_time <= s_time < t_time");
}

}  // namespace

double ExperimentConfig::real(const std::string& key) const { return to_real(text(key), "experiment." + key); }
std::int64_t ExperimentConfig::integer(const std::string& key) const { return to_int(text(key), "experiment." + key); }
bool ExperimentConfig::flag(const std::string& key) const { return to_bool(text(key), "experiment." + key); }

const std::string& ExperimentConfig::text(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument("experiment." + key + ": not defined for " + experiment);
  return it->second;
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
  return to_reals(text(key), "experiment." + key);
}

std::vector<std::string> ExperimentConfig::words(const std::string& key) const { return split(text(key)); }

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : schemas()) n.push_back(k);
    return n;
  }();
  return names;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::map<std::string, std::string> raw_params;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("line " + std::to_string(lineno), "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections = {"model", "drift", "solver", "mc", "experiment", "output"};
      if (!sections.count(section)) fail("line " + std::to_string(lineno), "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno), "expected key = value");
    if (section.empty()) fail("line " + std::to_string(lineno), "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where = section + "." + key;
    if (!seen.insert(where).second) fail(where, "duplicate key");

    if (section == "model") {
      if (key == "model") c.model.model = model_from(value, where);
      else if (key == "m") c.model.m = to_count(value, where);
      else if (key == "grid") {
        const std::int64_t g = to_int(value, where);
        if (g < 0) fail(where, "must be >= 0");
        c.model.grid = static_cast<std::size_t>(g);
      } else if (key == "noise") c.model.noise = noise_from(value, where);
      else fail(where, "unknown key");
    } else if (section == "drift") {
      if (key == "kind") c.drift.kind = value;
      else if (key == "function") c.drift.function = value;
      else if (key == "amplitude") c.drift.amplitude = to_real(value, where);
      else if (key == "exponent") c.drift.exponent = to_real(value, where);
      else if (key == "table_x") c.drift.table_x = to_reals(value, where);
      else if (key == "table_y") c.drift.table_y = to_reals(value, where);
      else if (key == "z") c.drift.z = to_reals(value, where);
      else if (key == "truncate") {
        if (value == "none" || value.empty()) c.drift.truncate.reset();
        else c.drift.truncate = to_real(value, where);
      } else fail(where, "unknown key");
    } else if (section == "solver") {
      if (key == "dt") c.solver.dt = to_real(value, where);
      else if (key == "T") c.solver.T = to_real(value, where);
      else if (key == "save_stride") c.solver.save_stride = to_count(value, where);
      else if (key == "stop_radius") {
        if (value == "none" || value.empty()) c.solver.stop_radius.reset();
        else c.solver.stop_radius = to_real(value, where);
      } else if (key == "record_noise") c.solver.record_noise = to_bool(value, where);
      else if (key == "x0") c.solver.x0 = to_reals(value, where);
      else fail(where, "unknown key");
    } else if (section == "mc") {
      if (key == "N") c.mc.N = to_count(value, where);
      else if (key == "seed") c.mc.seed = to_uint(value, where);
      else fail(where, "unknown key");
    } else if (section == "output") {
      if (key == "dir") {
        if (value.empty()) fail(where, "must not be empty");
        c.output.dir = value;
      } else if (key == "precision") c.output.precision = static_cast<int>(to_int(value, where));
      else fail(where, "unknown key");
    } else if (section == "experiment") {
      if (key == "type") c.experiment = value;
      else raw_params[key] = value;
    }
  }
  if (c.experiment.empty()) fail("experiment.type", "missing");
  const auto sch = schemas().find(c.experiment);
  if (sch == schemas().end()) fail("experiment.type", "unknown experiment '" + c.experiment + "'");
  for (const auto& [key, value] : raw_params) {
    const Param* p = find_param(c.experiment, key);
    if (!p) fail("experiment." + key, "unknown key for experiment " + c.experiment);
    c.params[key] = canonical(*p, value, "experiment." + key);
  }
  for (const Param& p : sch->second)
    if (!c.params.count(p.key)) c.params[p.key] = canonical(p, p.fallback, "experiment." + p.key);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[model]\n"
    << "model = " << model_name(c.model.model) << "\n"
    << "m = " << c.model.m << "\n"
    << "grid = " << c.model.grid << "\n"
    << "noise = " << noise_name(c.model.noise) << "\n\n";
  o << "[drift]\n"
    << "kind = " << c.drift.kind << "\n"
    << "function = " << c.drift.function << "\n"
    << "amplitude = " << fmt(c.drift.amplitude) << "\n"
    << "exponent = " << fmt(c.drift.exponent) << "\n"
    << "table_x = " << join(c.drift.table_x) << "\n"
    << "table_y = " << join(c.drift.table_y) << "\n"
    << "z = " << join(c.drift.z) << "\n"
    << "truncate = " << (c.drift.truncate ? fmt(*c.drift.truncate) : "none") << "\n\n";
  o << "[solver]\n"
    << "dt = " << fmt(c.solver.dt) << "\n"
    << "T = " << fmt(c.solver.T) << "\n"
    << "save_stride = " << c.solver.save_stride << "\n"
    << "stop_radius = " << (c.solver.stop_radius ? fmt(*c.solver.stop_radius) : "none") << "\n"
    << "record_noise = " << (c.solver.record_noise ? "true" : "false") << "\n"
    << "x0 = " << join(c.solver.x0) << "\n\n";
  o << "[mc]\n"
    << "N = " << c.mc.N << "\n"
    << "seed = " << c.mc.seed << "\n\n";
  o << "[experiment]\n"
    << "type = " << c.experiment << "\n";
  for (const auto& [k, v] : c.params) o << k << " = " << v << "\n";
  o << "\n[output]\n"
    << "dir = " << c.output.dir << "\n"
    << "precision = " << c.output.precision << "\n";
  return o.str();
}

std::string config_reference() {
  std::ostringstream o;
  o << "Config file: flat [section] blocks of `key = value` lines, `#` starts a comment.\n\n"
    << "[model]   model = burgers1d | cahn_hilliard3d (burgers1d); m = mode count (16);\n"
    << "          grid = points per dimension, 0 = smallest admissible (0);\n"
    << "          noise = cylindrical | inverse_square (cylindrical)\n"
    << "[drift]   kind = zero | constant | burgers | cahn_hilliard | nonlocal | classical_burgers |\n"
    << "          classical_burgers_nonlocal (zero); function = identity | signed_power | clipped_power |\n"
    << "          clipped_sqrt | square | tanh | constant | zero | table (identity); amplitude (1);\n"
    << "          exponent (1); table_x, table_y; z = constant drift coefficients; truncate = radius | none\n"
    << "[solver]  dt (0.001); T (1); save_stride (1); stop_radius = radius | none; record_noise (false);\n"
    << "          x0 = initial coefficients (zeros)\n"
    << "[mc]      N = samples or paths (1000); seed (1)\n"
    << "[output]  dir (out); precision = significant digits in CSV (17)\n"
    << "[experiment] type = one of the subcommands, plus:\n";
  for (const auto& [name, params] : schemas()) {
    o << "  " << name << "\n";
    for (const Param& p : params)
      o << "    " << p.key << " = " << p.help << " (" << (p.fallback.empty() ? "empty" : p.fallback) << ")\n";
  }
  return o.str();
}

Spectrum build_spectrum(const ExperimentConfig& c) {
  const std::size_t grid = c.model.grid != 0 ? c.model.grid : min_grid_points(c.model.model, c.model.m);
  return make_spectrum(c.model.model, c.model.m, grid, c.model.noise);
}

State padded_state(const std::vector<double>& values, std::size_t m, const char* key) {
  if (values.size() > m) throw std::invalid_argument(std::string(key) + ": more entries than model.m");
  State x(m);
  std::copy(values.begin(), values.end(), x.coeffs.begin());
  return x;
}

DriftSpec build_drift(const ExperimentConfig& c, const Spectrum& s) {
  const DriftBlock& d = c.drift;
  ScalarFunction fn = d.function == "table" ? ScalarFunction::table(d.table_x, d.table_y)
                                            : ScalarFunction::from_name(d.function, d.amplitude, d.exponent);
  DriftSpec F;
  if (d.kind == "zero") F = DriftSpec::zero();
  else if (d.kind == "constant") F = DriftSpec::constant(padded_state(d.z, s.modes(), "drift.z"));
  else if (d.kind == "burgers") F = DriftSpec::burgers(fn);
  else if (d.kind == "cahn_hilliard") F = DriftSpec::cahn_hilliard(fn);
  else if (d.kind == "nonlocal") F = DriftSpec::nonlocal(fn);
  else if (d.kind == "classical_burgers") F = DriftSpec::classical_burgers();
  else if (d.kind == "classical_burgers_nonlocal")
    F = DriftSpec::sum(DriftSpec::classical_burgers(), DriftSpec::smoothed(DriftSpec::nonlocal(fn)));
  else throw std::invalid_argument("drift.kind: unknown drift '" + d.kind + "'");
  if (d.truncate) F = DriftSpec::truncated(F, *d.truncate);
  return F;
}

SolverConfig build_solver(const ExperimentConfig& c) {
  SolverConfig s;
  s.dt = c.solver.dt;
  s.horizon = c.solver.T;
  s.save_stride = c.solver.save_stride;
  s.stop_radius = c.solver.stop_radius;
  s.record_noise = c.solver.record_noise;
  return s;
}

}  // namespace cspde

#include "nlfb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "nlfb/error.hpp"

namespace nlfb {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, "`" + path + "` " + what);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string unquote(const std::string& s, const std::string& where) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') invalid(where, "has an unterminated string");
  const std::string body = s.substr(1, s.size() - 2);
  if (body.find('"') != std::string::npos) invalid(where, "has a stray quote");
  return body;
}

// Right-hand side. bare_words allows unquoted strings (command-line overrides).
ConfigValue parse_value(const std::string& raw, const std::string& where, bool bare_words) {
  const std::string s = trim(raw);
  if (s.empty()) invalid(where, "has no value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') return unquote(s, where);
  if (s.front() == '[') {
    if (s.back() != ']') invalid(where, "has an unterminated array");
    std::vector<double> out;
    std::stringstream items(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        if (items.eof()) break;  // trailing comma
        invalid(where, "has an empty array element");
      }
      const auto v = parse_number(item);
      if (!v) invalid(where, "array element '" + item + "' is not a number");
      out.push_back(*v);
    }
    return out;
  }
  if (const auto v = parse_number(s)) return *v;
  if (bare_words) return s;
  invalid(where, "value '" + s + "' is not a number, boolean, quoted string or array");
}

std::string parse_key(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) invalid(where, "has an empty key");
  if (s.front() == '"') return unquote(s, where);
  for (char c : s)
    if (!is_bare_key_char(c) && c != '.') invalid(where, "key '" + s + "' has invalid characters");
  return s;
}

std::string describe(const ConfigValue& v) {
  if (std::holds_alternative<double>(v)) return "number";
  if (std::holds_alternative<bool>(v)) return "boolean";
  if (std::holds_alternative<std::string>(v)) return "string";
  return "array";
}

enum class Bound { Positive, NonNegative, Fraction, Any };

struct Field {
  std::string path;
  std::function<ConfigValue(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const ConfigValue&)> set;
  bool numeric = false;
};

double as_number(const std::string& path, const ConfigValue& v, Bound bound) {
  const auto* d = std::get_if<double>(&v);
  if (!d) invalid(path, "expects a number, got a " + describe(v));
  switch (bound) {
    case Bound::Positive:
      if (!(*d > 0.0)) invalid(path, "must be positive, got " + format_double(*d));
      break;
    case Bound::NonNegative:
      if (!(*d >= 0.0)) invalid(path, "must be nonnegative, got " + format_double(*d));
      break;
    case Bound::Fraction:
      if (!(*d > 0.0 && *d <= 1.0)) invalid(path, "must lie in (0, 1], got " + format_double(*d));
      break;
    case Bound::Any: break;
  }
  return *d;
}

template <typename Ref>
Field number(std::string path, Ref ref, Bound bound) {
  Field f;
  f.path = path;
  f.numeric = true;
  f.get = [ref](const ScenarioConfig& c) { return ConfigValue(ref(const_cast<ScenarioConfig&>(c))); };
  f.set = [ref, path, bound](ScenarioConfig& c, const ConfigValue& v) { ref(c) = as_number(path, v, bound); };
  return f;
}

template <typename Ref>
Field integer(std::string path, Ref ref, long min_value) {
  Field f;
  f.path = path;
  f.numeric = true;
  f.get = [ref](const ScenarioConfig& c) {
    return ConfigValue(static_cast<double>(ref(const_cast<ScenarioConfig&>(c))));
  };
  f.set = [ref, path, min_value](ScenarioConfig& c, const ConfigValue& v) {
    const double d = as_number(path, v, Bound::Any);
    if (d != std::floor(d) || d < static_cast<double>(min_value) || d > 9.0e15)
      invalid(path, "must be an integer >= " + std::to_string(min_value));
    ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(d);
  };
  return f;
}

template <typename Ref>
Field boolean(std::string path, Ref ref) {
  Field f;
  f.path = path;
  f.get = [ref](const ScenarioConfig& c) { return ConfigValue(ref(const_cast<ScenarioConfig&>(c))); };
  f.set = [ref, path](ScenarioConfig& c, const ConfigValue& v) {
    const auto* b = std::get_if<bool>(&v);
    if (!b) invalid(path, "expects a boolean, got a " + describe(v));
    ref(c) = *b;
  };
  return f;
}

template <typename Ref>
Field text(std::string path, Ref ref, std::vector<std::string> choices = {}) {
  Field f;
  f.path = path;
  f.get = [ref](const ScenarioConfig& c) { return ConfigValue(ref(const_cast<ScenarioConfig&>(c))); };
  f.set = [ref, path, choices](ScenarioConfig& c, const ConfigValue& v) {
    const auto* s = std::get_if<std::string>(&v);
    if (!s) invalid(path, "expects a string, got a " + describe(v));
    if (!choices.empty() && std::find(choices.begin(), choices.end(), *s) == choices.end()) {
      std::string list;
      for (const auto& ch : choices) list += (list.empty() ? "" : ", ") + ch;
      invalid(path, "must be one of " + list + ", got '" + *s + "'");
    }
    ref(c) = *s;
  };
  return f;
}

Field kernel_form(std::string path, KernelConfig ScenarioConfig::*member) {
  Field f;
  f.path = path;
  f.get = [member](const ScenarioConfig& c) { return ConfigValue(to_string((c.*member).spec.form)); };
  f.set = [member, path](ScenarioConfig& c, const ConfigValue& v) {
    const auto* s = std::get_if<std::string>(&v);
    if (!s) invalid(path, "expects a string, got a " + describe(v));
    try {
      (c.*member).spec.form = kernel_form_from_string(*s);
    } catch (const Error& e) {
      invalid(path, e.message());
    }
  };
  return f;
}

Field number_list(std::string path, std::vector<double> EigenConfig::*member) {
  Field f;
  f.path = path;
  f.get = [member](const ScenarioConfig& c) { return ConfigValue(c.eigen.*member); };
  f.set = [member, path](ScenarioConfig& c, const ConfigValue& v) {
    const auto* a = std::get_if<std::vector<double>>(&v);
    if (!a || a->empty()) invalid(path, "expects a nonempty numeric array");
    for (double x : *a)
      if (!(x > 0.0)) invalid(path, "entries must be positive");
    c.eigen.*member = *a;
  };
  return f;
}

#define REF(expr) [](ScenarioConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(number("params.d1", REF(params.d1), Bound::Positive));
    t.push_back(number("params.d2", REF(params.d2), Bound::Positive));
    t.push_back(number("params.k", REF(params.k), Bound::Positive));
    t.push_back(number("params.h_comp", REF(params.h_comp), Bound::Positive));
    t.push_back(number("params.gamma", REF(params.gamma), Bound::Positive));
    t.push_back(number("params.mu", REF(params.mu), Bound::Positive));
    t.push_back(number("params.h0", REF(params.h0), Bound::Positive));

    t.push_back(kernel_form("kernels.j1.form", &ScenarioConfig::j1));
    t.push_back(number("kernels.j1.support", REF(j1.spec.support), Bound::Positive));
    t.push_back(number("kernels.j1.sigma", REF(j1.spec.sigma), Bound::Positive));
    t.push_back(text("kernels.j1.table", REF(j1.table)));
    t.push_back(kernel_form("kernels.j2.form", &ScenarioConfig::j2));
    t.push_back(number("kernels.j2.support", REF(j2.spec.support), Bound::Positive));
    t.push_back(number("kernels.j2.sigma", REF(j2.spec.sigma), Bound::Positive));
    t.push_back(text("kernels.j2.table", REF(j2.table)));

    t.push_back(text("initial.u0", REF(initial.u0), {"cosine", "table"}));
    t.push_back(number("initial.u_max", REF(initial.u_max), Bound::Positive));
    t.push_back(text("initial.u0_table", REF(initial.u0_table)));
    t.push_back(text("initial.v0", REF(initial.v0), {"constant", "cosine", "table"}));
    t.push_back(number("initial.v0_value", REF(initial.v0_value), Bound::NonNegative));
    t.push_back(text("initial.v0_table", REF(initial.v0_table)));

    t.push_back(number("numerics.dx", REF(numerics.dx), Bound::Positive));
    t.push_back(number("numerics.dt", REF(numerics.dt), Bound::Positive));
    t.push_back(number("numerics.T", REF(numerics.T), Bound::Positive));
    t.push_back(number("numerics.snapshot_every", REF(numerics.snapshot_every), Bound::Positive));
    t.push_back(number("numerics.field_every", REF(numerics.field_every), Bound::NonNegative));
    t.push_back(number("numerics.window_pad", REF(numerics.window_pad), Bound::NonNegative));
    t.push_back(number("numerics.metrics_half_width", REF(numerics.metrics_half_width), Bound::Positive));
    t.push_back(boolean("numerics.dt_halving_check", REF(numerics.dt_halving_check)));

    t.push_back(number("diagnostics.eps_front", REF(diagnostics.detect.eps_front), Bound::Positive));
    t.push_back(number("diagnostics.eps_mass", REF(diagnostics.detect.eps_mass), Bound::Positive));
    t.push_back(number("diagnostics.trailing_fraction", REF(diagnostics.detect.trailing_fraction), Bound::Fraction));
    t.push_back(number("diagnostics.spreading_factor", REF(diagnostics.detect.spreading_factor), Bound::Positive));
    t.push_back(number("diagnostics.lambda_tol", REF(diagnostics.verify.lambda_tol), Bound::Positive));
    t.push_back(number("diagnostics.v_tol", REF(diagnostics.verify.v_tol), Bound::Positive));
    t.push_back(number("diagnostics.center_tol", REF(diagnostics.verify.center_tol), Bound::Positive));
    t.push_back(number("diagnostics.sup_u_tol", REF(diagnostics.verify.sup_u_tol), Bound::Positive));
    t.push_back(number("diagnostics.mass_decay_factor", REF(diagnostics.verify.mass_decay_factor), Bound::Positive));
    t.push_back(number("diagnostics.diverge_rate", REF(diagnostics.verify.diverge_rate), Bound::Positive));
    t.push_back(number("diagnostics.plateau_tol", REF(diagnostics.verify.plateau_tol), Bound::Positive));
    t.push_back(integer("diagnostics.plateau_nodes", REF(diagnostics.verify.plateau_nodes), 1));
    t.push_back(number("diagnostics.compact_half_width", REF(diagnostics.verify.compact_half_width),
                       Bound::NonNegative));
    t.push_back(number("diagnostics.eigen_dx", REF(diagnostics.verify.eigen_dx), Bound::NonNegative));
    t.push_back(number("diagnostics.comparison_tol", REF(diagnostics.comparison_tol), Bound::Positive));

    t.push_back(text("output.dir", REF(output.dir)));
    t.push_back(boolean("output.svg", REF(output.svg)));

    t.push_back(integer("sweep.max_cells", REF(sweep.max_cells), 1));

    t.push_back(number_list("eigen.lengths", &EigenConfig::lengths));
    t.push_back(number("eigen.dx", REF(eigen.dx), Bound::NonNegative));

    t.push_back(number("ode.u0", REF(ode.u0), Bound::NonNegative));
    t.push_back(number("ode.v0", REF(ode.v0), Bound::NonNegative));
    t.push_back(number("ode.T", REF(ode.T), Bound::Positive));
    t.push_back(number("ode.dt", REF(ode.dt), Bound::Positive));
    return t;
  }();
  return table;
}

#undef REF

const Field* find_field(const std::string& path) {
  for (const auto& f : fields())
    if (f.path == path) return &f;
  return nullptr;
}

constexpr const char* kAxesPrefix = "sweep.axes.";

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string render(const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
  const auto& a = std::get<std::vector<double>>(v);
  std::string out = "[";
  for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + format_double(a[i]);
  return out + "]";
}

TabulatedProfile read_profile_table(const std::string& path) {
  const KernelSpec raw = read_kernel_table(path);
  TabulatedProfile p;
  p.x = raw.table_x;
  p.value = raw.table_density;
  return p;
}

}  // namespace

ConfigDocument parse_config_text(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw Error(ErrorCode::ConfigInvalid, where + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw Error(ErrorCode::ConfigInvalid, where + ": empty section name");
      for (char c : section)
        if (!is_bare_key_char(c) && c != '.')
          throw Error(ErrorCode::ConfigInvalid, where + ": invalid section name '" + section + "'");
      continue;
    }
    const auto eq = [&] {
      bool quoted = false;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '=' && !quoted) return i;
      }
      return std::string::npos;
    }();
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigInvalid, where + ": expected key = value");
    const std::string key = parse_key(s.substr(0, eq), where);
    const std::string path = section.empty() ? key : section + "." + key;
    if (doc.count(path)) throw Error(ErrorCode::ConfigInvalid, where + ": duplicate key `" + path + "`");
    doc[path] = parse_value(s.substr(eq + 1), "`" + path + "` (" + where + ")", false);
  }
  return doc;
}

ConfigDocument read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ConfigDocument& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorCode::ConfigInvalid, "override '" + assignment + "' is not of the form path=value");
  const std::string path = trim(assignment.substr(0, eq));
  doc[path] = parse_value(assignment.substr(eq + 1), path, true);
}

ScenarioConfig scenario_from_document(const ConfigDocument& doc, const std::string& base_dir) {
  ScenarioConfig c;
  for (const auto& [path, value] : doc) {
    if (path.rfind(kAxesPrefix, 0) == 0) {
      const std::string target = path.substr(std::string(kAxesPrefix).size());
      const Field* f = find_field(target);
      if (!f || !f->numeric || target.rfind("sweep.", 0) == 0) invalid(path, "names no numeric parameter path");
      const auto* list = std::get_if<std::vector<double>>(&value);
      if (!list || list->empty()) invalid(path, "expects a nonempty numeric array");
      ScenarioConfig probe;
      for (double x : *list) f->set(probe, x);
      c.sweep.axes.emplace_back(target, *list);
      continue;
    }
    if (path == "sweep.seed") {
      const double d = as_number(path, value, Bound::NonNegative);
      if (d != std::floor(d) || d > 9.0e15) invalid(path, "must be a nonnegative integer");
      c.sweep.seed = static_cast<std::uint64_t>(d);
      continue;
    }
    const Field* f = find_field(path);
    if (!f) invalid(path, "is not a recognised configuration key");
    f->set(c, value);
  }

  c.j1.table = resolve_path(base_dir, c.j1.table);
  c.j2.table = resolve_path(base_dir, c.j2.table);
  c.initial.u0_table = resolve_path(base_dir, c.initial.u0_table);
  c.initial.v0_table = resolve_path(base_dir, c.initial.v0_table);

  if (c.j1.spec.form == KernelForm::Tabulated && c.j1.table.empty())
    invalid("kernels.j1.table", "is required for the tabulated form");
  if (c.j2.spec.form == KernelForm::Tabulated && c.j2.table.empty())
    invalid("kernels.j2.table", "is required for the tabulated form");
  if (c.initial.u0 == "table" && c.initial.u0_table.empty()) invalid("initial.u0_table", "is required for u0 = table");
  if (c.initial.v0 == "table" && c.initial.v0_table.empty()) invalid("initial.v0_table", "is required for v0 = table");

  const double bound = stable_dt(c.params);
  if (c.numerics.dt > bound)
    invalid("numerics.dt", "= " + format_double(c.numerics.dt) + " exceeds the stability bound " + format_double(bound));
  if (c.numerics.dt > c.numerics.T) invalid("numerics.dt", "exceeds numerics.T");
  if (c.ode.dt > c.ode.T) invalid("ode.dt", "exceeds ode.T");
  return c;
}

ConfigDocument to_document(const ScenarioConfig& config) {
  ConfigDocument doc;
  for (const auto& f : fields()) doc[f.path] = f.get(config);
  for (const auto& [path, values] : config.sweep.axes) doc[kAxesPrefix + path] = values;
  if (config.sweep.seed) doc["sweep.seed"] = static_cast<double>(*config.sweep.seed);
  return doc;
}

std::string serialize_document(const ConfigDocument& doc) {
  std::ostringstream out;
  std::string current;
  bool first = true;
  for (const auto& [path, value] : doc) {
    std::string section, key;
    if (path.rfind(kAxesPrefix, 0) == 0) {
      section = "sweep.axes";
      key = "\"" + path.substr(std::string(kAxesPrefix).size()) + "\"";
    } else {
      const auto dot = path.rfind('.');
      section = dot == std::string::npos ? "" : path.substr(0, dot);
      key = dot == std::string::npos ? path : path.substr(dot + 1);
    }
    if (first || section != current) {
      if (!first) out << '\n';
      if (!section.empty()) out << '[' << section << "]\n";
      current = section;
      first = false;
    }
    out << key << " = " << render(value) << '\n';
  }
  return out.str();
}

std::string serialize_config(const ScenarioConfig& config) { return serialize_document(to_document(config)); }

ScenarioConfig load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  ConfigDocument doc = read_config_file(path);
  for (const auto& o : overrides) apply_override(doc, o);
  return scenario_from_document(doc, std::filesystem::path(path).parent_path().string());
}

KernelSpec resolve_kernel(const KernelConfig& kernel) {
  if (kernel.spec.form != KernelForm::Tabulated) return kernel.spec;
  return read_kernel_table(kernel.table);
}

Profile initial_u(const InitialConfig& initial) {
  if (initial.u0 == "table") return read_profile_table(initial.u0_table);
  return CosineBump{initial.u_max};
}

Profile initial_v(const InitialConfig& initial) {
  if (initial.v0 == "table") return read_profile_table(initial.v0_table);
  if (initial.v0 == "cosine") return CosineBump{initial.v0_value};
  return ConstantProfile{initial.v0_value};
}

}  // namespace nlfb

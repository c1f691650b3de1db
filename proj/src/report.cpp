#include "nlfb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlfb/config.hpp"
#include "nlfb/error.hpp"

namespace nlfb {

namespace {

void dump_into(const Json& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_into(item, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(item, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    default: out += v.dump(); return;
  }
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

Json vec2(const Eigen::Vector2d& p) { return Json::array({p(0), p(1)}); }

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  dump_into(value, indent, 0, out);
  if (indent >= 0) out += '\n';
  return out;
}

Json to_json(const ThetaReport& t) {
  Json j;
  j["verdict"] = to_string(t.verdict_roots);
  j["closed_form_verdict"] = t.verdict_closed_form ? Json(to_string(*t.verdict_closed_form)) : Json(nullptr);
  j["sufficient_condition"] =
      t.sufficient_condition_hit ? Json(to_string(*t.sufficient_condition_hit)) : Json(nullptr);
  j["a"] = t.a;
  j["b"] = t.b;
  j["c"] = t.c;
  j["d1_tilde"] = t.d1_tilde;
  j["roots_in_unit_interval"] = t.roots_in_unit_interval;
  j["x_star"] = optional_number(t.x_star);
  return j;
}

Json to_json(const EquilibriumSet& eq) {
  Json j;
  j["competition_case"] = to_string(eq.competition_case);
  j["R0"] = vec2(eq.r0);
  j["R1"] = vec2(eq.r1);
  j["R2"] = vec2(eq.r2);
  j["R_star"] = eq.r_star ? vec2(*eq.r_star) : Json(nullptr);
  return j;
}

Json to_json(const TheoremCheck& c) {
  Json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["margin"] = c.margin;
  j["details"] = c.details;
  return j;
}

Json to_json(const AuditCounters& a) {
  Json j;
  j["clamp_count"] = a.clamp_count;
  j["window_expansions"] = a.window_expansions;
  j["max_leakage"] = a.max_leakage;
  return j;
}

Json make_report(const ReportInputs& in) {
  if (!in.regime || !in.run) throw Error(ErrorCode::InvalidArgument, "report needs a regime and a run");
  const RegimeReport& r = *in.regime;
  Json report;
  report["regime"] = to_string(r.regime);

  Json fronts;
  fronts["g_final"] = r.g_final;
  fronts["h_final"] = r.h_final;
  fronts["g_inf_est"] = optional_number(r.g_inf_est);
  fronts["h_inf_est"] = optional_number(r.h_inf_est);
  fronts["g_rate"] = r.g_rate;
  fronts["h_rate"] = r.h_rate;
  fronts["final_mass"] = r.final_mass;
  fronts["peak_mass"] = r.peak_mass;
  report["fronts"] = fronts;

  report["theta"] = in.theta ? to_json(*in.theta) : Json(nullptr);

  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  report["theorem_checks"] = checks;

  Json audit = to_json(in.run->final_state.audit);
  audit["front_monotone"] = in.run->front_monotone;
  audit["support_discipline"] = in.run->support_discipline;
  if (in.comparison) {
    audit["comparison_bound_holds"] = in.comparison->holds;
    audit["comparison_bound_margin"] = in.comparison->worst_margin;
  }
  if (in.halving) {
    Json h;
    h["dt_half"] = in.halving->dt_half;
    h["g_rel_change"] = in.halving->g_rel_change;
    h["h_rel_change"] = in.halving->h_rel_change;
    audit["dt_halving"] = h;
  } else {
    audit["dt_halving"] = nullptr;
  }
  audit["dx"] = in.dx;
  audit["dt"] = in.dt;
  audit["stable_dt"] = in.stable_dt;
  audit["final_nodes"] = in.run->final_state.grid.count;
  audit["samples"] = in.run->series.size();
  report["numerics_audit"] = audit;
  return report;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory for '" + path + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string timeseries_csv(const TimeSeries& s) {
  std::string out = "t,g_front,h_front,mass_u,sup_u,v_dev_L\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_double(s.t[i]) + ',' + format_double(s.g_front[i]) + ',' + format_double(s.h_front[i]) + ',' +
           format_double(s.mass_u[i]) + ',' + format_double(s.sup_u[i]) + ',' + format_double(s.v_dev[i]) + '\n';
  }
  return out;
}

std::string snapshot_text(const SimState& s) {
  std::string out = "# t = " + format_double(s.t) + " g_front = " + format_double(s.g_front) +
                    " h_front = " + format_double(s.h_front) + "\n# x u v\n";
  for (Index i = 0; i < s.grid.count; ++i)
    out += format_double(s.grid.x(i)) + ' ' + format_double(s.u(i)) + ' ' + format_double(s.v(i)) + '\n';
  return out;
}

std::string snapshot_file_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_t%012.4f.dat", t);
  return buf;
}

std::string profile_svg(const SimState& s) {
  constexpr double W = 800.0, H = 400.0, left = 60.0, right = 20.0, top = 20.0, bottom = 40.0;
  const double x0 = s.grid.x_min(), x1 = s.grid.x_max();
  const double y1 = std::max({1.0, s.u.maxCoeff(), s.v.maxCoeff()}) * 1.05;
  const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  const auto py = [&](double y) { return H - bottom - y / y1 * (H - top - bottom); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << W - right << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y1 * i / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
        << fixed(y, 2) << "</text>\n";
    const double x = x0 + (x1 - x0) * i / 4.0;
    svg << "<text x=\"" << px(x) << "\" y=\"" << H - bottom + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << fixed(x, 1) << "</text>\n";
  }
  const auto polyline = [&](const Eigen::VectorXd& f, const char* color) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const Index stride = std::max<Index>(1, s.grid.count / 2000);
    for (Index i = 0; i < s.grid.count; i += stride) svg << fixed(px(s.grid.x(i)), 2) << ',' << fixed(py(f(i)), 2) << ' ';
    svg << "\"/>\n";
  };
  polyline(s.u, "#1f77b4");
  polyline(s.v, "#d62728");
  for (double front : {s.g_front, s.h_front})
    svg << "<line x1=\"" << fixed(px(front), 2) << "\" y1=\"" << top << "\" x2=\"" << fixed(px(front), 2)
        << "\" y2=\"" << py(0) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  svg << "<text x=\"" << W - right - 4 << "\" y=\"" << top + 12
      << "\" font-size=\"12\" text-anchor=\"end\"><tspan fill=\"#1f77b4\">u</tspan> <tspan fill=\"#d62728\">v</tspan>"
      << " t = " << fixed(s.t, 3) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string eigen_curve_text(const std::vector<std::pair<double, double>>& curve) {
  std::string out = "# l lambda_p\n";
  for (const auto& [l, lam] : curve) out += format_double(l) + ' ' + format_double(lam) + '\n';
  return out;
}

std::string ode_csv(const OdeTrajectory& traj) {
  std::string out = "t,u,v\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    out += format_double(traj.t[i]) + ',' + format_double(traj.u[i]) + ',' + format_double(traj.v[i]) + '\n';
  return out;
}

}  // namespace nlfb

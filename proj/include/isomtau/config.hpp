#pragma once

#include <cstdio>
#include <iostream>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isomtau/verify.hpp"

namespace isomtau {

using Json = nlohmann::ordered_json;

// One batch run: a system with its parameters, an optional initial state and
// path, tolerances, and the checks to execute. Parsed from a single JSON
// document; no environment configuration.
struct RunConfig {
  bool schlesinger = false;
  PainleveKind kind = PainleveKind::P2;
  ThetaParams theta;
  ExtendedState initial;
  bool has_initial = false;
  SchlesingerModel model;
  std::optional<SchlesingerState> schlesinger_initial;
  PathSpec path;
  bool has_path = false;
  Tolerances tol;
  std::uint64_t seed = 1;
  int samples = 0;  // 0: native accepted-step nodes
  std::vector<std::string> checks;
  double gamma_override = 0.0;
  std::string format = "csv";
};

namespace detail {

inline Complex parse_complex(const Json& j, const char* what) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_object() && j.contains("re") && j.contains("im")) {
    return Complex(j.at("re").get<double>(), j.at("im").get<double>());
  }
  throw ConfigError(std::string(what) + ": expected a number or {re, im}");
}

inline Json dump_complex(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline PainleveKind parse_kind(const std::string& s) {
  for (PainleveKind k : all_kinds()) {
    std::string name = kind_name(k);
    std::string lower = name;
    lower[0] = 'p';
    if (s == name || s == lower) return k;
  }
  throw ConfigError("unknown system '" + s + "'");
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
  RunConfig cfg;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("system")) throw ConfigError("config needs a 'system' field");
  std::string system = j.at("system").get<std::string>();
  if (system == "schlesinger") {
    cfg.schlesinger = true;
  } else {
    cfg.kind = detail::parse_kind(system);
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
  if (j.contains("gamma_override")) cfg.gamma_override = j.at("gamma_override").get<double>();
  if (j.contains("format")) {
    cfg.format = j.at("format").get<std::string>();
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv|json");
  }
  if (j.contains("theta")) {
    const Json& t = j.at("theta");
    if (t.contains("theta0")) cfg.theta.theta0 = detail::parse_complex(t.at("theta0"), "theta0");
    if (t.contains("theta1")) cfg.theta.theta1 = detail::parse_complex(t.at("theta1"), "theta1");
    if (t.contains("theta_t")) cfg.theta.theta_t = detail::parse_complex(t.at("theta_t"), "theta_t");
    if (t.contains("theta_inf"))
      cfg.theta.theta_inf = detail::parse_complex(t.at("theta_inf"), "theta_inf");
  }
  if (j.contains("initial_state")) {
    const Json& s = j.at("initial_state");
    cfg.has_initial = true;
    if (s.contains("q")) cfg.initial.q = detail::parse_complex(s.at("q"), "q");
    if (s.contains("p")) cfg.initial.p = detail::parse_complex(s.at("p"), "p");
    if (s.contains("log_k")) cfg.initial.log_k = detail::parse_complex(s.at("log_k"), "log_k");
    if (s.contains("log_a")) cfg.initial.log_a = detail::parse_complex(s.at("log_a"), "log_a");
    if (s.contains("log_b")) cfg.initial.log_b = detail::parse_complex(s.at("log_b"), "log_b");
    if (s.contains("log_c")) cfg.initial.log_c = detail::parse_complex(s.at("log_c"), "log_c");
  }
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    if (t.contains("rel_tol")) cfg.tol.rel_tol = t.at("rel_tol").get<double>();
    if (t.contains("abs_tol")) cfg.tol.abs_tol = t.at("abs_tol").get<double>();
    if (t.contains("max_step")) cfg.tol.max_step = t.at("max_step").get<double>();
    if (t.contains("min_step")) cfg.tol.min_step = t.at("min_step").get<double>();
    cfg.tol.validate();
  }
  if (j.contains("checks")) {
    for (const Json& c : j.at("checks")) cfg.checks.push_back(c.get<std::string>());
  }
  if (cfg.schlesinger) {
    if (j.contains("model")) {
      const Json& m = j.at("model");
      cfg.model.mat_dim = m.at("mat_dim").get<int>();
      cfg.model.thetas.clear();
      for (const Json& row : m.at("thetas")) {
        std::vector<Complex> v;
        for (const Json& e : row) v.push_back(detail::parse_complex(e, "model theta"));
        cfg.model.thetas.push_back(std::move(v));
      }
      cfg.model.pole_count = static_cast<int>(cfg.model.thetas.size());
      if (m.contains("theta_inf")) {
        for (const Json& e : m.at("theta_inf")) {
          cfg.model.theta_inf.push_back(detail::parse_complex(e, "theta_inf"));
        }
      }
      cfg.model.validate();
    }
    if (j.contains("schlesinger_initial")) {
      const Json& s = j.at("schlesinger_initial");
      std::vector<Complex> poles;
      for (const Json& e : s.at("poles")) poles.push_back(detail::parse_complex(e, "pole"));
      std::vector<Mat> gauges;
      for (const Json& gm : s.at("gauges")) {
        int d = cfg.model.mat_dim;
        Mat g(d, d);
        int i = 0;
        for (const Json& row : gm) {
          int k = 0;
          for (const Json& e : row) g(i, k++) = detail::parse_complex(e, "gauge entry");
          ++i;
        }
        gauges.push_back(g);
      }
      cfg.schlesinger_initial = schlesinger_state_from_gauges(cfg.model, poles, gauges);
    }
  }
  if (j.contains("path")) {
    const Json& p = j.at("path");
    cfg.has_path = true;
    if (p.contains("guard_radius")) cfg.path.guard_radius = p.at("guard_radius").get<double>();
    for (const Json& w : p.at("waypoints")) {
      if (w.is_array()) {
        std::vector<Complex> v;
        for (const Json& e : w) v.push_back(detail::parse_complex(e, "waypoint"));
        cfg.path.waypoints.push_back(std::move(v));
      } else {
        cfg.path.waypoints.push_back({detail::parse_complex(w, "waypoint")});
      }
    }
    std::vector<Complex> singular =
        cfg.schlesinger ? std::vector<Complex>{} : singular_times_of(cfg.kind);
    cfg.path.validate(singular);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Output writers (fixed %.17g formatting keeps files byte-stable)

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file " + file.string());
  out << text;
}

inline Json report_json(const ResidualReport& r) {
  return Json{{"name", r.name},
              {"residual", r.residual},
              {"threshold", r.threshold},
              {"passed", r.passed},
              {"context", r.context}};
}

inline std::vector<std::string> slot_names(const RunConfig& cfg) {
  if (!cfg.schlesinger) return spec_for(cfg.kind).state_layout;
  std::vector<std::string> names;
  for (int nu = 0; nu < cfg.model.pole_count; ++nu) {
    for (int i = 0; i < cfg.model.mat_dim; ++i)
      for (int k = 0; k < cfg.model.mat_dim; ++k)
        names.push_back("Q" + std::to_string(nu + 1) + "_" + std::to_string(i + 1) +
                        std::to_string(k + 1));
  }
  for (int nu = 0; nu < cfg.model.pole_count; ++nu) {
    for (int i = 0; i < cfg.model.mat_dim; ++i)
      for (int k = 0; k < cfg.model.mat_dim; ++k)
        names.push_back("P" + std::to_string(nu + 1) + "_" + std::to_string(i + 1) +
                        std::to_string(k + 1));
  }
  return names;
}

inline std::string trajectory_csv(const RunConfig& cfg, const IntegrationResult& r,
                                  const std::vector<std::pair<double, std::vector<Complex>>>& rows) {
  std::string out = "s";
  int tdim = r.path.dim();
  for (int i = 0; i < tdim; ++i) {
    std::string base = tdim == 1 ? "t" : "a" + std::to_string(i + 1);
    out += ",re_" + base + ",im_" + base;
  }
  for (const std::string& n : slot_names(cfg)) out += ",re_" + n + ",im_" + n;
  out += ",re_ln_tau,im_ln_tau,re_action,im_action\n";
  for (const auto& [s, y] : rows) {
    out += fmt_double(s);
    std::vector<Complex> point, dir;
    r.path.locate(s, point, dir);
    for (Complex c : point) out += "," + fmt_double(c.real()) + "," + fmt_double(c.imag());
    for (Complex c : y) out += "," + fmt_double(c.real()) + "," + fmt_double(c.imag());
    out += "\n";
  }
  return out;
}

inline Json trajectory_json(const IntegrationResult& r,
                            const std::vector<std::pair<double, std::vector<Complex>>>& rows) {
  Json arr = Json::array();
  for (const auto& [s, y] : rows) {
    Json row;
    row["s"] = s;
    std::vector<Complex> point, dir;
    r.path.locate(s, point, dir);
    Json tj = Json::array();
    for (Complex c : point) tj.push_back(dump_complex(c));
    row[r.path.dim() == 1 ? "t" : "poles"] = r.path.dim() == 1 ? tj[0] : tj;
    Json state = Json::array();
    for (Complex c : y) state.push_back(dump_complex(c));
    row["state"] = state;
    arr.push_back(std::move(row));
  }
  return arr;
}

inline Json summary_json(const IntegrationResult& r) {
  return Json{{"delta_ln_tau", dump_complex(r.delta_ln_tau)},
              {"delta_action", dump_complex(r.delta_action)},
              {"g_start", dump_complex(r.g_start)},
              {"g_end", dump_complex(r.g_end)},
              {"step_stats",
               Json{{"accepted", r.stats.accepted},
                    {"rejected", r.stats.rejected},
                    {"rhs_evals", r.stats.rhs_evals}}}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands. Exit codes: 0 success / all pass, 1 verification failure,
// 2 configuration error, 3 integration abort.

inline int cmd_integrate(const RunConfig& cfg, const std::string& out_dir,
                         std::ostream& err = std::cerr) {
  namespace fs = std::filesystem;
  if (!cfg.has_path) {
    err << "integrate: config has no path\n";
    return 2;
  }
  try {
    IntegrationResult r;
    if (cfg.schlesinger) {
      if (!cfg.schlesinger_initial) {
        err << "integrate: schlesinger config has no initial state\n";
        return 2;
      }
      r = integrate_schlesinger(cfg.model, *cfg.schlesinger_initial, cfg.path, cfg.tol);
    } else {
      if (!cfg.has_initial) {
        err << "integrate: config has no initial_state\n";
        return 2;
      }
      r = integrate_path(cfg.kind, cfg.theta, cfg.initial, cfg.path, cfg.tol);
    }
    int count = cfg.samples > 0 ? cfg.samples : static_cast<int>(r.y_nodes.size());
    auto rows = dense_samples(r, count);
    fs::create_directories(out_dir);
    if (cfg.format == "csv") {
      detail::write_text(fs::path(out_dir) / "trajectory.csv",
                         detail::trajectory_csv(cfg, r, rows));
    } else {
      detail::write_text(fs::path(out_dir) / "trajectory.json",
                         detail::trajectory_json(r, rows).dump(2) + "\n");
    }
    detail::write_text(fs::path(out_dir) / "summary.json",
                       detail::summary_json(r).dump(2) + "\n");
    return 0;
  } catch (const ConfigError& e) {
    err << "integrate: " << e.what() << "\n";
    return 2;
  } catch (const IntegrationError& e) {
    err << "integrate: aborted: " << e.what() << " (last good s = " << e.last_good_s << ")\n";
    return 3;
  } catch (const GuardError& e) {
    err << "integrate: " << e.what() << "\n";
    return 3;
  }
}

namespace detail {

inline PathSpec default_unit_path(const RandomPoint& pt) {
  return PathSpec::painleve({pt.t, pt.t + Complex(0.8, 0.6)});
}

inline void run_painleve_checks(const RunConfig& cfg, const std::string& name,
                                std::vector<ResidualReport>& reports) {
  const PainleveKind kind = cfg.kind;
  Tolerances tol = cfg.tol;
  if (name == "hamilton" || name == "lax" || name == "series") {
    for (std::uint64_t i = 0; i < 25; ++i) {
      std::uint64_t seed = cfg.seed * 1000 + i;
      RandomPoint pt = random_admissible(kind, seed);
      std::string ctx = point_context(kind, pt);
      if (name == "hamilton") {
        reports.push_back(check_hamilton_equations(kind, pt.theta, pt.state, pt.t, 1e-5, ctx));
      } else if (name == "series") {
        reports.push_back(check_series_recursion_all(kind, pt.theta, pt.state, pt.t, 1e-9, ctx));
      } else {
        Rng zr(seed ^ 0xabcdef);
        std::vector<Complex> zs;
        for (int k = 0; k < 8; ++k) zs.push_back(zr.box(2.8, 4.4, 0.8, 2.0));
        reports.push_back(check_lax_compatibility(kind, pt.theta, pt.state, pt.t, zs, 1e-5, ctx));
      }
    }
    return;
  }
  if (name == "action" || name == "variational" || name == "tau_density") {
    tol.rel_tol = std::min(tol.rel_tol, 1e-12);
    tol.abs_tol = std::min(tol.abs_tol, 1e-14);
    const bool has_run = cfg.has_initial && cfg.has_path;
    int wanted = has_run ? 1 : 3;
    int produced = 0;
    for (std::uint64_t i = 0; i < 60 && produced < wanted; ++i) {
      ThetaParams theta;
      ExtendedState initial;
      PathSpec path;
      std::string ctx;
      if (has_run) {
        theta = cfg.theta;
        initial = cfg.initial;
        path = cfg.path;
        ctx = std::string(kind_name(kind)) + " configured run";
      } else {
        std::uint64_t seed = cfg.seed * 2000 + i;
        RandomPoint pt = random_admissible(kind, seed);
        theta = pt.theta;
        initial = pt.state;
        path = default_unit_path(pt);
        ctx = point_context(kind, pt);
      }
      try {
        IntegrationResult probe = integrate_path(kind, theta, initial, path, tol);
        if (!has_run && !trajectory_is_tame(probe)) continue;
        if (name == "action") {
          reports.push_back(check_action_identity(kind, theta, initial, path, tol,
                                                  cfg.gamma_override, 1e-7, ctx));
        } else if (name == "variational") {
          Rng dr(cfg.seed * 3000 + i);
          Complex dq = dr.box(-1.0, 1.0, -1.0, 1.0);
          Complex dp = dr.box(-1.0, 1.0, -1.0, 1.0);
          reports.push_back(check_variational_identity(kind, theta, initial, path, dq, dp, 1e-5,
                                                       tol, 1e-4, ctx));
        } else {
          reports.push_back(check_tau_log_derivative(kind, theta, initial, path, tol, 1e-6, ctx));
        }
        ++produced;
      } catch (const IntegrationError&) {
        if (has_run) throw;
      }
    }
    if (produced < wanted) {
      throw ConfigError("verify: could not find enough pole-free runs for check '" + name + "'");
    }
    return;
  }
  throw ConfigError("unknown check '" + name + "'");
}

}  // namespace detail

inline int cmd_verify(const RunConfig& cfg, const std::string& out_dir,
                      std::ostream& err = std::cerr) {
  namespace fs = std::filesystem;
  std::vector<ResidualReport> reports;
  try {
    for (const std::string& name : cfg.checks) {
      if (cfg.schlesinger || name == "schlesinger") {
        if (name != "schlesinger") throw ConfigError("unknown schlesinger check '" + name + "'");
        SchlesingerModel model = cfg.model;
        SchlesingerState initial;
        PathSpec loop;
        if (cfg.schlesinger_initial && cfg.has_path) {
          initial = *cfg.schlesinger_initial;
          loop = cfg.path;
        } else {
          auto [m, st] = random_schlesinger_setup(cfg.seed, 3, 2);
          model = m;
          initial = st;
          auto wp = [&](double d1, double d2) {
            std::vector<Complex> w = st.poles;
            w[0] += d1;
            w[1] += d2;
            return w;
          };
          loop.waypoints = {wp(0, 0), wp(0.1, 0), wp(0.1, 0.1), wp(0, 0.1), wp(0, 0)};
        }
        Tolerances tol = cfg.tol;
        tol.rel_tol = std::min(tol.rel_tol, 1e-12);
        tol.abs_tol = std::min(tol.abs_tol, 1e-14);
        for (ResidualReport& r : check_schlesinger_suite(model, initial, loop, tol)) {
          reports.push_back(std::move(r));
        }
        continue;
      }
      detail::run_painleve_checks(cfg, name, reports);
    }
  } catch (const ConfigError& e) {
    err << "verify: " << e.what() << "\n";
    return 2;
  } catch (const IntegrationError& e) {
    err << "verify: aborted: " << e.what() << "\n";
    return 3;
  }
  Json arr = Json::array();
  bool all_passed = true;
  for (const ResidualReport& r : reports) {
    arr.push_back(detail::report_json(r));
    all_passed = all_passed && r.passed;
  }
  fs::create_directories(out_dir);
  detail::write_text(fs::path(out_dir) / "verify.json", arr.dump(2) + "\n");
  return all_passed ? 0 : 1;
}

inline int cmd_series(const RunConfig& cfg, const std::string& out_dir,
                      std::ostream& err = std::cerr) {
  namespace fs = std::filesystem;
  if (cfg.schlesinger) {
    err << "series: only defined for the Painleve systems\n";
    return 2;
  }
  try {
    ThetaParams theta = cfg.theta;
    ExtendedState st = cfg.initial;
    Complex t(1.1, 0.3);
    if (cfg.has_path) t = cfg.path.waypoints.front()[0];
    if (!cfg.has_initial) {
      RandomPoint pt = random_admissible(cfg.kind, cfg.seed);
      theta = pt.theta;
      st = pt.state;
      t = pt.t;
    }
    std::vector<LocalFrame> frames =
        local_frames(cfg.kind, theta, st, t, max_frame_order(cfg.kind));
    RationalMatrix a = lax_a(cfg.kind, theta, st, t);
    Json out;
    out["system"] = kind_name(cfg.kind);
    out["t"] = detail::dump_complex(t);
    Json jframes = Json::array();
    bool all_passed = true;
    auto dump_mat = [](const Mat& m) {
      Json rows = Json::array();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index jx = 0; jx < m.cols(); ++jx) row.push_back(detail::dump_complex(m(i, jx)));
        rows.push_back(std::move(row));
      }
      return rows;
    };
    for (const LocalFrame& f : frames) {
      Json jf;
      jf["location"] = f.location.at_infinity ? Json("infinity")
                                              : detail::dump_complex(f.location.center);
      jf["gauge"] = dump_mat(f.gauge);
      Json coeffs = Json::array();
      for (const Mat& c : f.series_coeffs) coeffs.push_back(dump_mat(c));
      jf["coefficients"] = std::move(coeffs);
      Json polar = Json::array();
      for (const auto& [k, c] : f.exponent.polar) {
        polar.push_back(Json{{"exponent", k}, {"coefficient", dump_mat(c)}});
      }
      jf["exponent"] = Json{{"polar", std::move(polar)},
                            {"log_coeff", dump_mat(f.exponent.log_coeff)}};
      auto [full, diag] = detail::frame_recursion_residual(a, f);
      double residual = std::max(full, diag);
      jf["recursion_residual"] = residual;
      jf["passed"] = residual <= 1e-9;
      all_passed = all_passed && residual <= 1e-9;
      jframes.push_back(std::move(jf));
    }
    out["frames"] = std::move(jframes);
    fs::create_directories(out_dir);
    detail::write_text(fs::path(out_dir) / "series.json", out.dump(2) + "\n");
    return all_passed ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "series: " << e.what() << "\n";
    return 2;
  } catch (const GuardError& e) {
    err << "series: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace isomtau

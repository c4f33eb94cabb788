#include "chfem/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "chfem/errors.hpp"

namespace chfem {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const int d = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : v) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

std::vector<double> parse_double_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  for (const std::string& item : split_list(v)) out.push_back(parse_double(item, where));
  return out;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& where) {
  std::vector<int> out;
  for (const std::string& item : split_list(v)) out.push_back(parse_int(item, where));
  return out;
}

Scheme parse_scheme(const std::string& v, const std::string& where) {
  if (v == "standard") return Scheme::standard;
  if (v == "modified") return Scheme::modified;
  if (v == "ibvp") return Scheme::ibvp;
  throw ConfigError(where + ": unknown scheme '" + v + "' (standard|modified|ibvp)");
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::standard: return "standard";
    case Scheme::modified: return "modified";
    default: return "ibvp";
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& filename) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool have_dt = false, have_courant = false;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = filename + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string ctx = where + " [" + section + "] " + key;

    if (section == "run") {
      if (key == "subcommand") cfg.subcommand = val;
      else if (key == "scheme") cfg.run.scheme = parse_scheme(val, ctx);
      else if (key == "T") cfg.run.T = parse_double(val, ctx);
      else if (key == "dt") { cfg.run.dt = parse_double(val, ctx); have_dt = true; }
      else if (key == "courant") { cfg.run.courant = parse_double(val, ctx); have_courant = true; }
      else if (key == "tau") cfg.run.tau = parse_double(val, ctx);
      else if (key == "k") cfg.run.k = parse_double(val, ctx);
      else if (key == "projection") {
        if (val == "h1") cfg.run.projection = ProjectionKind::h1;
        else if (val == "l2") cfg.run.projection = ProjectionKind::l2;
        else if (val == "interp") cfg.run.projection = ProjectionKind::interp;
        else throw ConfigError(ctx + ": unknown projection '" + val + "' (h1|l2|interp)");
      } else throw ConfigError(ctx + ": unknown key");
    } else if (section == "space") {
      if (key == "r") cfg.run.r = parse_int(val, ctx);
      else if (key == "N") cfg.run.N = parse_int(val, ctx);
      else if (key == "levels") cfg.levels = parse_int_list(val, ctx);
      else if (key == "domain") {
        const std::vector<double> d = parse_double_list(val, ctx);
        if (d.size() != 2 || !(d[1] > d[0]))
          throw ConfigError(ctx + ": domain must be 'a, b' with a < b");
        cfg.run.a = d[0];
        cfg.run.b = d[1];
      } else if (key == "mesh") {
        if (val == "uniform") cfg.run.mesh = MeshKind::uniform;
        else if (val == "quasiuniform-alternating") cfg.run.mesh = MeshKind::quasiuniform_alternating;
        else throw ConfigError(ctx + ": unknown mesh '" + val + "'");
      } else if (key == "quadrature") cfg.run.quad_n = parse_int(val, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "profile") {
      if (key == "name") cfg.run.profile.name = val;
      else if (key == "c") cfg.run.profile.amplitudes = parse_double_list(val, ctx);
      else if (key == "center") cfg.run.profile.centers = parse_double_list(val, ctx);
      else if (key == "kappa") cfg.run.profile.kappa = parse_double(val, ctx);
      else if (key == "V") cfg.run.profile.V = parse_double(val, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "stability") {
      if (key == "grid") cfg.stability_grid = parse_double_list(val, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "checkpoint_every") cfg.checkpoint_every = parse_double(val, ctx);
      else if (key == "checkpoints") cfg.run.checkpoint_times = parse_double_list(val, ctx);
      else if (key == "profile_times") cfg.profile_times = parse_double_list(val, ctx);
      else if (key == "points_per_element") cfg.profile_points_per_element = parse_int(val, ctx);
      else if (key == "normalized") cfg.normalized_errors = parse_bool(val, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else {
      throw ConfigError(where + ": key outside a known section ([run],[space],[profile],[stability],[output])");
    }
  }
  if (have_dt && have_courant)
    throw ConfigError(filename + ": give exactly one of dt and courant");
  if (cfg.subcommand != "run" && cfg.subcommand != "converge" && cfg.subcommand != "stability")
    throw ConfigError(filename + ": unknown subcommand '" + cfg.subcommand + "'");
  if (cfg.run.scheme == Scheme::standard && cfg.run.r < 3)
    throw ConfigError(filename + ": the standard scheme requires r >= 3");
  for (size_t i = 1; i < cfg.levels.size(); ++i)
    if (cfg.levels[i] <= cfg.levels[i - 1])
      throw ConfigError(filename + ": refinement levels must be strictly increasing in N");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "subcommand = " << cfg.subcommand << "\n";
  out << "scheme = " << scheme_name(cfg.run.scheme) << "\n";
  out << "T = " << fmt_short(cfg.run.T) << "\n";
  if (cfg.run.dt) out << "dt = " << fmt_short(*cfg.run.dt) << "\n";
  if (cfg.run.courant) out << "courant = " << fmt_short(*cfg.run.courant) << "\n";
  out << "tau = " << fmt_short(cfg.run.tau) << "\n";
  out << "k = " << fmt_short(cfg.run.k) << "\n";
  out << "projection = "
      << (cfg.run.projection == ProjectionKind::h1
              ? "h1"
              : cfg.run.projection == ProjectionKind::l2 ? "l2" : "interp")
      << "\n";
  out << "\n[space]\n";
  out << "r = " << cfg.run.r << "\n";
  if (cfg.run.N > 0) out << "N = " << cfg.run.N << "\n";
  if (!cfg.levels.empty()) {
    out << "levels = ";
    for (size_t i = 0; i < cfg.levels.size(); ++i) out << (i ? "," : "") << cfg.levels[i];
    out << "\n";
  }
  out << "domain = " << fmt_short(cfg.run.a) << ", " << fmt_short(cfg.run.b) << "\n";
  out << "mesh = "
      << (cfg.run.mesh == MeshKind::uniform ? "uniform" : "quasiuniform-alternating") << "\n";
  if (cfg.run.quad_n) out << "quadrature = " << *cfg.run.quad_n << "\n";
  out << "\n[profile]\n";
  out << "name = " << cfg.run.profile.name << "\n";
  if (!cfg.run.profile.amplitudes.empty()) {
    out << "c = ";
    for (size_t i = 0; i < cfg.run.profile.amplitudes.size(); ++i)
      out << (i ? "," : "") << fmt_short(cfg.run.profile.amplitudes[i]);
    out << "\n";
  }
  if (!cfg.run.profile.centers.empty()) {
    out << "center = ";
    for (size_t i = 0; i < cfg.run.profile.centers.size(); ++i)
      out << (i ? "," : "") << fmt_short(cfg.run.profile.centers[i]);
    out << "\n";
  }
  if (cfg.run.profile.name == "smooth-tw") {
    out << "kappa = " << fmt_short(cfg.run.profile.kappa) << "\n";
    out << "V = " << fmt_short(cfg.run.profile.V) << "\n";
  }
  if (!cfg.stability_grid.empty()) {
    out << "\n[stability]\ngrid = ";
    for (size_t i = 0; i < cfg.stability_grid.size(); ++i)
      out << (i ? "," : "") << fmt_short(cfg.stability_grid[i]);
    out << "\n";
  }
  out << "\n[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  if (cfg.checkpoint_every) out << "checkpoint_every = " << fmt_short(*cfg.checkpoint_every) << "\n";
  if (!cfg.run.checkpoint_times.empty()) {
    out << "checkpoints = ";
    for (size_t i = 0; i < cfg.run.checkpoint_times.size(); ++i)
      out << (i ? "," : "") << fmt_short(cfg.run.checkpoint_times[i]);
    out << "\n";
  }
  if (!cfg.profile_times.empty()) {
    out << "profile_times = ";
    for (size_t i = 0; i < cfg.profile_times.size(); ++i)
      out << (i ? "," : "") << fmt_short(cfg.profile_times[i]);
    out << "\n";
  }
  out << "points_per_element = " << cfg.profile_points_per_element << "\n";
  out << "normalized = " << (cfg.normalized_errors ? "true" : "false") << "\n";
  return out.str();
}

int worker_threads() {
  if (const char* env = std::getenv("CHFEM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

void parallel_tasks(const std::vector<std::function<void()>>& tasks) {
  const int nthreads = std::min<int>(worker_threads(), static_cast<int>(tasks.size()));
  if (nthreads <= 1) {
    for (const auto& t : tasks) t();
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= tasks.size() || failed.load()) return;
        try {
          tasks[i]();
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

// Spline norms by quadrature, independent of any engine.
double quad_norm(const CoefficientArray& u, const QuadratureRule& rule, bool h1) {
  Invariants inv = invariants_single(u, rule, 0.0);
  // H1 invariant integrand is u^2 + u_x^2; the L2 part alone needs a pass of
  // its own, so reuse the cheap identity H1 = ||u||_1^2.
  if (h1) return std::sqrt(std::max(0.0, inv.H1));
  double acc = 0;
  const SplineSpace& s = *u.space;
  for (int e = 0; e < s.elements(); ++e) {
    const double x0 = s.breakpoint(e), x1 = s.breakpoint(e + 1);
    const double half = 0.5 * (x1 - x0);
    for (int q = 0; q < rule.n; ++q) {
      const double x = x0 + half * (rule.nodes[q] + 1.0);
      const double v = eval_spline(u, x, 0);
      acc += half * rule.weights[q] * v * v;
    }
  }
  return std::sqrt(std::max(0.0, acc));
}

std::string profile_time_label(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

void write_profile_dump(const std::filesystem::path& dir, const SimState& state,
                        int points_per_element) {
  const SplineSpace& s = *state.primary.space;
  const bool system_form = state.scheme != Scheme::standard;
  const CoefficientArray& u = system_form ? *state.velocity : state.primary;
  std::ofstream out(dir / ("profile_t" + profile_time_label(state.t) + ".csv"));
  out << (system_form ? "x,u,m\n" : "x,u\n");
  auto row = [&](double x) {
    out << fmt(x) << "," << fmt(eval_spline(u, x, 0));
    if (system_form) out << "," << fmt(eval_spline(state.primary, x, 0));
    out << "\n";
  };
  for (int e = 0; e < s.elements(); ++e) {
    const double x0 = s.breakpoint(e);
    const double w = s.element_width(e);
    for (int j = 0; j < points_per_element; ++j) row(x0 + w * j / points_per_element);
  }
  row(s.b() - 1e-13 * s.length());
}

std::vector<double> build_checkpoints(const ExperimentConfig& cfg, double dt_hint) {
  if (!cfg.run.checkpoint_times.empty()) return cfg.run.checkpoint_times;
  const double T = cfg.run.T;
  double every = cfg.checkpoint_every ? *cfg.checkpoint_every : std::max(T / 100.0, dt_hint);
  if (!(every > 0)) every = T > 0 ? T : 1.0;
  std::vector<double> cps;
  for (double t = 0; t < T - 1e-12; t += every) cps.push_back(t);
  cps.push_back(T);
  return cps;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  RunConfig rc = cfg.run;
  const SplineSpace probe_space = build_space(rc);
  const double dt = rc.T > 0 ? resolve_dt(rc, probe_space.h()) : 0.0;
  rc.checkpoint_times = build_checkpoints(cfg, dt > 0 ? dt : 1.0);
  std::vector<double> dump_times = cfg.profile_times;
  if (dump_times.empty()) dump_times = {0.0, rc.T};
  for (double t : dump_times) rc.checkpoint_times.push_back(t);

  const QuadratureRule rule = rc.quad_n ? gauss_legendre(*rc.quad_n) : default_rule(rc.r);
  std::optional<ReferenceSolution> ref;
  if (rc.scheme != Scheme::ibvp) ref = make_reference(rc.profile, rc.b - rc.a);

  std::ofstream traj_csv(dir / "trajectory.csv");
  traj_csv << "t,l2_norm,h1_norm\n";
  std::ofstream inv_csv(dir / "invariants.csv");
  const bool system_form = rc.scheme != Scheme::standard;
  if (rc.scheme != Scheme::ibvp) {
    inv_csv << (system_form ? "t,H0,H1,H2,E0,E1,E2,Ht0,Ht1,Ht2,Et0,Et1,Et2\n"
                            : "t,H0,H1,H2,E0,E1,E2\n");
  }
  std::ofstream ind_csv;
  if (ref) {
    ind_csv.open(dir / "indicators.csv");
    ind_csv << "t,x_star,e_amp,e_phase,e_speed,e_shape,tau\n";
  }

  std::optional<Invariants> inv0_single, inv0_system;
  std::optional<double> prev_xstar;
  double prev_xstar_t = 0;

  auto opt_fmt = [&](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };

  std::vector<CheckpointHook> hooks;
  hooks.push_back([&](const SimState& st) {
    const CoefficientArray& u = st.scheme == Scheme::standard ? st.primary : *st.velocity;
    traj_csv << fmt(st.t) << "," << fmt(quad_norm(u, rule, false)) << ","
             << fmt(quad_norm(u, rule, true)) << "\n";
    if (st.scheme != Scheme::ibvp) {
      const Invariants single = invariants_single(u, rule, cfg.run.k);
      if (!inv0_single) inv0_single = single;
      const InvariantRecord rec = invariant_record(st.t, single, *inv0_single);
      inv_csv << fmt(st.t) << "," << fmt(single.H0) << "," << fmt(single.H1) << ","
              << fmt(single.H2);
      if (st.t > 0)
        inv_csv << "," << opt_fmt(rec.E0) << "," << opt_fmt(rec.E1) << "," << opt_fmt(rec.E2);
      else
        inv_csv << ",,,";
      if (system_form) {
        const Invariants sys = invariants_system(st.primary, u, rule, cfg.run.k);
        if (!inv0_system) inv0_system = sys;
        const InvariantRecord rec2 = invariant_record(st.t, sys, *inv0_system);
        inv_csv << "," << fmt(sys.H0) << "," << fmt(sys.H1) << "," << fmt(sys.H2);
        if (st.t > 0)
          inv_csv << "," << opt_fmt(rec2.E0) << "," << opt_fmt(rec2.E1) << "," << opt_fmt(rec2.E2);
        else
          inv_csv << ",,,";
      }
      inv_csv << "\n";
    }
    if (ref) {
      // indicator rows on the tau grid only
      const double tau = cfg.run.tau;
      const double snap = std::abs(st.t / tau - std::round(st.t / tau));
      if (snap < 1e-9 || st.t == 0.0) {
        const double tau_eff = prev_xstar ? st.t - prev_xstar_t : cfg.run.tau;
        const IndicatorRecord rec =
            indicators(u, *ref, st.t, tau_eff, prev_xstar, rule);
        ind_csv << fmt(rec.t) << "," << fmt(rec.x_star) << "," << fmt(rec.e_amp) << ","
                << fmt(rec.e_phase) << "," << opt_fmt(rec.e_speed) << "," << fmt(rec.e_shape)
                << "," << fmt(rec.tau) << "\n";
        prev_xstar = rec.x_star_unwrapped;
        prev_xstar_t = rec.t;
      }
    }
  });
  for (double t : dump_times) {
    hooks.push_back([&, t](const SimState& st) {
      if (std::abs(st.t - t) < 1e-9 * std::max(1.0, std::abs(t)))
        write_profile_dump(dir, st, cfg.profile_points_per_element);
    });
  }

  const Trajectory traj = evolve(rc, hooks);

  std::ofstream status_csv(dir / "status.csv");
  status_csv << "status,abort_step,abort_time\n";
  status_csv << (traj.status == RunStatus::ok ? "ok" : "instability") << "," << traj.abort_step
             << "," << fmt(traj.abort_time) << "\n";

  RunResult res;
  res.status = traj.status;
  res.abort_step = traj.abort_step;
  res.abort_time = traj.abort_time;
  return res;
}

ConvergeResult converge_experiment(const ExperimentConfig& cfg, int max_levels) {
  std::vector<int> levels = cfg.levels;
  if (levels.empty() && cfg.run.N > 0) levels = {cfg.run.N};
  if (levels.empty()) throw ConfigError("converge: no refinement levels given");
  if (max_levels > 0 && static_cast<int>(levels.size()) > max_levels)
    levels.resize(max_levels);

  const bool ibvp = cfg.run.scheme == Scheme::ibvp;
  const bool manufactured = cfg.run.profile.name == "manufactured-ibvp";
  std::optional<ReferenceSolution> ref;
  if (!ibvp) {
    ref = make_reference(cfg.run.profile, cfg.run.b - cfg.run.a);
    if (!ref) throw ConfigError("converge: profile has no exact reference solution");
  } else if (!manufactured) {
    throw ConfigError("converge: the ibvp scheme needs the manufactured-ibvp profile");
  }

  const double L = cfg.run.b - cfg.run.a;
  const double h0 = L / levels[0];
  std::optional<double> dt0;
  if (cfg.run.dt) dt0 = *cfg.run.dt;

  ConvergeResult result;
  result.levels.resize(levels.size());
  std::vector<std::function<void()>> tasks;
  for (size_t li = 0; li < levels.size(); ++li) {
    tasks.push_back([&, li] {
      RunConfig rc = cfg.run;
      rc.N = levels[li];
      rc.checkpoint_times = {0.0, rc.T};
      const double h = L / rc.N;
      if (dt0) rc.dt = *dt0 * (h / h0);  // keep dt/h fixed across levels
      const SplineSpace space = build_space(rc);
      const double dt = resolve_dt(rc, space.h());
      const Trajectory traj = evolve(rc);
      if (traj.status != RunStatus::ok)
        throw Error("converge: level N=" + std::to_string(rc.N) + " went unstable");
      const QuadratureRule rule = rc.quad_n ? gauss_legendre(*rc.quad_n) : default_rule(rc.r);

      LevelErrors lvl;
      lvl.N = rc.N;
      lvl.M = static_cast<int>(std::lround(rc.T / dt));
      lvl.h = h;
      lvl.dt = dt;
      const SimState& st = traj.last;
      const CoefficientArray& u = rc.scheme == Scheme::standard ? st.primary : *st.velocity;
      const bool norm = cfg.normalized_errors;
      if (ibvp) {
        ManufacturedSolution ms;
        const double T = rc.T;
        auto ue = [&, T](double x) { return ms.u(x, T); };
        auto uxe = [&, T](double x) { return ms.ux(x, T); };
        auto me = [&, T](double x) { return ms.m(x, T); };
        auto mxe = [&, T](double x) { return ms.mx(x, T); };
        lvl.u_l2 = norm_error(u, ue, uxe, NormKind::L2, norm, rule);
        lvl.u_linf = norm_error(u, ue, uxe, NormKind::Linf, norm, rule);
        lvl.u_h1 = norm_error(u, ue, uxe, NormKind::H1, norm, rule);
        lvl.m_l2 = norm_error(st.primary, me, mxe, NormKind::L2, norm, rule);
        lvl.m_linf = norm_error(st.primary, me, mxe, NormKind::Linf, norm, rule);
        lvl.m_h1 = norm_error(st.primary, me, mxe, NormKind::H1, norm, rule);
      } else {
        lvl.u_l2 = norm_error(u, *ref, rc.T, NormKind::L2, norm, rule);
        lvl.u_linf = norm_error(u, *ref, rc.T, NormKind::Linf, norm, rule);
        lvl.u_h1 = norm_error(u, *ref, rc.T, NormKind::H1, norm, rule);
      }
      result.levels[li] = lvl;
    });
  }
  parallel_tasks(tasks);

  const size_t n = levels.size();
  auto rate_col = [&](auto getter) {
    std::vector<std::optional<double>> rates(n);
    for (size_t i = 1; i < n; ++i) {
      const double e0 = getter(result.levels[i - 1]);
      const double e1 = getter(result.levels[i]);
      if (e0 > 0 && e1 > 0)
        rates[i] = std::log(e0 / e1) / std::log(double(levels[i]) / levels[i - 1]);
    }
    return rates;
  };
  result.u_l2_rate = rate_col([](const LevelErrors& l) { return l.u_l2; });
  result.u_linf_rate = rate_col([](const LevelErrors& l) { return l.u_linf; });
  result.u_h1_rate = rate_col([](const LevelErrors& l) { return l.u_h1; });
  if (ibvp) {
    result.m_l2_rate = rate_col([](const LevelErrors& l) { return l.m_l2.value_or(0); });
    result.m_linf_rate = rate_col([](const LevelErrors& l) { return l.m_linf.value_or(0); });
    result.m_h1_rate = rate_col([](const LevelErrors& l) { return l.m_h1.value_or(0); });
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / "rates.csv");
  out << "N,M,h,dt,u_l2,u_l2_rate,u_linf,u_linf_rate,u_h1,u_h1_rate";
  if (ibvp) out << ",m_l2,m_l2_rate,m_linf,m_linf_rate,m_h1,m_h1_rate";
  out << "\n";
  auto opt_fmt = [&](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (size_t i = 0; i < n; ++i) {
    const LevelErrors& l = result.levels[i];
    out << l.N << "," << l.M << "," << fmt(l.h) << "," << fmt(l.dt) << "," << fmt(l.u_l2) << ","
        << opt_fmt(result.u_l2_rate[i]) << "," << fmt(l.u_linf) << ","
        << opt_fmt(result.u_linf_rate[i]) << "," << fmt(l.u_h1) << ","
        << opt_fmt(result.u_h1_rate[i]);
    if (ibvp)
      out << "," << fmt(*l.m_l2) << "," << opt_fmt(result.m_l2_rate[i]) << "," << fmt(*l.m_linf)
          << "," << opt_fmt(result.m_linf_rate[i]) << "," << fmt(*l.m_h1) << ","
          << opt_fmt(result.m_h1_rate[i]);
    out << "\n";
  }
  return result;
}

StabilityResult stability_experiment(const ExperimentConfig& cfg) {
  if (cfg.stability_grid.empty()) throw ConfigError("stability: no courant grid given");
  RunConfig rc = cfg.run;
  StabilityResult res;
  res.max_courant = stability_probe(rc, cfg.stability_grid);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / "stability.csv");
  out << "scheme,r,profile,V,max_courant\n";
  double v = 0;
  try {
    v = nominal_speed(rc);
  } catch (const Error&) {
    v = 0;
  }
  out << scheme_name(rc.scheme) << "," << rc.r << "," << rc.profile.name << "," << fmt(v) << ","
      << fmt(res.max_courant) << "\n";
  return res;
}

}  // namespace chfem

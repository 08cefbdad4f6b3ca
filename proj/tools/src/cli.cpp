#include "ppens/cli.hpp"

#include <CLI11.hpp>

#include "ppens/curvilinear.hpp"
#include "ppens/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace ppens::cli {
namespace {

constexpr long kDefaultSteps = 2000;

std::ofstream open_csv(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name);
  if (!f) throw ConfigError("cli", "cannot write " + name + " in " + dir);
  f << std::scientific << std::setprecision(10);
  return f;
}

long resolve_steps(const RunSpec& spec, double dt) {
  if (spec.steps > 0) return spec.steps;
  if (spec.t_final > 0.0) return std::max(1L, static_cast<long>(std::llround(spec.t_final / dt)));
  return kDefaultSteps;
}

// dt from the stability constant, shortened so the run lands on t_final.
double resolve_dt(const RunSpec& spec, double h) {
  if (spec.t_final > 0.0 && spec.steps == 0) return steps_for(spec.t_final, spec.mu, h, spec.cfl).second;
  return stable_dt(spec.mu, h, spec.cfl);
}

void write_fields(const std::string& dir, const Geometry& geo, const FlowState& st) {
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  auto fu = open_csv(dir, "fields_u.csv");
  auto fv = open_csv(dir, "fields_v.csv");
  fu << "x,y,value\n";
  fv << "x,y,value\n";
  auto dump = [&](int e, double val) {
    Vec2 x = g.edge_pos(e);
    (g.edge_comp(e) == 0 ? fu : fv) << x.x() << ',' << x.y() << ',' << val << '\n';
  };
  for (int k = 0; k < cls.n_inner_edges(); ++k) dump(cls.inner_edges[k], st.vel(k));
  for (int k = 0; k < cls.n_boundary_edges(); ++k)
    dump(cls.boundary_edges[k], st.vel(cls.n_inner_edges() + k));
  auto fp = open_csv(dir, "fields_p.csv");
  fp << "x,y,value\n";
  for (int k = 0; k < cls.n_pressure(); ++k) {
    int id = k < cls.n_inner() ? cls.inner_pressure[k] : cls.ghost_pressure[k - cls.n_inner()];
    Vec2 x = g.node_pos(id);
    fp << x.x() << ',' << x.y() << ',' << st.p(k) << '\n';
  }
}

// u at inner u-edges on the node row nearest to y, plus the boundary values
// extrapolated at boundary points on that row.
std::vector<Vec2> cross_section(const Geometry& geo, const Vector& vel, double y) {
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  const int row = static_cast<int>(std::lround((y - g.origin().y()) / g.h()));
  const double yr = g.node_pos(0, row).y();
  std::vector<Vec2> out;
  for (int k = 0; k < cls.n_inner_edges(); ++k) {
    int e = cls.inner_edges[k];
    if (g.edge_comp(e) != 0 || g.edge_ij(e)[1] != g.wrap_j(row)) continue;
    out.emplace_back(g.edge_pos(e).x(), vel(k));
  }
  for (int j = 0; j < cls.n_ghost(); ++j) {
    const Vec2& xb = cls.boundary_points[j].point;
    if (std::abs(xb.y() - yr) > 1e-9 * g.h()) continue;
    out.emplace_back(xb.x(), extrapolate_velocity(geo, vel, j).x());
  }
  std::sort(out.begin(), out.end(), [](const Vec2& a, const Vec2& b) { return a.x() < b.x(); });
  return out;
}

void write_errors(std::ostream& f, const ErrorSet& e) {
  f << e.u << ',' << e.v << ',' << e.p << ',' << e.ux << ',' << e.uy << ',' << e.div;
}

}  // namespace

void validate(const RunSpec& spec) {
  static const std::vector<std::string> commands{"run", "converge", "drift", "appendixA", "polar-demo"};
  if (std::find(commands.begin(), commands.end(), spec.command) == commands.end())
    throw ConfigError("cli", "unknown command '" + spec.command + "'");
  if (spec.case_name != "square" && spec.case_name != "irregular")
    throw ConfigError("cli", "unknown case '" + spec.case_name + "' (expected square or irregular)");
  if (spec.n < 4) throw ConfigError("cli", "--n must be at least 4");
  if (!(spec.mu > 0.0)) throw ConfigError("cli", "--mu must be positive");
  if (!(spec.cfl > 0.0)) throw ConfigError("cli", "--cfl must be positive");
  if (spec.t_final < 0.0) throw ConfigError("cli", "--t-final must be positive");
  if (spec.steps < 0) throw ConfigError("cli", "--steps must be positive");
  if (spec.lambdas.empty()) throw ConfigError("cli", "--lambda needs a value");
  for (double l : spec.lambdas)
    if (!(l >= 0.0)) throw ConfigError("cli", "--lambda must be non-negative");
  if (spec.command != "drift" && spec.lambdas.size() != 1)
    throw ConfigError("cli", "only drift accepts several --lambda values");
  if (spec.command == "converge") {
    if (spec.sizes.size() < 2) throw ConfigError("cli", "converge needs at least two --sizes");
    for (std::size_t k = 1; k < spec.sizes.size(); ++k)
      if (spec.sizes[k] <= spec.sizes[k - 1])
        throw ConfigError("cli", "--sizes must be strictly increasing");
    if (spec.sizes.front() < 4) throw ConfigError("cli", "--sizes must be at least 4");
  }
  if (spec.samples < 2) throw ConfigError("cli", "--samples must be at least 2");
  if (spec.command == "appendixA" && !spec.project)
    throw ConfigError("cli", "appendixA needs --project");
}

ManufacturedCase make_case(const std::string& name, double mu) {
  if (name == "square") return square_case(mu);
  if (name == "irregular") return irregular_case(mu);
  throw ConfigError("cli", "unknown case '" + name + "'");
}

SolverConfig solver_config(const RunSpec& spec, double lambda) {
  SolverConfig cfg;
  cfg.mu = spec.mu;
  cfg.lambda = lambda;
  cfg.cfl_c = spec.cfl;
  cfg.project = spec.project;
  cfg.seed = spec.seed;
  return cfg;
}

RunOutcome run_case(const RunSpec& spec) {
  ManufacturedCase mc = make_case(spec.case_name, spec.mu);
  RunOutcome out{make_geometry(mc.domain, spec.n), {}, {}, {}, 0.0};
  SolverConfig cfg = solver_config(spec, spec.lambda());
  cfg.dt = resolve_dt(spec, out.geo.grid.h());
  out.dt = cfg.dt;
  Solver solver(out.geo, mc.problem(), cfg);
  if (spec.perturb) solver.set_rhs_hook(make_perturbation(spec.seed));
  auto res = solver.run(solver.initial_state(0.0), resolve_steps(spec, cfg.dt));
  out.state = std::move(res.state);
  out.monitors = std::move(res.monitors);
  out.errors = measure_errors(out.geo, out.state, mc);
  return out;
}

DriftResult drift_study(const RunSpec& spec) {
  ManufacturedCase mc = make_case(spec.case_name, spec.mu);
  Geometry geo = make_geometry(mc.domain, spec.n);
  const double dt = resolve_dt(spec, geo.grid.h());
  const long steps = resolve_steps(spec, dt);
  const long every = std::max(1L, steps / spec.samples);

  DriftResult out;
  out.lambdas = spec.lambdas;
  for (long k = 0; k <= steps; k += every) out.steps.push_back(k);
  if (out.steps.back() != steps) out.steps.push_back(steps);
  for (long k : out.steps) out.t.push_back(static_cast<double>(k) * dt);

  for (double lambda : spec.lambdas) {
    SolverConfig cfg = solver_config(spec, lambda);
    cfg.dt = dt;
    Solver solver(geo, mc.problem(), cfg);
    if (spec.perturb) solver.set_rhs_hook(make_perturbation(spec.seed));
    FlowState st = solver.initial_state(0.0);
    std::vector<double> err;
    std::size_t next = 0;
    for (long k = 0;; ++k) {
      if (next < out.steps.size() && out.steps[next] == k) {
        err.push_back(linf_error(geo, st, mc, Channel::U, st.t));
        ++next;
      }
      if (k == steps) break;
      solver.step(st);
    }
    out.u_err.push_back(std::move(err));
    out.section.push_back(cross_section(geo, st.vel, spec.row_y));
  }
  return out;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v) {
  DecayFit f;
  f.rate = -log_slope(t, v);
  double st = 0, sl = 0;
  int m = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(v[k] > 0.0)) continue;
    st += t[k];
    sl += std::log(v[k]);
    ++m;
  }
  f.log_amp = (sl + f.rate * st) / m;
  return f;
}

double log_slope(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw ConfigError("cli", "fit needs matching sample vectors");
  double st = 0, sl = 0, stt = 0, stl = 0;
  int m = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(v[k] > 0.0)) continue;
    const double l = std::log(v[k]);
    st += t[k];
    sl += l;
    stt += t[k] * t[k];
    stl += t[k] * l;
    ++m;
  }
  if (m < 2) throw ConfigError("cli", "fit needs at least two positive samples");
  const double den = m * stt - st * st;
  if (den == 0.0) throw ConfigError("cli", "fit needs distinct sample times");
  return (m * stl - st * sl) / den;
}

AttractorResult appendix_a(const RunSpec& spec) {
  auto domain = std::make_shared<Rectangle>(Vec2(0.0, 0.0), Vec2(1.0, 1.0));
  Geometry geo = make_geometry(domain, spec.n);
  FlowProblem prob;
  VectorField zero = [](const Vec2&, double) { return Vec2(0.0, 0.0); };
  prob.force = zero;
  prob.g = zero;
  prob.g_t = zero;
  prob.initial_velocity = [](const Vec2& x, double) { return Vec2(x.x(), 0.0); };
  SolverConfig cfg = solver_config(spec, spec.lambda());
  cfg.project = true;
  cfg.dt = resolve_dt(spec, geo.grid.h());
  Solver solver(geo, prob, cfg);
  auto res = solver.run(solver.initial_state(0.0), resolve_steps(spec, cfg.dt));

  AttractorResult out;
  out.series = std::move(res.monitors);
  std::vector<double> t, div, drift;
  for (std::size_t k = out.series.size() / 2; k < out.series.size(); ++k) {
    t.push_back(out.series[k].t);
    div.push_back(out.series[k].div_inf);
    drift.push_back(out.series[k].drift_inf);
  }
  for (const auto& m : out.series) out.max_compat = std::max(out.max_compat, std::abs(m.compat));
  out.div_fit = fit_decay(t, div);
  out.drift_fit = fit_decay(t, drift);
  return out;
}

bool PolarCheck::pass() const { return std::isfinite(value) && value <= tolerance; }

std::vector<PolarCheck> polar_checks() {
  const CurvilinearMap polar = polar_map();
  std::vector<PolarCheck> out;

  double metric = 0.0;
  for (double r : {0.3, 1.0, 2.5})
    for (double th : {0.0, 1.1, 4.0}) {
      auto [s_r, s_th] = metric_factors(polar, r, th);
      metric = std::max({metric, std::abs(s_r - 1.0), std::abs(s_th - r)});
    }
  out.push_back({"metric factors (1, r)", metric, 1e-14});

  auto zero = [](double, double) { return 0.0; };
  out.push_back({"div of u_r = 1/r", std::abs(divergence_curvilinear(
                                         polar, [](double r, double) { return 1.0 / r; }, zero,
                                         0.8, 0.3, 1e-3)),
                 1e-10});
  out.push_back({"div of u_r = r minus 2", std::abs(divergence_curvilinear(
                                               polar, [](double r, double) { return r; }, zero, 0.8,
                                               0.3, 1e-3) -
                                           2.0),
                 1e-6});

  const double step = 1e-3;
  double robin = 0.0;
  for (double th : {0.2, 1.3, 2.9}) {
    robin = std::max(robin, std::abs(robin_bc_residual(
                                polar, 1.0, [](double r, double t) { return (1.0 - r) * std::cos(t); },
                                [](double, double t) { return std::sin(t); }, th, step)));
  }
  out.push_back({"Robin residual, g = sin", robin, step * step});

  // u_r = sin r, u_th = r cos th: div = sin(r)/r + cos(r) - sin(th).
  auto ur = [](double r, double) { return std::sin(r); };
  auto ut = [](double r, double th) { return r * std::cos(th); };
  const double r0 = 0.9, th0 = 0.7;
  const double exact = std::sin(r0) / r0 + std::cos(r0) - std::sin(th0);
  const double e1 = std::abs(divergence_curvilinear(polar, ur, ut, r0, th0, 0.04) - exact);
  const double e2 = std::abs(divergence_curvilinear(polar, ur, ut, r0, th0, 0.02) - exact);
  out.push_back({"refinement ratio minus 4", std::abs(e1 / e2 - 4.0), 0.5});
  return out;
}

void cmd_run(const RunSpec& spec, std::ostream& log) {
  RunOutcome r = run_case(spec);
  auto mon = open_csv(spec.out, "monitors.csv");
  mon << "step,t,div_inf,drift_inf,defect\n";
  for (const auto& m : r.monitors)
    mon << m.step << ',' << m.t << ',' << m.div_inf << ',' << m.drift_inf << ',' << m.defect << '\n';
  auto err = open_csv(spec.out, "errors.csv");
  err << "err_u,err_v,err_p,err_ux,err_uy,err_div\n";
  write_errors(err, r.errors);
  err << '\n';
  write_fields(spec.out, r.geo, r.state);

  std::ofstream sum(std::filesystem::path(spec.out) / "summary.txt");
  sum << std::scientific << std::setprecision(6);
  sum << "case " << spec.case_name << " n " << spec.n << " lambda " << spec.lambda() << " mu "
      << spec.mu << '\n'
      << "steps " << r.monitors.size() << " dt " << r.dt << " t " << r.state.t << '\n'
      << "linf u " << r.errors.u << " v " << r.errors.v << " p " << r.errors.p << '\n'
      << "linf u_x " << r.errors.ux << " u_y " << r.errors.uy << " div " << r.errors.div << '\n';
  log << "run finished: " << r.monitors.size() << " steps, t = " << r.state.t
      << ", u error " << r.errors.u << ", p error " << r.errors.p << '\n';
}

ConvergenceReport cmd_converge(const RunSpec& spec, std::ostream& log) {
  ManufacturedCase mc = make_case(spec.case_name, spec.mu);
  const double t_final = spec.t_final > 0.0 ? spec.t_final : 0.0657;
  ConvergenceReport rep = convergence_study(mc, spec.sizes, t_final, solver_config(spec, spec.lambda()));

  auto csv = open_csv(spec.out, "converge.csv");
  csv << "n,h,err_u,err_v,err_p,err_ux,err_uy,err_div,slope_u,slope_v,slope_p,slope_ux,slope_uy,"
         "slope_div\n";
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& r = rep.rows[k];
    csv << r.n << ',' << r.h << ',';
    write_errors(csv, r.err);
    csv << ",,,,,,\n";
  }
  for (std::size_t k = 0; k < rep.slopes.size(); ++k) {
    csv << "slope " << rep.rows[k].n << "-" << rep.rows[k + 1].n << ",,,,,,,,";
    write_errors(csv, rep.slopes[k]);
    csv << '\n';
  }

  std::ofstream gp(std::filesystem::path(spec.out) / "converge.gp");
  gp << "# log-log error against h with a slope-2 reference line\n"
     << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'h'\nset ylabel 'max error'\nset key left top\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output 'converge_up.png'\n"
     << "h0 = " << rep.rows.back().h << "; e0 = " << rep.rows.back().err.u << "\n"
     << "plot 'converge.csv' every ::1::" << rep.rows.size()
     << " using 2:5 with linespoints pt 6 title 'p', \\\n"
     << "     '' every ::1::" << rep.rows.size() << " using 2:3 with linespoints pt 4 title 'u', \\\n"
     << "     e0*(x/h0)**2 with lines dt 2 title 'slope 2'\n"
     << "set output 'converge_grad.png'\n"
     << "plot 'converge.csv' every ::1::" << rep.rows.size()
     << " using 2:7 with linespoints pt 6 title 'u_y', \\\n"
     << "     '' every ::1::" << rep.rows.size() << " using 2:6 with linespoints pt 4 title 'u_x', \\\n"
     << "     e0*(x/h0)**2 with lines dt 2 title 'slope 2'\n";

  for (const auto& r : rep.rows)
    log << "n " << r.n << (r.diverged ? " diverged" : "") << " u " << r.err.u << " p " << r.err.p
        << '\n';
  for (const auto& s : rep.slopes) log << "slopes u " << s.u << " v " << s.v << " p " << s.p << '\n';
  return rep;
}

void cmd_drift(const RunSpec& spec, std::ostream& log) {
  DriftResult d = drift_study(spec);
  auto csv = open_csv(spec.out, "drift.csv");
  csv << "step,t";
  for (double l : d.lambdas) csv << ",err_u_lambda_" << l;
  csv << '\n';
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    csv << d.steps[k] << ',' << d.t[k];
    for (const auto& col : d.u_err) csv << ',' << col[k];
    csv << '\n';
  }
  auto sec = open_csv(spec.out, "section.csv");
  sec << "lambda,x,u\n";
  for (std::size_t l = 0; l < d.lambdas.size(); ++l)
    for (const Vec2& p : d.section[l]) sec << d.lambdas[l] << ',' << p.x() << ',' << p.y() << '\n';
  for (std::size_t l = 0; l < d.lambdas.size(); ++l)
    log << "lambda " << d.lambdas[l] << " final u error " << d.u_err[l].back() << '\n';
}

void cmd_appendix_a(const RunSpec& spec, std::ostream& log) {
  AttractorResult a = appendix_a(spec);
  auto csv = open_csv(spec.out, "appendixA.csv");
  csv << "step,t,div_inf,drift_inf,defect,compat\n";
  for (const auto& m : a.series)
    csv << m.step << ',' << m.t << ',' << m.div_inf << ',' << m.drift_inf << ',' << m.defect << ','
        << m.compat << '\n';
  auto fit = open_csv(spec.out, "appendixA_rates.csv");
  fit << "quantity,rate,expected\n"
      << "div_inf," << a.div_fit.rate << ',' << 2.0 * M_PI * M_PI * spec.mu << '\n'
      << "drift_inf," << a.drift_fit.rate << ',' << spec.lambda() << '\n';
  log << "div decay rate " << a.div_fit.rate << " (2 pi^2 mu = " << 2.0 * M_PI * M_PI * spec.mu
      << ")\ndrift decay rate " << a.drift_fit.rate << " (lambda = " << spec.lambda() << ")\n"
      << "max |compatibility residual| " << a.max_compat << '\n';
}

void cmd_polar_demo(const RunSpec&, std::ostream& log) {
  bool ok = true;
  for (const auto& c : polar_checks()) {
    log << (c.pass() ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (tol " << c.tolerance
        << ")\n";
    ok = ok && c.pass();
  }
  if (!ok) throw Error("curvilinear", "polar checks failed");
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  CLI::App app{"Pressure Poisson Navier-Stokes solver and verification runs", "ppens"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.add_option("--case", spec.case_name, "square or irregular")->capture_default_str();
  app.add_option("--n", spec.n, "cells across the x extent")->capture_default_str();
  app.add_option("--sizes", spec.sizes, "grid sizes for converge");
  app.add_option("--t-final", spec.t_final, "final time (dt shortened to land on it)");
  app.add_option("--steps", spec.steps, "number of steps; overrides --t-final");
  app.add_option("--lambda", spec.lambdas, "drift feedback; drift accepts several")->capture_default_str();
  app.add_option("--mu", spec.mu, "viscosity")->capture_default_str();
  app.add_option("--cfl", spec.cfl, "C in dt = C h^2 / mu")->capture_default_str();
  app.add_option("--seed", spec.seed, "perturbation seed")->capture_default_str();
  app.add_flag("--perturb", spec.perturb, "add uniform [0,1] noise to the Neumann data");
  app.add_flag("--project,!--no-project", spec.project, "project the rhs onto the solvable range");
  app.add_option("--samples", spec.samples, "time samples written by drift")->capture_default_str();
  app.add_option("--row", spec.row_y, "y of the drift cross-section")->capture_default_str();
  app.add_option("--out", spec.out, "output directory")->capture_default_str();

  auto* run = app.add_subcommand("run", "one run; writes monitors, errors, fields and a summary");
  auto* conv = app.add_subcommand("converge", "convergence study over --sizes");
  auto* drift = app.add_subcommand("drift", "u error against time for each --lambda");
  auto* attr = app.add_subcommand("appendixA", "decay of div and drift from inconsistent data");
  auto* polar = app.add_subcommand("polar-demo", "curvilinear divergence and Robin checks");
  for (auto* sub : {run, conv, drift, attr, polar}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: cli: " << e.what() << '\n';
    return 2;
  }
  spec.command = app.get_subcommands().front()->get_name();

  try {
    validate(spec);
    if (spec.command == "run") cmd_run(spec, out);
    else if (spec.command == "converge") cmd_converge(spec, out);
    else if (spec.command == "drift") cmd_drift(spec, out);
    else if (spec.command == "appendixA") cmd_appendix_a(spec, out);
    else cmd_polar_demo(spec, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ppens::cli

#pragma once

// Scenario dispatch behind the sgavg command-line tool. Every scenario is
// validated completely (all module objects constructed) before any output
// directory is created or any integration starts.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "sgavg/averaging.hpp"
#include "sgavg/config.hpp"
#include "sgavg/csv.hpp"
#include "sgavg/errors.hpp"
#include "sgavg/field.hpp"
#include "sgavg/forcing.hpp"
#include "sgavg/integrator.hpp"
#include "sgavg/kinks.hpp"
#include "sgavg/models.hpp"

namespace sgavg::app {

enum ExitCode : int { kOk = 0, kValidation = 2, kBlowUp = 3, kOracle = 4 };

inline constexpr double kDefaultDx = 0.05;
namespace fs = std::filesystem;

/// Files produced by one run, relative to its output directory.
class Manifest {
 public:
  void add(std::string file, std::string params) { rows_.emplace_back(std::move(file), std::move(params)); }
  void append(const Manifest& other, const std::string& prefix) {
    for (const auto& [f, p] : other.rows_) rows_.emplace_back(prefix + f, p);
  }
  const std::vector<std::pair<std::string, std::string>>& rows() const noexcept { return rows_; }

  void write(const fs::path& dir, const std::string& scenario) const {
    std::ofstream out(dir / "manifest.csv");
    out << "file,scenario,parameters\n";
    for (const auto& [f, p] : rows_) out << f << ',' << scenario << ",\"" << p << "\"\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline void write_metadata(const fs::path& file, const Metadata& md) {
  std::ofstream out(file);
  out << "key,value\n";
  for (const auto& [k, v] : md) out << k << ',' << v << '\n';
}

// ---------------------------------------------------------------------------
// Config -> domain objects

inline std::optional<PeriodicForcing> forcing_from(const RunConfig& cfg) {
  const auto kind = cfg.str("forcing.kind");
  if (!kind) return std::nullopt;
  const double period = cfg.number("forcing.period", 2.0 * std::numbers::pi);
  if (!(period > 0.0)) throw ConfigError("forcing.period", "forcing period must be positive");
  const double amplitude = cfg.number("forcing.amplitude", 1.0);
  if (*kind == "cosine") return cosine_forcing(amplitude, period);
  if (*kind == "square") {
    const std::size_t k = cfg.count("forcing.harmonics").value_or(kSquareHarmonics);
    if (k == 0) throw ConfigError("forcing.harmonics", "square wave needs at least one harmonic");
    return square_forcing(amplitude, period, k);
  }
  if (*kind == "series") {
    auto a = cfg.numbers("forcing.a");
    auto b = cfg.numbers("forcing.b");
    if (cfg.has("forcing.amplitude")) {
      for (double& v : a) v *= amplitude;
      for (double& v : b) v *= amplitude;
    }
    return series_forcing(std::move(a), std::move(b), period);
  }
  throw ConfigError("forcing.kind", "forcing.kind must be cosine, square or series");
}

inline PeriodicForcing required_forcing(const RunConfig& cfg) {
  auto f = forcing_from(cfg);
  if (!f) throw ConfigError("forcing.kind", "this scenario needs a forcing table");
  return *f;
}

inline Variant variant_from(const RunConfig& cfg) {
  const auto name = cfg.str("model");
  if (!name) throw ConfigError("model", "model is required");
  const auto v = parse_variant(*name);
  if (!v) throw ConfigError("model", "unknown model '" + *name + "'");
  return *v;
}

inline ModelSpec model_from(const RunConfig& cfg, Variant v) {
  std::optional<ForcingStack> stack;
  if (auto f = forcing_from(cfg)) stack = build_stack(*f);
  return ModelSpec::make(v, cfg.number("epsilon"), stack, cfg.number("delta"));
}

inline Boundary boundary_from(const RunConfig& cfg) {
  const std::string b = cfg.str("grid.boundary", "neumann_zero");
  if (b == "neumann_zero") return Boundary::neumann_zero;
  if (b == "periodic") return Boundary::periodic;
  throw ConfigError("grid.boundary", "grid.boundary must be neumann_zero or periodic");
}

inline Grid1D grid_from(const RunConfig& cfg, double default_half_width) {
  const Boundary b = boundary_from(cfg);
  try {
    if (cfg.has("grid.x_min") || cfg.has("grid.x_max") || cfg.has("grid.n")) {
      if (!cfg.has("grid.x_min") || !cfg.has("grid.x_max") || !cfg.has("grid.n"))
        throw ConfigError("grid", "grid needs x_min, x_max and n together");
      return Grid1D(*cfg.number("grid.x_min"), *cfg.number("grid.x_max"), *cfg.count("grid.n"), b);
    }
    return Grid1D::centered(cfg.number("grid.half_width", default_half_width),
                            cfg.number("grid.dx", kDefaultDx), b);
  } catch (const ContractViolation& e) {
    throw ConfigError("grid", e.what());
  }
}

inline Scheme scheme_from(const RunConfig& cfg) {
  const std::string s = cfg.str("plan.scheme", "leapfrog");
  auto v = parse_scheme(s);
  if (!v) throw ConfigError("plan.scheme", "plan.scheme must be leapfrog or rk4");
  return *v;
}

/// Averaged variant whose kink seeds a run of `v` (v itself when averaged).
inline std::optional<Variant> kink_variant_for(Variant v) {
  switch (v) {
    case Variant::avg7:
    case Variant::full1: return Variant::avg7;
    case Variant::avg9:
    case Variant::full8: return Variant::avg9;
    case Variant::avg12:
    case Variant::full10: return Variant::avg12;
    default: return std::nullopt;
  }
}

struct KinkSetup {
  KinkParams params;
  Variant variant;
  Metadata audit;  ///< DSG coefficient provenance and audit verdict, when applicable
};

inline KinkSetup kink_from(const RunConfig& cfg, Variant kink_variant, double Delta, double epsilon) {
  KinkSetup k;
  k.variant = kink_variant;
  const double c = cfg.number("initial.c", 0.0);
  if (!(std::abs(c) < 1.0)) throw ConfigError("initial.c", "kink velocity must satisfy |c| < 1");
  if (kink_variant == Variant::avg12) {
    const std::string coeffs = cfg.str("initial.coeffs", "oracle");
    const DsgCoefficients fit = static_kink_coefficients(Delta);
    const auto [pa, pb] = paper_printed_dsg_coefficients(Delta);
    if (coeffs == "oracle") {
      k.params = validated_dsg_params(Delta, c);
    } else if (coeffs == "paper") {
      k.params = printed_dsg_params(Delta, c);
    } else {
      throw ConfigError("initial.coeffs", "initial.coeffs must be oracle or paper");
    }
    k.audit = {{"dsg_provenance", coeffs == "oracle" ? "oracle-validated" : "paper-printed"},
               {"dsg_a", csv::num(k.params.dsg_a)},
               {"dsg_b", csv::num(k.params.dsg_b)},
               {"dsg_oracle_residual", csv::num(fit.residual)},
               {"dsg_paper_a", csv::num(pa)},
               {"dsg_paper_b", csv::num(pb)},
               {"dsg_paper_residual", csv::num(fit.paper_residual)},
               {"dsg_paper_verdict", fit.paper_passes ? "pass" : "fail"}};
    if (cfg.has("initial.delta_shift") || cfg.has("initial.center"))
      throw ConfigError("initial.center", "the double sine-Gordon kink is centred at x = 0");
    return k;
  }
  k.params.c = c;
  k.params.Delta = Delta;
  k.params.epsilon = epsilon;
  if (!(Delta > 0.0)) throw ConfigError("delta", "pi-kinks need Delta > 0");
  if (cfg.has("initial.center")) {
    if (cfg.has("initial.delta_shift"))
      throw ConfigError("initial.center", "give initial.center or initial.delta_shift, not both");
    k.params.delta_shift = pi_kink_shift_for_center(*cfg.number("initial.center"), k.params, kink_variant);
  } else {
    k.params.delta_shift = cfg.number("initial.delta_shift", 0.0);
  }
  return k;
}

inline double kink_center(const KinkSetup& k) {
  if (k.variant == Variant::avg12) return 0.0;
  return -k.params.delta_shift * k.params.lorentz() / pi_kink_mass(k.params, k.variant);
}

inline std::string initial_kind(const RunConfig& cfg, bool kink_default) {
  const std::string kind = cfg.str("initial.kind", kink_default ? "kink" : "pulse");
  if (kind != "kink" && kind != "pulse") throw ConfigError("initial.kind", "initial.kind must be kink or pulse");
  return kind;
}

inline InitialData pulse_from(const RunConfig& cfg) {
  InitialData d;
  d.kind = InitialData::Kind::pulse;
  d.amplitude = cfg.number("initial.amplitude", 1.0);
  d.width = cfg.number("initial.width", 2.0);
  d.center = cfg.number("initial.center", 0.0);
  if (!(d.width > 0.0)) throw ConfigError("initial.width", "pulse width must be positive");
  return d;
}

inline fs::path output_dir_for(const RunConfig& cfg, const std::string& scenario) {
  if (auto d = cfg.str("output_dir")) return *d;
  if (const char* root = std::getenv("SGAVG_OUTPUT_ROOT"); root && *root) return fs::path(root) / scenario;
  return fs::path("sgavg_out") / scenario;
}

// ---------------------------------------------------------------------------
// Scenarios. Each prepare_* validates and returns a callable that performs
// the run and returns its manifest.

struct Prepared {
  std::string scenario;
  fs::path out_dir;
  bool writes_files = true;
  std::string params;
  std::function<Manifest(std::ostream&)> execute;
};

inline Prepared prepare_delta(const RunConfig& cfg) {
  const PeriodicForcing f = required_forcing(cfg);
  Prepared p;
  p.scenario = "delta";
  p.writes_files = cfg.has("output_dir");
  p.out_dir = output_dir_for(cfg, p.scenario);
  p.params = cfg.describe();
  const bool write = p.writes_files;
  const fs::path dir = p.out_dir;
  const std::string params = p.params;
  p.execute = [f, write, dir, params](std::ostream& out) {
    const ForcingStack s = build_stack(f);
    std::ostringstream table;
    table << "tau,f,f1,f2\n";
    constexpr std::size_t rows = 256;
    for (std::size_t j = 0; j < rows; ++j) {
      const double tau = s.period() * static_cast<double>(j) / static_cast<double>(rows);
      table << csv::num(tau) << ',' << csv::num(s.f(tau)) << ',' << csv::num(s.f_minus1(tau)) << ','
            << csv::num(s.F_minus2(tau)) << '\n';
    }
    out << "delta," << csv::num(s.delta) << '\n';
    for (const InvariantCheck& c : check_stack(s))
      out << "check," << c.name << ',' << csv::num(c.value) << ',' << csv::num(c.tolerance) << ','
          << (c.passed ? "pass" : "fail") << '\n';
    out << table.str();
    Manifest m;
    if (write) {
      std::ofstream(dir / "forcing.csv") << table.str();
      m.add("forcing.csv", params);
      write_metadata(dir / "metadata.csv", {{"scenario", "delta"}, {"delta", csv::num(s.delta)}});
      m.add("metadata.csv", params);
    }
    return m;
  };
  return p;
}

inline Prepared prepare_simulate(const RunConfig& cfg) {
  const Variant v = variant_from(cfg);
  const ModelSpec model = model_from(cfg, v);
  const auto kv = kink_variant_for(v);
  const std::string kind = initial_kind(cfg, kv.has_value());
  const double t_end = cfg.number("plan.t_end", 10.0);

  std::optional<KinkSetup> kink;
  double half_width = 40.0;
  if (kind == "kink") {
    if (!kv) throw ConfigError("initial.kind", "no kink solution is available for " + std::string(variant_name(v)));
    const double eps = needs_epsilon(*kv) ? model.epsilon() : 1.0;
    kink = kink_from(cfg, *kv, model.delta(), eps);
    half_width = default_kink_half_width(kink_mass_coefficient(kink->params, *kv)) + std::abs(kink_center(*kink)) +
                 std::abs(kink->params.c) * t_end;
  }
  const Grid1D grid = grid_from(cfg, half_width);

  FieldState init;
  if (kink) {
    init = init_kink(grid, kink->params, kink->variant);
  } else {
    const InitialData pulse = pulse_from(cfg);
    init = initial_state(pulse, grid, model);
  }

  const double dt = cfg.number("plan.dt", std::min(0.5 * grid.dx(), max_stable_dt(model, grid, cfg.number("plan.oversample", 64.0))));
  const IntegrationPlan plan = make_plan(model, grid, dt, t_end, scheme_from(cfg),
                                         cfg.count("plan.snapshot_stride").value_or(100),
                                         cfg.number("plan.oversample", 64.0));

  Metadata md = {{"scenario", "simulate"},
                 {"model", std::string(variant_name(v))},
                 {"epsilon", csv::num(model.epsilon())},
                 {"delta", csv::num(model.delta())},
                 {"x_min", csv::num(grid.x_min())},
                 {"x_max", csv::num(grid.x_max())},
                 {"n", std::to_string(grid.size())},
                 {"dt", csv::num(plan.effective_dt())},
                 {"steps", std::to_string(plan.steps())},
                 {"scheme", plan.scheme == Scheme::leapfrog ? "leapfrog" : "rk4"},
                 {"initial", kind}};
  if (kink) md.insert(md.end(), kink->audit.begin(), kink->audit.end());

  Prepared p;
  p.scenario = "simulate";
  p.out_dir = output_dir_for(cfg, p.scenario);
  p.params = cfg.describe();
  const std::optional<double> level = kink ? std::optional<double>(kink_level(kink->variant)) : std::nullopt;
  p.execute = [model, grid, init, plan, md, level, dir = p.out_dir, params = p.params](std::ostream&) {
    Manifest m;
    auto snap = [&](const FieldState& s) {
      const std::string name = snapshot_name(s.t);
      write_snapshot(dir / name, s, grid);
      m.add(name, params);
    };
    auto write_records = [&](const std::vector<Record>& recs) {
      if (recs.empty()) return;
      std::ofstream out(dir / "records.csv");
      out << "t,energy,kink_x,kink_c_est\n";
      for (const Record& r : recs)
        out << csv::num(r.t) << ',' << csv::num(r.energy) << ',' << csv::num(r.kink_x) << ','
            << csv::num(r.kink_c_est) << '\n';
      m.add("records.csv", params);
    };
    write_metadata(dir / "metadata.csv", md);
    m.add("metadata.csv", params);
    if (plan.steps() == 0) {
      snap(init);
      return m;
    }
    Observers ob;
    ob.kink_level = level;
    ob.on_snapshot = snap;
    try {
      const IntegrationResult r = integrate(init, model, grid, plan, ob);
      write_records(r.records);
    } catch (const IntegrationBlowUp& e) {
      write_records(e.partial());
      m.write(dir, "simulate");
      throw;
    }
    return m;
  };
  return p;
}

inline std::vector<double> eps_list(const RunConfig& cfg) {
  std::vector<double> eps = cfg.numbers("compare.eps");
  if (eps.empty()) eps = {0.05, 0.025, 0.0125};
  for (double e : eps)
    if (!(e > 0.0)) throw ConfigError("compare.eps", "every epsilon must be positive");
  return eps;
}

inline Prepared prepare_compare(const RunConfig& cfg) {
  const std::string pair_s = cfg.str("compare.pair", "full8-avg9");
  const auto pair = parse_pair(pair_s);
  if (!pair) throw ConfigError("compare.pair", "unknown pair '" + pair_s + "'");
  const auto prep = parse_prep(cfg.str("compare.prep", "raw"));
  if (!prep) throw ConfigError("compare.prep", "compare.prep must be raw or transform");
  if (*prep == Prep::transform && !supports_transform(*pair))
    throw ConfigError("compare.prep", "transform preparation is defined for full1-avg7 and full13-avg13 only");
  const std::vector<double> eps = eps_list(cfg);
  const PeriodicForcing forcing = required_forcing(cfg);
  const ForcingStack stack = build_stack(forcing);
  const auto [fv, av] = pair_variants(*pair);
  const double t_end = cfg.number("plan.t_end", 5.0);

  Scenario base;
  base.pair = *pair;
  base.forcing = forcing;
  base.prep = *prep;
  base.t_end = t_end;
  base.scheme = scheme_from(cfg);
  base.oversample = cfg.number("plan.oversample", 64.0);
  base.snapshot_stride = cfg.count("plan.snapshot_stride").value_or(0);

  const std::string kind = initial_kind(cfg, *pair == ModelPair::full8_avg9);
  double half_width = 30.0;
  Metadata audit;
  if (kind == "kink") {
    const auto kv = kink_variant_for(av);
    if (!kv) throw ConfigError("initial.kind", "no kink solution is available for " + std::string(variant_name(av)));
    double mass = 1e300;
    for (double e : eps) {
      const KinkSetup k = kink_from(cfg, *kv, stack.delta, needs_epsilon(*kv) ? e : 1.0);
      mass = std::min(mass, kink_mass_coefficient(k.params, *kv));
      base.init.kind = InitialData::Kind::kink;
      base.init.kink = k.params;
      audit = k.audit;
      half_width = std::max(half_width, default_kink_half_width(mass) + std::abs(kink_center(k)) + std::abs(k.params.c) * t_end);
    }
  } else {
    base.init = pulse_from(cfg);
  }
  base.grid = grid_from(cfg, half_width);
  base.dt_cap = cfg.number("plan.dt", 0.5 * base.grid.dx());

  // Validate every run before any compute: models, plan, initial data.
  for (double e : eps) {
    const ModelSpec full = ModelSpec::make(fv, e, stack);
    const ModelSpec avg = ModelSpec::make(av, e, stack);
    make_plan(full, base.grid, std::min(base.dt_cap, max_stable_dt(full, base.grid, base.oversample)), t_end,
              base.scheme, 1, base.oversample);
    InitialData init = base.init;
    initial_state(init, base.grid, avg);
  }

  Prepared p;
  p.scenario = "compare";
  p.out_dir = output_dir_for(cfg, p.scenario);
  p.params = cfg.describe();
  p.execute = [base, eps, audit, stack, dir = p.out_dir, params = p.params](std::ostream& out) {
    std::vector<Manifest> per_run(eps.size());
    std::vector<std::string> run_dirs(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
      run_dirs[i] = "eps_" + csv::fixed6(eps[i]);
      fs::create_directories(dir / run_dirs[i] / "full");
      fs::create_directories(dir / run_dirs[i] / "averaged");
    }
    std::vector<ErrorRecord> results(eps.size());
    std::vector<std::exception_ptr> failures(eps.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
        Scenario sc = base;
        sc.epsilon = eps[i];
        const fs::path rd = dir / run_dirs[i];
        const std::string rp = params + ";eps=" + csv::num(eps[i]);
        sc.on_snapshot = [&, rd, rp](const FieldState& full, const FieldState& avg) {
          const std::string name = snapshot_name(full.t);
          write_snapshot(rd / "full" / name, full, sc.grid);
          write_snapshot(rd / "averaged" / name, avg, sc.grid);
          per_run[i].add("full/" + name, rp);
          per_run[i].add("averaged/" + name, rp);
        };
        results[i] = compare_full_vs_averaged(sc);
        std::ofstream e(rd / "error.csv");
        e << "t,error\n";
        for (std::size_t k = 0; k < results[i].t.size(); ++k)
          e << csv::num(results[i].t[k]) << ',' << csv::num(results[i].error[k]) << '\n';
        per_run[i].add("error.csv", rp);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);

    std::ostringstream table;
    table << "eps,error_tend,order_fit,error_max,order_fit_max\n";
    std::vector<std::pair<double, double>> tend_pts, max_pts;
    for (const ErrorRecord& r : results) {
      tend_pts.emplace_back(r.epsilon, r.error_tend);
      max_pts.emplace_back(r.epsilon, r.error_max);
      auto fit = [](const std::vector<std::pair<double, double>>& pts) {
        if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        for (const auto& q : pts)
          if (!(q.second > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return fit_scaling_order(pts);
      };
      table << csv::num(r.epsilon) << ',' << csv::num(r.error_tend) << ',' << csv::num(fit(tend_pts)) << ','
            << csv::num(r.error_max) << ',' << csv::num(fit(max_pts)) << '\n';
    }
    out << table.str();
    std::ofstream(dir / "compare.csv") << table.str();
    Manifest m;
    m.add("compare.csv", params);
    for (std::size_t i = 0; i < eps.size(); ++i) m.append(per_run[i], run_dirs[i] + "/");
    Metadata md = {{"scenario", "compare"},
                   {"pair", std::string(pair_name(base.pair))},
                   {"prep", base.prep == Prep::raw ? "raw" : "transform"},
                   {"delta", csv::num(stack.delta)},
                   {"t_end", csv::num(base.t_end)},
                   {"n", std::to_string(base.grid.size())}};
    md.insert(md.end(), audit.begin(), audit.end());
    write_metadata(dir / "metadata.csv", md);
    m.add("metadata.csv", params);
    return m;
  };
  return p;
}

inline Prepared prepare_kink_residual(const RunConfig& cfg) {
  const Variant v = variant_from(cfg);
  if (v != Variant::avg7 && v != Variant::avg9 && v != Variant::avg12)
    throw ConfigError("model", "kink-residual supports avg7, avg9 and avg12");
  const ModelSpec model = model_from(cfg, v);
  const KinkSetup k = kink_from(cfg, v, model.delta(), needs_epsilon(v) ? model.epsilon() : 1.0);
  const double dx0 = cfg.number("grid.dx", kDefaultDx);
  if (!(dx0 > 0.0)) throw ConfigError("grid.dx", "grid.dx must be positive");
  const std::size_t levels = cfg.count("residual.levels").value_or(3);
  if (levels < 1) throw ConfigError("residual.levels", "need at least one level");
  const double t_sample = cfg.number("residual.t_sample", 0.0);
  const double half_width = cfg.number(
      "grid.half_width", default_kink_half_width(kink_mass_coefficient(k.params, v)) + std::abs(kink_center(k)) +
                             std::abs(k.params.c * t_sample));
  const Solution sol = kink_solution(k.params, v);

  Prepared p;
  p.scenario = "kink-residual";
  p.writes_files = cfg.has("output_dir");
  p.out_dir = output_dir_for(cfg, p.scenario);
  p.params = cfg.describe();
  const Boundary boundary = boundary_from(cfg);
  p.execute = [=, write = p.writes_files, dir = p.out_dir, params = p.params](std::ostream& out) {
    std::ostringstream table;
    table << "dx,residual,order\n";
    double prev = std::numeric_limits<double>::quiet_NaN();
    double dx = dx0;
    for (std::size_t l = 0; l < levels; ++l, dx *= 0.5) {
      const Grid1D grid = Grid1D::centered(half_width, dx, boundary);
      const double r = residual(model, sol, grid, t_sample, grid.dx());
      const double order = l == 0 ? std::numeric_limits<double>::quiet_NaN() : std::log2(prev / r);
      table << csv::num(grid.dx()) << ',' << csv::num(r) << ',' << csv::num(order) << '\n';
      prev = r;
    }
    out << table.str();
    Manifest m;
    if (write) {
      std::ofstream(dir / "residual.csv") << table.str();
      m.add("residual.csv", params);
      Metadata md = {{"scenario", "kink-residual"}, {"model", std::string(variant_name(v))},
                     {"delta", csv::num(model.delta())}, {"c", csv::num(k.params.c)}};
      md.insert(md.end(), k.audit.begin(), k.audit.end());
      write_metadata(dir / "metadata.csv", md);
      m.add("metadata.csv", params);
    }
    return m;
  };
  return p;
}

inline Prepared prepare_dsg_audit(const RunConfig& cfg) {
  std::vector<double> deltas = cfg.numbers("audit.deltas");
  if (deltas.empty()) deltas = {0.0, 0.25, 1.0, 4.0};
  for (double d : deltas)
    if (!(d >= 0.0)) throw ConfigError("audit.deltas", "Delta must be nonnegative");
  Prepared p;
  p.scenario = "dsg-audit";
  p.out_dir = output_dir_for(cfg, p.scenario);
  p.params = cfg.describe();
  p.execute = [deltas, dir = p.out_dir, params = p.params](std::ostream& out) {
    std::ostringstream table;
    table << "delta,a,b,residual,paper_a,paper_b,paper_residual,paper_verdict\n";
    Metadata md = {{"scenario", "dsg-audit"}};
    for (double d : deltas) {
      const DsgCoefficients k = static_kink_coefficients(d);
      const auto [pa, pb] = paper_printed_dsg_coefficients(d);
      table << csv::num(d) << ',' << csv::num(k.a) << ',' << csv::num(k.b) << ',' << csv::num(k.residual) << ','
            << csv::num(pa) << ',' << csv::num(pb) << ',' << csv::num(k.paper_residual) << ','
            << (k.paper_passes ? "pass" : "fail") << '\n';
      md.emplace_back("dsg_paper_verdict_delta_" + csv::num(d), k.paper_passes ? "pass" : "fail");
    }
    out << table.str();
    std::ofstream(dir / "dsg_audit.csv") << table.str();
    write_metadata(dir / "metadata.csv", md);
    Manifest m;
    m.add("dsg_audit.csv", params);
    m.add("metadata.csv", params);
    return m;
  };
  return p;
}

inline Prepared prepare(const RunConfig& cfg, unsigned jobs = 1);

inline Prepared prepare_sweep(const RunConfig& cfg, unsigned jobs) {
  const std::string inner = cfg.str("sweep.scenario", "simulate");
  if (inner == "sweep") throw ConfigError("sweep.scenario", "sweeps cannot nest");
  const auto param = cfg.str("sweep.parameter");
  if (!param) throw ConfigError("sweep.parameter", "sweep.parameter is required");
  if (!known_config_keys().contains(*param) || param->starts_with("sweep."))
    throw ConfigError("sweep.parameter", "cannot sweep over '" + *param + "'");
  const std::vector<double> values = cfg.numbers("sweep.values");
  if (values.empty()) throw ConfigError("sweep.values", "sweep.values must list at least one value");
  if (auto j = cfg.count("sweep.jobs")) jobs = static_cast<unsigned>(*j);
  jobs = std::max(1u, jobs);

  Prepared p;
  p.scenario = "sweep";
  p.out_dir = output_dir_for(cfg, p.scenario);
  p.params = cfg.describe();
  std::vector<Prepared> runs;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunConfig rc;
    for (const auto& [k, v] : cfg.values())
      if (!k.starts_with("sweep.") && k != "scenario" && k != "output_dir") rc.set(k, v);
    rc.set("scenario", inner);
    rc.set(*param, csv::num(values[i]));
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03zu", i);
    names.emplace_back(buf);
    rc.set("output_dir", (p.out_dir / buf).string());
    runs.push_back(prepare(rc));
    runs.back().writes_files = true;
  }
  p.execute = [runs, names, jobs, dir = p.out_dir](std::ostream& out) {
    std::vector<Manifest> manifests(runs.size());
    std::vector<std::string> outputs(runs.size());
    std::vector<std::exception_ptr> failures(runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < runs.size(); i = next++) {
        try {
          fs::create_directories(runs[i].out_dir);
          std::ostringstream buf;
          manifests[i] = runs[i].execute(buf);
          manifests[i].write(runs[i].out_dir, runs[i].scenario);
          outputs[i] = buf.str();
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<std::size_t>(jobs, runs.size()); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    Manifest m;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      out << outputs[i];
      m.append(manifests[i], names[i] + "/");
    }
    for (const auto& f : failures)
      if (f) {
        m.write(dir, "sweep");
        std::rethrow_exception(f);
      }
    return m;
  };
  return p;
}

inline Prepared prepare(const RunConfig& cfg, unsigned jobs) {
  const auto scenario = cfg.str("scenario");
  if (!scenario) throw ConfigError("scenario", "scenario is required");
  if (*scenario == "delta") return prepare_delta(cfg);
  if (*scenario == "simulate") return prepare_simulate(cfg);
  if (*scenario == "compare") return prepare_compare(cfg);
  if (*scenario == "kink-residual") return prepare_kink_residual(cfg);
  if (*scenario == "dsg-audit") return prepare_dsg_audit(cfg);
  if (*scenario == "sweep") return prepare_sweep(cfg, jobs);
  throw ConfigError("scenario", "unknown scenario '" + *scenario + "'");
}

inline std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

/// Validates, executes and writes manifest.csv. Errors are reported on `err`
/// as one line `error_code,field,message`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err, unsigned jobs = 1) {
  Prepared p;
  try {
    p = prepare(cfg, jobs);
  } catch (const ConfigError& e) {
    err << "validation," << e.field() << ',' << sanitize(e.what()) << '\n';
    return kValidation;
  } catch (const ContractViolation& e) {
    err << "validation,config," << sanitize(e.what()) << '\n';
    return kValidation;
  } catch (const OracleFailure& e) {
    err << "oracle,dsg_coeffs," << sanitize(e.what()) << '\n';
    return kOracle;
  }
  try {
    if (p.writes_files) fs::create_directories(p.out_dir);
    const Manifest m = p.execute(out);
    if (p.writes_files) m.write(p.out_dir, p.scenario);
  } catch (const BlowUpError& e) {
    err << "blowup,t=" << csv::num(e.time()) << ',' << sanitize(e.what()) << '\n';
    return kBlowUp;
  } catch (const TrackingError& e) {
    err << "tracking,t=" << csv::num(e.time()) << ',' << sanitize(e.what()) << '\n';
    return kBlowUp;
  } catch (const OracleFailure& e) {
    err << "oracle,dsg_coeffs," << sanitize(e.what()) << '\n';
    return kOracle;
  } catch (const ConfigError& e) {
    err << "validation," << e.field() << ',' << sanitize(e.what()) << '\n';
    return kValidation;
  }
  return kOk;
}

}  // namespace sgavg::app

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "horizonforge/bartnik.hpp"
#include "horizonforge/base.hpp"
#include "horizonforge/checks.hpp"
#include "horizonforge/collar.hpp"
#include "horizonforge/flow.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/io.hpp"
#include "horizonforge/paths.hpp"
#include "horizonforge/schwarzschild.hpp"
#include "horizonforge/smoothing.hpp"
#include "horizonforge/spectral.hpp"
#include "json.hpp"

using namespace hf;
using ordered_json = nlohmann::ordered_json;

namespace {

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    io::write_file(path, content);
}

geom::WarpedMetric load_metric(const std::string& path) {
  return io::to_metric(io::deserialize(io::read_file(path)));
}

schw::PlanarProfile load_planar(const std::string& path) {
  return io::to_planar(io::deserialize(io::read_file(path)));
}

std::string lambda1_json(const spectral::SpectralResult& r) {
  ordered_json j;
  j["lambda1"] = r.lambda1;
  j["k"] = r.k;
  j["eigenfunction"] = r.eigenfunction;
  j["residual"] = r.residual;
  return j.dump(2) + "\n";
}

int run_checks_and_report(const std::vector<checks::CheckResult>& results,
                          const std::string& out) {
  emit(out, checks::format_report(results));
  return checks::all_pass(results) ? 0 : 1;
}

struct CommonArgs {
  std::string metric, out;
  bool check = false;
  double k = 0.5;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"horizonforge: warped-product scalar-curvature toolkit"};
  app.require_subcommand(1);

  // lambda1
  auto* c_lam = app.add_subcommand("lambda1", "principal eigenvalue of -Lap + kR");
  CommonArgs lam;
  c_lam->add_option("--metric", lam.metric, "profile JSON")->required();
  c_lam->add_option("--k", lam.k, "coupling");
  c_lam->add_option("--out", lam.out, "output JSON path (default stdout)");
  c_lam->add_flag("--check", lam.check, "run the spectral invariant suite");

  // geometry
  auto* c_geo = app.add_subcommand("geometry", "curvature quantities of a profile");
  CommonArgs geo;
  c_geo->add_option("--metric", geo.metric)->required();
  c_geo->add_option("--out", geo.out);
  c_geo->add_flag("--check", geo.check);

  // path
  auto* c_path = app.add_subcommand("path", "metric paths and isotopies");
  std::string path_kind = "yamabe", path_metric, path_factor, path_out;
  double path_t = 1.0, path_theta = 0.0, path_mu = 1.0;
  bool path_check = false;
  c_path->add_option("--kind", path_kind, "conformal2d | yamabe | isotopy");
  c_path->add_option("--metric", path_metric)->required();
  c_path->add_option("--factor", path_factor, "document with u samples (conformal2d)");
  c_path->add_option("--t", path_t);
  c_path->add_option("--theta", path_theta);
  c_path->add_option("--mu", path_mu);
  c_path->add_option("--out", path_out);
  c_path->add_flag("--check", path_check);

  // collar
  auto* c_col = app.add_subcommand("collar", "monotone PSC almost-cobordance");
  std::string col_left, col_right, col_out;
  double col_k = 0.5, col_eps = 0.0;
  int col_samples = 33;
  bool col_minimal = false, col_check = false, col_left_deg = false;
  c_col->add_option("--left", col_left)->required();
  c_col->add_option("--right", col_right)->required();
  c_col->add_option("--k", col_k);
  c_col->add_option("--epsilon", col_eps);
  c_col->add_option("--t-samples", col_samples);
  c_col->add_flag("--minimal", col_minimal, "minimal-slice collar variant");
  c_col->add_flag("--left-degenerate", col_left_deg);
  c_col->add_option("--out", col_out);
  c_col->add_flag("--check", col_check);

  // glue
  auto* c_glue = app.add_subcommand("glue", "refined gluing of phase-plane profiles");
  std::string glue_p1, glue_p2, glue_out;
  bool glue_check = false;
  c_glue->add_option("--p1", glue_p1)->required();
  c_glue->add_option("--p2", glue_p2)->required();
  c_glue->add_option("--out", glue_out);
  c_glue->add_flag("--check", glue_check);

  // bend
  auto* c_bend = app.add_subcommand("bend", "bend-and-glue two Schwarzschild exteriors");
  double bm1 = 0.0, bm2 = 0.0, brho1 = 0.0, brho2 = 0.0, bxout = 0.0;
  int bn = 2;
  std::string bend_out;
  bool bend_check = false;
  c_bend->add_option("--m1", bm1)->required();
  c_bend->add_option("--m2", bm2)->required();
  c_bend->add_option("--rho1", brho1)->required();
  c_bend->add_option("--rho2", brho2)->required();
  c_bend->add_option("--n", bn);
  c_bend->add_option("--x-out", bxout);
  c_bend->add_option("--out", bend_out);
  c_bend->add_flag("--check", bend_check);

  // bartnik-sequence
  auto* c_bart = app.add_subcommand("bartnik-sequence", "minimizing sequence masses");
  std::string bart_horizon, bart_out;
  int bart_count = 12, jobs = 1;
  bool bart_check = false;
  c_bart->add_option("--horizon", bart_horizon)->required();
  c_bart->add_option("--eps-count", bart_count);
  c_bart->add_option("--out", bart_out);
  c_bart->add_option("--jobs", jobs, "parallel independent epsilon runs");
  c_bart->add_flag("--check", bart_check);

  // smooth
  auto* c_sm = app.add_subcommand("smooth", "cutoffs, C-normal deformation, barriers");
  std::string sm_op = "cutoff", sm_kind = "log", sm_metric, sm_out;
  double sm_a = 0.1, sm_b = 0.5, sm_C = 1e-3, sm_eta = 1e-2, sm_window = 0.3,
         sm_k = 0.0, sm_eps1 = 0.04, sm_mass = 1.0, sm_x0 = 10.0, sm_depth = 0.5;
  bool sm_check = false;
  c_sm->add_option("--op", sm_op, "cutoff | cnormal | sff | barrier");
  c_sm->add_option("--kind", sm_kind, "log | chi (cutoff); harmonic | torsion (barrier)");
  c_sm->add_option("--metric", sm_metric, "annulus for --op barrier");
  c_sm->add_option("--a", sm_a, "delta (log) or eps1 (chi)");
  c_sm->add_option("--b", sm_b, "eps (log cutoff)");
  c_sm->add_option("--C", sm_C);
  c_sm->add_option("--eta", sm_eta);
  c_sm->add_option("--window", sm_window);
  c_sm->add_option("--k-target", sm_k);
  c_sm->add_option("--eps1", sm_eps1);
  c_sm->add_option("--mass", sm_mass);
  c_sm->add_option("--x0", sm_x0);
  c_sm->add_option("--depth", sm_depth);
  c_sm->add_option("--out", sm_out);
  c_sm->add_flag("--check", sm_check);

  // flow
  auto* c_flow = app.add_subcommand("flow", "rotationally symmetric Ricci flow on S^3");
  std::string flow_metric, flow_out;
  double flow_dt = 1.0, flow_T = 0.05, flow_k = 0.25;
  int flow_monitor = 10;
  bool flow_check = false;
  c_flow->add_option("--metric", flow_metric)->required();
  c_flow->add_option("--dt", flow_dt, "maximum step");
  c_flow->add_option("--T", flow_T)->required();
  c_flow->add_option("--k", flow_k);
  c_flow->add_option("--monitor-every", flow_monitor);
  c_flow->add_option("--out", flow_out);
  c_flow->add_flag("--check", flow_check);

  // check
  auto* c_check = app.add_subcommand("check", "run invariant suites");
  std::string check_metric, check_out;
  c_check->add_option("--metric", check_metric, "optional profile to check");
  c_check->add_option("--out", check_out);

  // run (config-driven pipeline)
  auto* c_run = app.add_subcommand("run", "config-driven pipeline");
  std::string run_config;
  c_run->add_option("--config", run_config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help
    ordered_json err;
    err["error"] = e.what();
    err["code"] = 2;
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    if (*c_lam) {
      auto m = load_metric(lam.metric);
      if (lam.check)
        return run_checks_and_report(checks::metric_checks(m, lam.k), lam.out);
      emit(lam.out, lambda1_json(spectral::lambda1(m, lam.k)));
    } else if (*c_geo) {
      auto m = load_metric(geo.metric);
      if (geo.check)
        return run_checks_and_report(checks::metric_checks(m, 0.5), geo.out);
      if (m.kind == geom::MetricKind::tube) {
        auto g = geom::tube_geometry(m);
        emit(geo.out, io::to_csv({"t", "R", "H", "sff_coeff", "sff_norm_sq"},
                                 {m.grid.samples(), g.R, g.H, g.sff_coeff,
                                  g.sff_norm_sq}));
      } else {
        auto R = geom::warped_closed_scalar(m);
        emit(geo.out, io::to_csv({"rho", "R"}, {m.grid.samples(), R}));
      }
    } else if (*c_path) {
      auto m = load_metric(path_metric);
      if (path_kind == "yamabe") {
        auto g = paths::yamabe_contraction_path(m, path_t);
        emit(path_out, io::serialize(io::from_metric(g)));
      } else if (path_kind == "conformal2d") {
        auto fac = io::deserialize(io::read_file(path_factor));
        std::vector<double> f(m.grid.points, 1.0);
        auto res = paths::conformal_path_2d(m, fac.values, path_t, f);
        if (path_check) {
          std::printf("affine deviation %s\n",
                      io::format_double(res.check.affine_deviation).c_str());
        }
        emit(path_out, io::serialize(io::from_metric(res.metric)));
      } else if (path_kind == "isotopy") {
        auto res = paths::round_isotopy(m, path_theta, path_mu);
        emit(path_out, io::to_csv({"t", "f_mu", "h_mu"},
                                  {m.grid.samples(), res.f_mu, res.h_mu}));
      } else {
        throw ValidationError("path: unknown --kind " + path_kind);
      }
    } else if (*c_col) {
      auto gL = load_metric(col_left);
      auto gR = load_metric(col_right);
      if (col_check) {
        auto r1 = checks::metric_checks(gL, col_k);
        auto r2 = checks::metric_checks(gR, col_k);
        r1.insert(r1.end(), r2.begin(), r2.end());
        return run_checks_and_report(r1, col_out);
      }
      auto path = paths::profile_path(gL, gR, col_samples);
      collar::CollarBuild b =
          col_minimal ? collar::build_minimal_collar(path, col_k)
                      : collar::build_mean_convex_collar(
                            path, col_k, col_eps > 0 ? col_eps : 1e-3,
                            col_left_deg, false);
      ordered_json rep;
      rep["A"] = b.A;
      rep["epsilon"] = b.epsilon;
      rep["min_R"] = b.report.min_R;
      rep["min_R_location"] = {b.report.min_R_x, b.report.min_R_t};
      rep["left_minimal"] = b.report.left_minimal;
      rep["right_H_sign"] = b.report.right_H_sign;
      std::cout << rep.dump(2) << "\n";
      if (!col_out.empty()) emit(col_out, io::serialize(io::from_collar(b.collar)));
    } else if (*c_glue) {
      auto p1 = load_planar(glue_p1);
      auto p2 = load_planar(glue_p2);
      if (glue_check) {
        auto r1 = checks::planar_checks(p1);
        auto r2 = checks::planar_checks(p2);
        r1.insert(r1.end(), r2.begin(), r2.end());
        return run_checks_and_report(r1, glue_out);
      }
      auto merged = schw::glue_profiles(p1, p2);
      emit(glue_out, io::serialize(io::from_planar(merged)));
    } else if (*c_bend) {
      auto p = schw::bend_and_glue(bm1, bm2, brho1, brho2, bn, bxout);
      if (bend_check)
        return run_checks_and_report(checks::planar_checks(p), bend_out);
      emit(bend_out, io::serialize(io::from_planar(p)));
    } else if (*c_bart) {
      auto horizon = load_metric(bart_horizon);
      if (bart_check)
        return run_checks_and_report(checks::metric_checks(horizon, 0.5), bart_out);
      std::vector<double> eps;
      for (int i = 1; i <= bart_count; ++i) eps.push_back(std::pow(2.0, -i));
      std::vector<bartnik::Extension> seq(eps.size());
      if (jobs <= 1) {
        seq = bartnik::minimizing_sequence(horizon, eps);
      } else {
        // independent epsilon runs fan out; results keep input order
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        std::vector<std::string> errors(eps.size());
        for (int w = 0; w < jobs; ++w)
          pool.emplace_back([&] {
            for (int i = next++; i < int(eps.size()); i = next++) {
              try {
                auto one = bartnik::minimizing_sequence(horizon, {eps[i]});
                seq[i] = std::move(one.front());
              } catch (const std::exception& e) {
                errors[i] = e.what();
              }
            }
          });
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
          if (!e.empty()) throw ConvergenceError(e);
      }
      std::vector<double> idx, epsc, mass, minR, minM;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        idx.push_back(double(i + 1));
        epsc.push_back(seq[i].epsilon);
        mass.push_back(seq[i].mass);
        minR.push_back(seq[i].min_R);
        minM.push_back(seq[i].min_psc_margin);
      }
      emit(bart_out, io::to_csv({"i", "epsilon", "mass", "min_R", "min_psc_margin"},
                                {idx, epsc, mass, minR, minM}));
    } else if (*c_sm) {
      if (sm_check) {
        std::vector<checks::CheckResult> rs;
        auto lc = smoothing::build_cutoff(smoothing::CutoffKind::log_cutoff,
                                          0.1, 0.5);
        double worst = 0.0;
        for (int i = 0; i < lc.grid.points; ++i)
          worst = std::max(worst,
                           lc.grid.x(i) * std::abs(lc.d1[i]) * std::log(10.0));
        checks::CheckResult r;
        r.name = "log cutoff derivative bound";
        r.pass = worst <= 2.0 + 1e-12;
        r.detail = io::format_double(worst) + " vs bound 2";
        rs.push_back(r);
        return run_checks_and_report(rs, sm_out);
      }
      if (sm_op == "cutoff") {
        auto kind = sm_kind == "chi" ? smoothing::CutoffKind::chi
                                     : smoothing::CutoffKind::log_cutoff;
        auto f = smoothing::build_cutoff(kind, sm_a, sm_b);
        emit(sm_out, io::to_csv({"t", "value", "d1", "d2"},
                                {f.grid.samples(), f.value, f.d1, f.d2}));
      } else if (sm_op == "cnormal" || sm_op == "sff") {
        auto collarband = smoothing::schwarzschild_boundary_collar(
            sm_mass, sm_x0, 2, sm_depth, 4097);
        auto res = smoothing::make_c_normal(collarband, sm_C, sm_eta, sm_window);
        if (sm_op == "sff") {
          auto pres = smoothing::prescribe_sff(res, sm_k, sm_eta, sm_eps1);
          emit(sm_out, io::to_csv({"t", "G"}, {pres.deformed.t, pres.deformed.G}));
        } else {
          emit(sm_out, io::to_csv({"t", "G"}, {res.deformed.t, res.deformed.G}));
        }
      } else if (sm_op == "barrier") {
        auto ann = load_metric(sm_metric);
        auto mode = sm_kind == "torsion" ? smoothing::BarrierMode::torsion
                                         : smoothing::BarrierMode::harmonic;
        auto res = smoothing::radial_conformal_barrier(ann, mode);
        emit(sm_out, io::to_csv({"t", "value", "laplacian"},
                                {ann.grid.samples(), res.value, res.laplacian}));
      } else {
        throw ValidationError("smooth: unknown --op " + sm_op);
      }
    } else if (*c_flow) {
      auto m = load_metric(flow_metric);
      flow::FlowOptions opts;
      opts.k = flow_k;
      opts.monitor_every = flow_monitor;
      auto traj = flow::evolve(m, flow_dt, flow_T, opts);
      std::vector<double> rmax;
      for (const auto& st : traj.states)
        rmax.push_back(*std::max_element(st.profile.begin(), st.profile.end()));
      emit(flow_out, io::to_csv({"t", "r_max", "lambda1", "volume"},
                                {traj.times, rmax, traj.lambda1_series,
                                 traj.volume_series}));
      if (flow_check) {
        auto rep = flow::monotonicity_report(traj);
        std::printf("dlambda1/dt strictly positive: %s\n",
                    rep.strictly_positive ? "yes" : "no");
      }
    } else if (*c_check) {
      if (!check_metric.empty())
        return run_checks_and_report(
            checks::metric_checks(load_metric(check_metric), 0.5), check_out);
      return run_checks_and_report(checks::full_suite(), check_out);
    } else if (*c_run) {
      auto cfg = io::parse_run_config(io::read_file(run_config));
      Tolerances tol = Tolerances::defaults();
      for (const auto& [key, val] : cfg.tolerances)
        tol = Tolerances::parse(key + "=" + io::format_double(val), tol);
      if (cfg.command == "lambda1") {
        auto m = load_metric(cfg.inputs.at("metric"));
        double k = cfg.params.count("k") ? cfg.params.at("k") : 0.5;
        std::string out = cfg.outputs.count("json") ? cfg.outputs.at("json") : "";
        emit(out, lambda1_json(spectral::lambda1(m, k, tol)));
      } else if (cfg.command == "check") {
        std::string out = cfg.outputs.count("report") ? cfg.outputs.at("report") : "";
        return run_checks_and_report(checks::full_suite(tol), out);
      } else {
        throw ValidationError("run: unsupported command '" + cfg.command + "'");
      }
    }
  } catch (const ValidationError& e) {
    ordered_json err;
    err["error"] = e.what();
    err["code"] = 2;
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    ordered_json err;
    err["error"] = e.what();
    err["code"] = 3;
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = e.what();
    err["code"] = 3;
    std::cerr << err.dump() << "\n";
    return 3;
  }
  return 0;
}

// fringemag command-line tool.
//
// Exit codes: 0 success, 1 usage, 2 configuration or invalid input values,
// 3 numerical failure, 4 file or data I/O, 5 fit did not converge.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fringemag/config.hpp"
#include "fringemag/constants.hpp"
#include "fringemag/csv.hpp"
#include "fringemag/errors.hpp"
#include "fringemag/fit.hpp"
#include "fringemag/recipes.hpp"

namespace fm = fringemag;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kNumerical = 3, kIo = 4, kFit = 5 };

struct Abscissa {
  std::optional<double> current;   // A
  std::optional<double> distance;  // m
  std::optional<double> gradient;  // T/m

  void add_to(CLI::App& cmd) {
    cmd.add_option("--current", current, "Coil current in A");
    cmd.add_option("--distance", distance, "Magnet distance in m");
    cmd.add_option("--gradient", gradient, "Background gradient in T/m");
  }

  // Value for the configured source, or nullopt if none was given.
  std::optional<double> for_source(fm::SourceKind kind) const {
    const int given = current.has_value() + distance.has_value() + gradient.has_value();
    if (given > 1)
      throw CLI::ValidationError("give at most one of --current, --distance, --gradient");
    const auto& wanted = kind == fm::SourceKind::Coils    ? current
                         : kind == fm::SourceKind::Magnet ? distance
                                                          : gradient;
    if (given == 1 && !wanted) {
      throw CLI::ValidationError("a " + std::string(fm::to_string(kind)) +
                                 " source is swept by --" +
                                 (kind == fm::SourceKind::Coils    ? "current"
                                  : kind == fm::SourceKind::Magnet ? "distance"
                                                                   : "gradient"));
    }
    return wanted;
  }
};

struct Options {
  int threads = 1;
  std::string config;
  std::optional<double> background_gradient;
  std::string out;
};

fm::RunConfig load(const Options& o) {
  fm::RunConfig cfg = fm::load_config(o.config);
  if (o.background_gradient) cfg.background_gradient = *o.background_gradient;
  return cfg;
}

void emit(const json& report) { std::cout << report.dump(2) << '\n'; }

double single_abscissa(const fm::RunConfig& cfg, const Abscissa& a) {
  if (const auto value = a.for_source(cfg.source)) return *value;
  if (cfg.sweep.values.size() == 1) return cfg.sweep.values.front();
  throw CLI::ValidationError("this command needs --current, --distance or --gradient");
}

fm::Vec3 parse_point(const std::vector<double>& v) {
  if (v.size() != 3) throw CLI::ValidationError("points take three comma-separated coordinates");
  return {v[0], v[1], v[2]};
}

// ---------------------------------------------------------------------------

int run_field_map(const Options& o, const Abscissa& a, const std::vector<double>& from,
                  const std::vector<double>& to, int points) {
  const fm::Experiment experiment(load(o));
  const double x = single_abscissa(experiment.config(), a);
  const fm::FieldSource source = experiment.source_at(x);
  if (points < 2) throw CLI::ValidationError("--points must be at least 2");

  fm::Vec3 start;
  fm::Vec3 end;
  if (from.empty() != to.empty()) throw CLI::ValidationError("--from and --to go together");
  if (from.empty()) {
    const fm::Trajectory t = experiment.trajectory(fm::ForceKind::Permanent);
    start = t.at(0.0);
    end = t.at(t.length);
  } else {
    start = parse_point(from);
    end = parse_point(to);
  }

  fm::Table table;
  table.header = {"x_m", "y_m", "z_m", "Bx_T", "By_T", "Bz_T", "B_T"};
  table.columns.resize(table.header.size());
  for (int i = 0; i < points; ++i) {
    const fm::Vec3 p = start + (end - start) * (static_cast<double>(i) / (points - 1));
    const fm::Vec3 B = fm::field(source, p);
    const double row[] = {p.x(), p.y(), p.z(), B.x(), B.y(), B.z(), B.norm()};
    for (std::size_t j = 0; j < table.columns.size(); ++j) table.columns[j].push_back(row[j]);
  }
  table.metadata["source"] = std::string(fm::to_string(experiment.config().source));
  if (o.out.empty()) {
    std::cout << fm::format_table(table);
  } else {
    fm::write_table(o.out, table);
  }
  return kOk;
}

int run_c_factor(const Options& o, const Abscissa& a, const std::string& profile_path) {
  const fm::Experiment experiment(load(o));
  const auto& cfg = experiment.config();
  const double x = single_abscissa(cfg, a);
  json report;
  report["abscissa"] = {{"name", cfg.sweep.label()}, {"value", x}};
  if (cfg.source == fm::SourceKind::Background) {
    const double c = fm::background_c(cfg.geometry, x);
    report["permanent"] = {{"T_m", c}, {"G_m", c / fm::constants::gauss}};
  } else {
    const fm::FieldSource source = experiment.source_at(x);
    const auto permanent = fm::c_factor(source, experiment.trajectory(fm::ForceKind::Permanent),
                                        cfg.geometry, fm::ForceKind::Permanent);
    report["permanent"] = {{"T_m", permanent.value},
                           {"G_m", permanent.value / fm::constants::gauss},
                           {"nodes", permanent.nodes},
                           {"error_estimate", permanent.error_estimate}};
    const auto induced = fm::c_factor(source, experiment.trajectory(fm::ForceKind::Induced),
                                      cfg.induced_geometry, fm::ForceKind::Induced);
    report["induced"] = {{"T2_m", induced.value},
                         {"nodes", induced.nodes},
                         {"error_estimate", induced.error_estimate}};
    if (!profile_path.empty()) fm::write_profile(profile_path, experiment.profile(x, 301));
  }
  report["background"] = {{"gradient_T_per_m", cfg.background_gradient},
                          {"C0_T_m", fm::background_c(cfg.geometry, cfg.background_gradient)}};
  emit(report);
  return kOk;
}

int run_visibility(const Options& o, const Abscissa& a, std::optional<double> v0) {
  const fm::Experiment experiment(load(o));
  const auto& cfg = experiment.config();
  if (const auto x = a.for_source(cfg.source)) {
    const fm::CurveModel model = experiment.curve_model();
    const fm::CPair c = model.c_factors(*x);
    const double v = model.predict(c, {});
    json report = {{"species", cfg.species.name},
                   {"model", fm::describe(cfg.species.response)},
                   {"abscissa", {{"name", cfg.sweep.label()}, {"value", *x}}},
                   {"c_permanent_T_m", c.permanent},
                   {"c_induced_T2_m", c.induced},
                   {"v_over_v0", v}};
    if (v0) report["visibility"] = *v0 * v;
    emit(report);
    return kOk;
  }
  const fm::VisibilityCurve curve = experiment.sweep(o.threads);
  const std::string path = !o.out.empty() ? o.out : cfg.output_curve;
  if (path.empty() || path == "-") {
    std::cout << fm::format_table(fm::curve_table(curve, v0));
  } else {
    fm::write_curve(path, curve, v0);
    std::cerr << "wrote " << curve.abscissa.size() << " points to " << path << '\n';
  }
  return kOk;
}

int run_fringe_fit(const std::string& input, double dark_rate, double period, bool plain,
                   int max_iter) {
  fm::FringeScan scan = fm::read_fringe_scan(input);
  scan.dark_rate = dark_rate;
  scan.period = period;
  const fm::FringeFitResult r = fm::fit_fringe(scan, !plain, max_iter);
  const json report = {{"method", plain ? "least_squares" : "bisquare"},
                       {"points", scan.positions.size()},
                       {"offset", r.offset},
                       {"offset_se", r.offset_se},
                       {"amplitude", r.amplitude},
                       {"amplitude_se", r.amplitude_se},
                       {"phase_rad", r.phase},
                       {"phase_se", r.phase_se},
                       {"visibility", r.visibility},
                       {"visibility_se", r.visibility_se},
                       {"clamped", r.clamped},
                       {"valid", r.valid},
                       {"iterations", r.iterations}};
  emit(report);
  return kOk;
}

fm::FitParam parse_param(const std::string& name) {
  for (const auto p : {fm::FitParam::BackgroundGradient, fm::FitParam::MuEff, fm::FitParam::V0,
                       fm::FitParam::ChiM}) {
    if (fm::to_string(p) == name) return p;
  }
  throw CLI::ValidationError("unknown fit parameter '" + name + "'");
}

int run_fit(const Options& o, const std::string& data_path, const std::vector<std::string>& free,
            const std::string& optimizer, const std::string& residuals_path, bool no_normalize) {
  const fm::Experiment experiment(load(o));
  const auto& cfg = experiment.config();
  fm::Dataset data = fm::read_dataset(data_path);

  fm::FitOptions options;
  options.free = cfg.fit.free;
  if (!free.empty()) {
    options.free.clear();
    for (const auto& name : free) options.free.push_back(parse_param(name));
  }
  options.optimizer = cfg.fit.optimizer;
  if (optimizer == "gauss_newton") options.optimizer = fm::Optimizer::GaussNewton;
  if (optimizer == "nelder_mead") options.optimizer = fm::Optimizer::NelderMead;
  options.max_evaluations = cfg.fit.max_evaluations;

  json report;
  const bool v0_free =
      std::find(options.free.begin(), options.free.end(), fm::FitParam::V0) != options.free.end();
  if (cfg.asymptote_window && !v0_free && !no_normalize) {
    const auto& manifold = std::get<fm::Hyperfine>(cfg.species.response.value).manifold;
    const fm::Normalization n = fm::normalize_to_asymptote(data, manifold, *cfg.asymptote_window);
    data = n.data;
    report["normalization"] = {
        {"v0", n.v0}, {"window", {cfg.asymptote_window->first, cfg.asymptote_window->second}}};
  }
  if (data.sigma_defaulted) report["warning"] = "sigma column missing; unit uncertainties assumed";

  const fm::CurveModel model = experiment.curve_model();
  const fm::FitResult r = fm::fit_visibility_params(data, model, options, o.threads);
  for (std::size_t j = 0; j < r.params.size(); ++j) {
    report["parameters"][std::string(fm::to_string(r.params[j]))] = {
        {"value", r.values[j]}, {"std_error", r.std_errors[j]}};
  }
  report["covariance"] = r.covariance;
  report["chi2"] = r.chi2;
  report["reduced_chi2"] = r.reduced_chi2;
  report["dof"] = r.dof;
  report["evaluations"] = r.evaluations;
  report["optimizer"] =
      options.optimizer == fm::Optimizer::NelderMead ? "nelder_mead" : "gauss_newton";
  if (!residuals_path.empty()) fm::write_residuals(residuals_path, data, r);
  emit(report);
  return kOk;
}

int run_reproduce(const Options& o, const std::string& figure, const std::string& out_dir) {
  const fm::Reproduction rep = fm::reproduce(figure, o.threads);
  const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw fm::IoError("cannot create output directory '" + dir.string() + "'");
  json report;
  report["figure"] = rep.figure;
  for (const auto& c : rep.curves) {
    const auto path = dir / (c.name + ".csv");
    fm::write_curve(path, c.curve);
    report["curves"].push_back(
        {{"name", c.name}, {"path", path.string()}, {"points", c.curve.abscissa.size()}});
  }
  emit(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic deflection of matter-wave interference fringes"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "Worker threads for sweeps and fits")
      ->check(CLI::Range(1, 256));

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", o.config, "Config file or bundled config name")->required();
    cmd->add_option("--background-gradient", o.background_gradient,
                    "Override the background gradient (T/m)");
  };

  Abscissa abscissa;
  std::vector<double> from;
  std::vector<double> to;
  int points = 101;
  auto* field_map = app.add_subcommand("field-map", "Field along a line, as CSV");
  add_config(field_map);
  abscissa.add_to(*field_map);
  field_map->add_option("--from", from, "Start point x,y,z in m (default: trajectory)")
      ->delimiter(',');
  field_map->add_option("--to", to, "End point x,y,z in m")->delimiter(',');
  field_map->add_option("--points", points, "Number of samples");
  field_map->add_option("-o,--out", o.out, "Output CSV (default: stdout)");

  std::string profile_path;
  auto* c_factor = app.add_subcommand("c-factor", "C-factors at one current or distance");
  add_config(c_factor);
  abscissa.add_to(*c_factor);
  c_factor->add_option("--profile", profile_path, "Also write the force profile along the path");

  std::optional<double> v0;
  auto* visibility = app.add_subcommand("visibility", "V/V0 at one point or over the config sweep");
  add_config(visibility);
  abscissa.add_to(*visibility);
  visibility->add_option("--v0", v0, "Add absolute visibilities V0 * V/V0");
  visibility->add_option("-o,--out", o.out,
                         "Output CSV, - for stdout (default: config output.curve or stdout)");

  std::string scan_path;
  double dark_rate = 0.0;
  double period = 266e-9;
  bool plain = false;
  int max_iter = 50;
  auto* fringe_fit = app.add_subcommand("fringe-fit", "Sinusoid fit of one fringe scan");
  fringe_fit->add_option("input", scan_path, "CSV with position and counts columns")->required();
  fringe_fit->add_option("--dark-rate", dark_rate, "Dark counts per sample");
  fringe_fit->add_option("--period", period, "Grating period in m");
  fringe_fit->add_flag("--plain", plain, "Plain least squares instead of bisquare");
  fringe_fit->add_option("--max-iter", max_iter, "Reweighting iterations");

  std::string data_path;
  std::vector<std::string> free;
  std::string optimizer;
  std::string residuals_path;
  bool no_normalize = false;
  auto* fit = app.add_subcommand("fit", "Fit model parameters to a visibility dataset");
  add_config(fit);
  fit->add_option("-d,--data", data_path, "Dataset CSV")->required();
  fit->add_option("--free", free, "Free parameters: background_gradient, mu_eff, v0, chi_m")
      ->delimiter(',');
  fit->add_option("--optimizer", optimizer, "nelder_mead or gauss_newton")
      ->check(CLI::IsMember({"nelder_mead", "gauss_newton"}));
  fit->add_option("--residuals", residuals_path, "Write data, model and residuals");
  fit->add_flag("--no-normalize", no_normalize, "Skip asymptote normalization");

  std::string figure;
  std::string out_dir;
  auto* reproduce =
      app.add_subcommand("reproduce", "Theory curves of a figure from bundled configs");
  reproduce->add_option("figure", figure, "Figure id")
      ->required()
      ->check(CLI::IsMember(fm::figure_ids()));
  reproduce->add_option("--out-dir", out_dir, "Directory for the CSV files");

  try {
    app.parse(argc, argv);
    if (*field_map) return run_field_map(o, abscissa, from, to, points);
    if (*c_factor) return run_c_factor(o, abscissa, profile_path);
    if (*visibility) return run_visibility(o, abscissa, v0);
    if (*fringe_fit) return run_fringe_fit(scan_path, dark_rate, period, plain, max_iter);
    if (*fit) return run_fit(o, data_path, free, optimizer, residuals_path, no_normalize);
    if (*reproduce) return run_reproduce(o, figure, out_dir);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const fm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fm::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const fm::FitError& e) {
    std::cerr << "fit failed: " << e.what() << '\n';
    return kFit;
  } catch (const fm::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kIo;
  } catch (const fm::Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

#pragma once

// Parameter extraction: sinusoid fits of raw fringe scans, asymptote
// normalization and least-squares fits of visibility responses.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fringemag/curve_model.hpp"
#include "fringemag/species.hpp"

namespace fringemag {

// ---------------------------------------------------------------------------
// Fringe scans

struct FringeScan {
  std::vector<double> positions;  // m, transverse grating position
  std::vector<double> counts;
  double dark_rate = 0.0;  // counts per sample, subtracted before fitting
  double period = 266e-9;  // m

  void validate() const;
};

struct FringeFitResult {
  double offset = 0.0;     // counts
  double amplitude = 0.0;  // counts, >= 0
  double phase = 0.0;      // rad, fit is c + a sin(2 pi x / d + phase)
  double visibility = 0.0;
  double offset_se = 0.0;
  double amplitude_se = 0.0;
  double phase_se = 0.0;
  double visibility_se = 0.0;
  bool clamped = false;         // visibility was forced into [0, 1]
  bool valid = false;           // offset > 0
  int iterations = 0;           // reweighting passes (0 for plain least squares)
  std::vector<double> weights;  // final robust weights, all 1 for plain fits
};

/// Least-squares fit of c + b1 sin(kx) + b2 cos(kx) to dark-subtracted counts.
/// With `robust`, iteratively reweighted with Tukey bisquare weights (tuning
/// constant 4.685 times the MAD scale) until no weight moves by more than 1e-8.
/// Requires >= 6 points spanning at least one period.
FringeFitResult fit_fringe(const FringeScan& scan, bool robust = true, int max_iter = 50);

// ---------------------------------------------------------------------------
// Visibility datasets

struct Dataset {
  std::string abscissa_label = "current_A";
  std::vector<double> abscissa;
  std::vector<double> visibility;
  std::vector<double> sigma;
  bool sigma_defaulted = false;  // sigma column was missing and set to 1
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return abscissa.size(); }
  void validate() const;
};

struct Normalization {
  double v0 = 0.0;
  Dataset data;  // visibility and sigma divided by v0
};

/// V0 = N * mean(V in window) / 2 for a manifold with exactly two zero-moment
/// states; the window is inclusive.
Normalization normalize_to_asymptote(const Dataset& data, const HyperfineManifold& manifold,
                                     std::pair<double, double> window);

// ---------------------------------------------------------------------------
// Visibility response fits

enum class FitParam { BackgroundGradient, MuEff, V0, ChiM };

std::string_view to_string(FitParam param);

enum class Optimizer { NelderMead, GaussNewton };

struct ParamSetting {
  double seed = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double step = 0.0;  // initial simplex step and scale of the parameter
};

/// Default seed, bounds and scale; seeds follow the documented convention
/// (gradient 0, mu_eff 0.05 mu_B, V0 = largest datum).
ParamSetting default_setting(FitParam param, const Dataset& data);

struct FitOptions {
  std::vector<FitParam> free;
  std::map<FitParam, ParamSetting> settings;  // overrides of default_setting
  ModelOverrides fixed;                       // values of parameters that are not free
  double fixed_v0 = 1.0;
  Optimizer optimizer = Optimizer::NelderMead;
  int max_evaluations = 2000;
  double tolerance = 1e-10;  // on chi^2 (relative) and the scaled simplex size
  bool throw_on_failure = true;
};

struct FitResult {
  std::vector<FitParam> params;
  std::vector<double> values;
  std::vector<double> std_errors;
  std::vector<std::vector<double>> covariance;
  double chi2 = 0.0;
  double reduced_chi2 = 0.0;
  int dof = 0;
  int evaluations = 0;
  bool converged = false;
  bool at_bound = false;
  std::vector<double> chi2_history;  // best chi^2 after each iteration
  std::vector<double> model;         // V_model at the data abscissae
  std::vector<double> residuals;     // (model - data) / sigma

  double value(FitParam param) const;
  double std_error(FitParam param) const;
};

/// Minimizes sum(((V0 * V_model - V_data) / sigma)^2) over the free
/// parameters. Throws FitError when under-determined and, with
/// throw_on_failure, when the optimizer does not converge or ends on a bound.
FitResult fit_visibility_params(const Dataset& data, const CurveModel& model,
                                const FitOptions& options, int threads = 1);

}  // namespace fringemag

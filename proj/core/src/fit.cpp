#include "fringemag/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "fringemag/errors.hpp"

namespace fringemag {

namespace {

constexpr double kBisquareTuning = 4.685;
constexpr double kMadToSigma = 0.6745;
constexpr double kWeightTolerance = 1e-8;

bool all_finite(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double median(std::vector<double> values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(values.begin(), mid));
}

// Tukey bisquare weights for residuals r with a MAD scale estimate. Returns
// false (and leaves unit weights) when the residuals are at roundoff level
// relative to the data magnitude.
bool bisquare_weights(const Eigen::VectorXd& r, double magnitude, std::vector<double>& weights) {
  std::vector<double> magnitudes(static_cast<std::size_t>(r.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) magnitudes[i] = std::abs(r[i]);
  const double scale = median(magnitudes) / kMadToSigma;
  if (!(scale > 1e-10 * magnitude)) {
    std::fill(weights.begin(), weights.end(), 1.0);
    return false;
  }
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double u = r[i] / (kBisquareTuning * scale);
    weights[i] = std::abs(u) < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
  }
  return true;
}

}  // namespace

void FringeScan::validate() const {
  if (positions.size() != counts.size()) {
    throw DataError("fringe scan has " + std::to_string(positions.size()) + " positions but " +
                    std::to_string(counts.size()) + " counts");
  }
  if (!all_finite(positions) || !all_finite(counts)) {
    throw DataError("fringe scan contains non-finite values");
  }
  if (std::any_of(counts.begin(), counts.end(), [](double c) { return c < 0.0; })) {
    throw DataError("fringe scan counts must be non-negative");
  }
  if (!std::isfinite(dark_rate)) throw DataError("dark rate must be finite");
  if (!(period > 0.0) || !std::isfinite(period)) throw DataError("grating period must be positive");
}

FringeFitResult fit_fringe(const FringeScan& scan, bool robust, int max_iter) {
  scan.validate();
  const auto n = static_cast<Eigen::Index>(scan.positions.size());
  if (n < 6) throw DataError("fringe fit needs at least 6 points, got " + std::to_string(n));
  const auto [lo, hi] = std::minmax_element(scan.positions.begin(), scan.positions.end());
  const double span = *hi - *lo;
  if (span == 0.0) throw DataError("rank-deficient fringe scan: all positions are identical");
  // n evenly spaced samples of one period span (n - 1) / n of it.
  if (span * static_cast<double>(n) / static_cast<double>(n - 1) < scan.period * (1.0 - 1e-9)) {
    throw DataError("fringe scan must span at least one grating period");
  }
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");

  const double k = 2.0 * std::numbers::pi / scan.period;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phase = k * scan.positions[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = std::sin(phase);
    X(i, 2) = std::cos(phase);
    y[i] = scan.counts[static_cast<std::size_t>(i)] - scan.dark_rate;
  }

  std::vector<double> weights(static_cast<std::size_t>(n), 1.0);
  auto solve = [&] {
    const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(weights.data(), n).cwiseSqrt();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sw.asDiagonal() * X);
    if (qr.rank() < 3) throw DataError("rank-deficient fringe scan design");
    return Eigen::VectorXd(qr.solve(sw.asDiagonal() * y));
  };

  Eigen::VectorXd beta = solve();
  int iterations = 0;
  if (robust) {
    bool converged = false;
    std::vector<double> next(weights.size());
    while (iterations < max_iter) {
      ++iterations;
      if (!bisquare_weights(y - X * beta, y.cwiseAbs().maxCoeff(), next)) {
        weights = next;
        beta = solve();
        converged = true;
        break;
      }
      double change = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        change = std::max(change, std::abs(next[i] - weights[i]));
      }
      weights = next;
      beta = solve();
      if (change < kWeightTolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw FitError(FitError::Kind::NotConverged, "bisquare reweighting did not settle in " +
                                                       std::to_string(max_iter) + " iterations");
    }
  }

  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  const Eigen::VectorXd r = y - X * beta;
  const double effective_n = w.sum();
  const double sigma2 = effective_n > 3.0 ? w.dot(r.cwiseProduct(r)) / (effective_n - 3.0) : 0.0;
  const Eigen::Matrix3d normal = X.transpose() * w.asDiagonal() * X;
  const Eigen::Matrix3d cov = sigma2 * normal.inverse();

  FringeFitResult out;
  out.offset = beta[0];
  const double b1 = beta[1];
  const double b2 = beta[2];
  out.amplitude = std::hypot(b1, b2);
  out.phase = std::atan2(b2, b1);
  out.offset_se = std::sqrt(cov(0, 0));
  const double a = out.amplitude;
  if (a > 0.0) {
    const Eigen::Vector2d da(b1 / a, b2 / a);
    const Eigen::Vector2d dtheta(-b2 / (a * a), b1 / (a * a));
    const Eigen::Matrix2d cb = cov.block<2, 2>(1, 1);
    out.amplitude_se = std::sqrt(da.dot(cb * da));
    out.phase_se = std::sqrt(dtheta.dot(cb * dtheta));
  } else {
    out.amplitude_se = std::sqrt(0.5 * (cov(1, 1) + cov(2, 2)));
    out.phase_se = std::numeric_limits<double>::infinity();
  }
  out.valid = out.offset > 0.0;
  if (out.valid) {
    const double c = out.offset;
    // V = a / c as a function of (c, b1, b2).
    Eigen::Vector3d dv(-a / (c * c), 0.0, 0.0);
    if (a > 0.0) {
      dv[1] = b1 / (a * c);
      dv[2] = b2 / (a * c);
      out.visibility_se = std::sqrt(dv.dot(cov * dv));
    } else {
      out.visibility_se = out.amplitude_se / c;
    }
    out.visibility = a / c;
    if (out.visibility > 1.0) {
      out.visibility = 1.0;
      out.clamped = true;
    }
  } else {
    out.visibility = 0.0;
    out.clamped = true;
  }
  out.iterations = iterations;
  out.weights = std::move(weights);
  return out;
}

// ---------------------------------------------------------------------------

void Dataset::validate() const {
  if (abscissa.empty()) throw DataError("dataset is empty");
  if (visibility.size() != abscissa.size() || sigma.size() != abscissa.size()) {
    throw DataError("dataset columns have different lengths");
  }
  if (!all_finite(abscissa) || !all_finite(visibility) || !all_finite(sigma)) {
    throw DataError("dataset contains non-finite values");
  }
  if (std::any_of(sigma.begin(), sigma.end(), [](double s) { return !(s > 0.0); })) {
    throw DataError("dataset sigma values must be positive");
  }
}

Normalization normalize_to_asymptote(const Dataset& data, const HyperfineManifold& manifold,
                                     std::pair<double, double> window) {
  data.validate();
  const auto zero_moment = std::count_if(manifold.states.begin(), manifold.states.end(),
                                         [](const HyperfineState& s) { return s.mu_z == 0.0; });
  if (zero_moment != 2) {
    throw DomainError("asymptote normalization needs exactly two zero-moment states, " +
                      manifold.isotope + " has " + std::to_string(zero_moment));
  }
  const auto [lo, hi] = std::minmax(window.first, window.second);
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.abscissa[i] >= lo && data.abscissa[i] <= hi) {
      sum += data.visibility[i];
      ++count;
    }
  }
  if (count == 0) throw DataError("asymptote window contains no data points");
  const double mean = sum / count;
  if (mean == 0.0) throw DataError("asymptote window mean is zero");

  Normalization out;
  out.v0 = manifold.size() * mean / 2.0;
  out.data = data;
  for (auto& v : out.data.visibility) v /= out.v0;
  for (auto& s : out.data.sigma) s /= std::abs(out.v0);
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(FitParam param) {
  switch (param) {
    case FitParam::BackgroundGradient:
      return "background_gradient";
    case FitParam::MuEff:
      return "mu_eff";
    case FitParam::V0:
      return "v0";
    case FitParam::ChiM:
      return "chi_m";
  }
  return "unknown";
}

ParamSetting default_setting(FitParam param, const Dataset& data) {
  switch (param) {
    case FitParam::BackgroundGradient:  // T/m
      return {0.0, -1e-3, 1e-3, 1e-5};
    case FitParam::MuEff:  // Bohr magnetons
      return {0.05, 0.0, 10.0, 0.02};
    case FitParam::V0: {
      const double top = data.visibility.empty()
                             ? 1.0
                             : *std::max_element(data.visibility.begin(), data.visibility.end());
      const double seed = top > 0.0 ? top : 1.0;
      return {seed, 0.0, std::max(1.0, 10.0 * seed), 0.1 * seed};
    }
    case FitParam::ChiM:  // m^3/kg
      return {-5e-9, -1e-6, 1e-6, 1e-9};
  }
  throw DomainError("unknown fit parameter");
}

double FitResult::value(FitParam param) const {
  const auto it = std::find(params.begin(), params.end(), param);
  if (it == params.end()) throw DomainError(std::string(to_string(param)) + " was not fitted");
  return values[static_cast<std::size_t>(it - params.begin())];
}

double FitResult::std_error(FitParam param) const {
  const auto it = std::find(params.begin(), params.end(), param);
  if (it == params.end()) throw DomainError(std::string(to_string(param)) + " was not fitted");
  return std_errors[static_cast<std::size_t>(it - params.begin())];
}

namespace {

// The objective in scaled coordinates z = (p - seed) / step, with p clamped
// into its bounds before every model evaluation.
class Objective {
 public:
  Objective(const Dataset& data, const CurveModel& model, const FitOptions& options, int threads)
      : data_(data), model_(model), options_(options), threads_(threads) {
    for (const FitParam param : options.free) {
      const auto it = options.settings.find(param);
      settings_.push_back(it != options.settings.end() ? it->second : default_setting(param, data));
      const auto& s = settings_.back();
      if (!(s.lower <= s.seed && s.seed <= s.upper)) {
        throw DomainError("seed of " + std::string(to_string(param)) + " lies outside its bounds");
      }
      if (!(s.step > 0.0)) {
        throw DomainError("step of " + std::string(to_string(param)) + " must be positive");
      }
    }
    c_.resize(data.size());
    parallel_for(data.size(), threads,
                 [&](std::size_t i) { c_[i] = model.c_factors(data.abscissa[i]); });
  }

  std::size_t dim() const { return settings_.size(); }

  std::vector<double> to_params(const Eigen::VectorXd& z) const {
    std::vector<double> p(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
      const auto& s = settings_[j];
      p[j] = std::clamp(s.seed + s.step * z[static_cast<Eigen::Index>(j)], s.lower, s.upper);
    }
    return p;
  }

  Eigen::VectorXd to_scaled(const std::vector<double>& p) const {
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim()));
    for (std::size_t j = 0; j < dim(); ++j) {
      z[static_cast<Eigen::Index>(j)] = (p[j] - settings_[j].seed) / settings_[j].step;
    }
    return z;
  }

  bool on_bound(const std::vector<double>& p) const {
    for (std::size_t j = 0; j < dim(); ++j) {
      const auto& s = settings_[j];
      const double margin = 1e-9 * (s.upper - s.lower);
      if (p[j] <= s.lower + margin || p[j] >= s.upper - margin) return true;
    }
    return false;
  }

  std::vector<double> predictions(const std::vector<double>& p) const {
    ModelOverrides overrides = options_.fixed;
    double v0 = options_.fixed_v0;
    for (std::size_t j = 0; j < dim(); ++j) {
      switch (options_.free[j]) {
        case FitParam::BackgroundGradient:
          overrides.background_gradient = p[j];
          break;
        case FitParam::MuEff:
          overrides.mu_eff = p[j];
          break;
        case FitParam::ChiM:
          overrides.chi_m = p[j];
          break;
        case FitParam::V0:
          v0 = p[j];
          break;
      }
    }
    ++evaluations_;
    std::vector<double> out(data_.size());
    parallel_for(data_.size(), threads_,
                 [&](std::size_t i) { out[i] = v0 * model_.predict(c_[i], overrides); });
    return out;
  }

  Eigen::VectorXd residuals(const std::vector<double>& prediction) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data_.size()));
    for (std::size_t i = 0; i < data_.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = (prediction[i] - data_.visibility[i]) / data_.sigma[i];
    }
    return r;
  }

  Eigen::VectorXd residuals_at(const Eigen::VectorXd& z) const {
    return residuals(predictions(to_params(z)));
  }

  double chi2(const Eigen::VectorXd& z) const { return residuals_at(z).squaredNorm(); }

  // Central-difference Jacobian of the weighted residuals in scaled units.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z, double h = 1e-2) const {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(data_.size()), z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      Eigen::VectorXd up = z;
      Eigen::VectorXd down = z;
      up[j] += h;
      down[j] -= h;
      J.col(j) = (residuals_at(up) - residuals_at(down)) / (2.0 * h);
    }
    return J;
  }

  const ParamSetting& setting(std::size_t j) const { return settings_[j]; }
  int evaluations() const { return evaluations_; }

 private:
  const Dataset& data_;
  const CurveModel& model_;
  const FitOptions& options_;
  int threads_;
  std::vector<ParamSetting> settings_;
  std::vector<CPair> c_;
  mutable int evaluations_ = 0;
};

struct Minimum {
  Eigen::VectorXd z;
  double chi2 = 0.0;
  bool converged = false;
};

Minimum nelder_mead(const Objective& f, const FitOptions& options, std::vector<double>& history) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), Eigen::VectorXd::Zero(n));
  for (Eigen::Index j = 0; j < n; ++j) simplex[static_cast<std::size_t>(j + 1)][j] = 1.0;
  std::vector<double> values(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = f.chi2(simplex[i]);

  const double size_tol = std::sqrt(options.tolerance);
  std::vector<std::size_t> order(simplex.size());
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    history.push_back(values[best]);

    double size = 0.0;
    for (const auto& v : simplex) {
      size = std::max(size, (v - simplex[best]).lpNorm<Eigen::Infinity>());
    }
    const double spread = values[worst] - values[best];
    if (spread <= options.tolerance * (std::abs(values[best]) + 1.0) && size <= size_tol) {
      return {simplex[best], values[best], true};
    }
    if (f.evaluations() >= options.max_evaluations) return {simplex[best], values[best], false};

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i : order) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = f.chi2(reflected);
    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = f.chi2(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = f.chi2(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = f.chi2(simplex[i]);
    }
  }
}

// Levenberg-Marquardt damped Gauss-Newton on the weighted residuals.
Minimum gauss_newton(const Objective& f, const FitOptions& options, std::vector<double>& history) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = f.residuals_at(z);
  double chi2 = r.squaredNorm();
  history.push_back(chi2);
  double lambda = 1e-3;
  constexpr double kStepTolerance = 1e-6;

  while (f.evaluations() < options.max_evaluations) {
    const Eigen::MatrixXd J = f.jacobian(z);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd grad = J.transpose() * r;
    bool accepted = false;
    while (!accepted && f.evaluations() < options.max_evaluations) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = A.ldlt().solve(-grad);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      // Keep the iterate inside the box so that clamping does not hide steps.
      const Eigen::VectorXd trial = f.to_scaled(f.to_params(z + step));
      const Eigen::VectorXd r_trial = f.residuals_at(trial);
      const double chi2_trial = r_trial.squaredNorm();
      const double moved = (trial - z).lpNorm<Eigen::Infinity>();
      if (chi2_trial < chi2) {
        const double decrease = chi2 - chi2_trial;
        z = trial;
        r = r_trial;
        chi2 = chi2_trial;
        history.push_back(chi2);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (decrease <= options.tolerance * (chi2 + 1.0) || moved <= kStepTolerance) {
          return {z, chi2, true};
        }
      } else {
        // No improvement along a negligible step: the minimum is resolved to
        // the accuracy of the model evaluation.
        if (moved <= kStepTolerance) return {z, chi2, true};
        lambda *= 10.0;
        if (lambda > 1e12) return {z, chi2, true};
      }
    }
  }
  return {z, chi2, false};
}

}  // namespace

FitResult fit_visibility_params(const Dataset& data, const CurveModel& model,
                                const FitOptions& options, int threads) {
  data.validate();
  for (std::size_t i = 0; i < options.free.size(); ++i) {
    for (std::size_t j = i + 1; j < options.free.size(); ++j) {
      if (options.free[i] == options.free[j]) {
        throw DomainError("fit parameter " + std::string(to_string(options.free[i])) +
                          " listed twice");
      }
    }
  }
  const std::size_t p = options.free.size();
  if (data.size() < p + 1) {
    throw FitError(FitError::Kind::Underdetermined,
                   "fit of " + std::to_string(p) + " parameters needs at least " +
                       std::to_string(p + 1) + " data points, got " + std::to_string(data.size()));
  }

  const Objective f(data, model, options, threads);
  FitResult out;
  out.params = options.free;
  out.dof = static_cast<int>(data.size() - p);

  Minimum best;
  if (p == 0) {
    best = {Eigen::VectorXd(), f.chi2(Eigen::VectorXd()), true};
    out.chi2_history.push_back(best.chi2);
  } else if (options.optimizer == Optimizer::NelderMead) {
    best = nelder_mead(f, options, out.chi2_history);
  } else {
    best = gauss_newton(f, options, out.chi2_history);
  }

  const std::vector<double> values = f.to_params(best.z);
  out.values = values;
  out.model = f.predictions(values);
  const Eigen::VectorXd r = f.residuals(out.model);
  out.residuals.assign(r.data(), r.data() + r.size());
  out.chi2 = r.squaredNorm();
  out.reduced_chi2 = out.chi2 / out.dof;
  out.converged = best.converged;
  out.at_bound = f.on_bound(values);

  out.covariance.assign(p, std::vector<double>(p, 0.0));
  out.std_errors.assign(p, 0.0);
  if (p > 0) {
    const Eigen::MatrixXd J = f.jacobian(f.to_scaled(values));
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
    const bool invertible = lu.isInvertible();
    const Eigen::MatrixXd cov_scaled = invertible ? Eigen::MatrixXd(lu.inverse()) : JtJ;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        out.covariance[a][b] =
            invertible ? cov_scaled(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                             f.setting(a).step * f.setting(b).step
                       : std::numeric_limits<double>::infinity();
      }
      out.std_errors[a] = std::sqrt(out.covariance[a][a]);
    }
  }
  out.evaluations = f.evaluations();

  if (options.throw_on_failure) {
    if (!out.converged) {
      throw FitError(FitError::Kind::NotConverged, "optimizer did not converge within " +
                                                       std::to_string(options.max_evaluations) +
                                                       " evaluations");
    }
    if (out.at_bound) {
      throw FitError(FitError::Kind::AtBound, "a fitted parameter ended on its bound");
    }
  }
  return out;
}

}  // namespace fringemag

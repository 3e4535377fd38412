// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "corpuskit/corpus.hpp"

namespace corpuskit::scaling {

// L(N, D) = L_inf + A_N * N^-alpha + A_D * D^-beta

enum Param : int { kLinf = 0, kAN = 1, kAlpha = 2, kAD = 3, kBeta = 4 };
inline constexpr int kNumParams = 5;
inline constexpr std::array<const char*, kNumParams> kParamNames = {"L_inf", "A_N", "alpha", "A_D", "beta"};

template <typename Scalar>
using Vec5 = Eigen::Matrix<Scalar, kNumParams, 1>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Jacobian = Eigen::Matrix<Scalar, Eigen::Dynamic, kNumParams>;

template <typename Scalar>
struct ScalingParams {
  Scalar L_inf{};
  Scalar A_N{};
  Scalar alpha{};
  Scalar A_D{};
  Scalar beta{};

  Vec5<Scalar> vec() const { return (Vec5<Scalar>() << L_inf, A_N, alpha, A_D, beta).finished(); }
  static ScalingParams from_vec(const Vec5<Scalar>& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

  template <typename T>
  ScalingParams<T> cast() const {
    return {T(L_inf), T(A_N), T(alpha), T(A_D), T(beta)};
  }
};

template <typename Scalar>
struct Observation {
  Scalar N{};
  Scalar D{};
  Scalar loss{};
};

/// Box bounds for L_inf, alpha, beta and strict lower bounds for A_N, A_D
/// (upper bound +inf).
template <typename Scalar>
struct ParamBounds {
  Vec5<Scalar> lo = (Vec5<Scalar>() << 1, 100, Scalar(0.3), 100, Scalar(0.3)).finished();
  Vec5<Scalar> hi = (Vec5<Scalar>() << 10, std::numeric_limits<Scalar>::infinity(), Scalar(0.5),
                     std::numeric_limits<Scalar>::infinity(), Scalar(0.5))
                        .finished();

  bool is_box(int i) const { return std::isfinite(hi[i]); }

  void validate() const {
    for (int i = 0; i < kNumParams; ++i) {
      if (!std::isfinite(lo[i])) throw Error(std::string("bounds: lower bound of ") + kParamNames[i] + " must be finite");
      if (!(hi[i] > lo[i])) throw Error(std::string("bounds: empty range for ") + kParamNames[i]);
    }
  }

  bool contains(const ScalingParams<Scalar>& p) const {
    const auto v = p.vec();
    for (int i = 0; i < kNumParams; ++i) {
      if (is_box(i) ? !(v[i] >= lo[i] && v[i] <= hi[i]) : !(v[i] > lo[i])) return false;
    }
    return true;
  }
};

template <typename Scalar>
Scalar predict(const ScalingParams<Scalar>& p, Scalar N, Scalar D) {
  if (!(N > 0) || !(D > 0)) throw Error("predict: N and D must be positive");
  using std::pow;
  return p.L_inf + p.A_N * pow(N, -p.alpha) + p.A_D * pow(D, -p.beta);
}

template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> predict_curve(const ScalingParams<Scalar>& p, Scalar N,
                                                     const std::vector<Scalar>& D_grid) {
  std::vector<std::pair<Scalar, Scalar>> out;
  out.reserve(D_grid.size());
  for (Scalar D : D_grid) out.emplace_back(D, predict(p, N, D));
  return out;
}

/// Residuals loss_i - predict(p, N_i, D_i).
template <typename Scalar>
Vector<Scalar> residuals(const ScalingParams<Scalar>& p, const std::vector<Observation<Scalar>>& obs) {
  Vector<Scalar> r(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) r[i] = obs[i].loss - predict(p, obs[i].N, obs[i].D);
  return r;
}

/// Analytic d(residual_i)/d(param_j).
template <typename Scalar>
Jacobian<Scalar> residual_jacobian(const ScalingParams<Scalar>& p, const std::vector<Observation<Scalar>>& obs) {
  using std::log;
  using std::pow;
  Jacobian<Scalar> J(static_cast<Eigen::Index>(obs.size()), kNumParams);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Scalar n_term = pow(obs[i].N, -p.alpha);
    const Scalar d_term = pow(obs[i].D, -p.beta);
    const auto r = static_cast<Eigen::Index>(i);
    J(r, kLinf) = -1;
    J(r, kAN) = -n_term;
    J(r, kAlpha) = p.A_N * n_term * log(obs[i].N);
    J(r, kAD) = -d_term;
    J(r, kBeta) = p.A_D * d_term * log(obs[i].D);
  }
  return J;
}

template <typename Scalar>
struct FitOptions {
  int max_evals = 30000;
  int starts = 8;
  unsigned seed = 2026;
  Scalar jitter = 1;  // std-dev of start perturbations in transformed space
  // Replaces the data-derived first start.
  std::optional<ScalingParams<Scalar>> initial;
};

template <typename Scalar>
struct FitResult {
  ScalingParams<Scalar> params;
  Vector<Scalar> residuals;
  Scalar rmse{};
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::array<bool, kNumParams> at_bound{};
  std::string message;
  std::vector<std::string> warnings;
  // 0.5 * sum of squared residuals after each accepted step of the chosen
  // start, or of the refit when parameters were pinned to a bound.
  std::vector<Scalar> cost_history;

  bool any_at_bound() const { return std::any_of(at_bound.begin(), at_bound.end(), [](bool b) { return b; }); }
};

namespace detail {

// Logistic map for box-bounded parameters, lo + exp(u) for lower-bounded.
template <typename Scalar>
struct Transform {
  const ParamBounds<Scalar>& b;

  Vec5<Scalar> to_params(const Vec5<Scalar>& u) const {
    using std::exp;
    Vec5<Scalar> t;
    for (int i = 0; i < kNumParams; ++i) {
      if (b.is_box(i)) {
        const Scalar s = Scalar(1) / (Scalar(1) + exp(-u[i]));
        t[i] = std::clamp(b.lo[i] + (b.hi[i] - b.lo[i]) * s, b.lo[i], b.hi[i]);
      } else {
        t[i] = b.lo[i] + exp(u[i]);
      }
    }
    return t;
  }

  Vec5<Scalar> slope(const Vec5<Scalar>& u) const {
    using std::exp;
    Vec5<Scalar> d;
    for (int i = 0; i < kNumParams; ++i) {
      if (b.is_box(i)) {
        const Scalar s = Scalar(1) / (Scalar(1) + exp(-u[i]));
        d[i] = (b.hi[i] - b.lo[i]) * s * (Scalar(1) - s);
      } else {
        d[i] = exp(u[i]);
      }
    }
    return d;
  }

  Vec5<Scalar> from_params(const Vec5<Scalar>& t) const {
    using std::log;
    Vec5<Scalar> u;
    for (int i = 0; i < kNumParams; ++i) {
      if (b.is_box(i)) {
        const Scalar eps = (b.hi[i] - b.lo[i]) * Scalar(1e-9);
        const Scalar x = std::clamp(t[i], b.lo[i] + eps, b.hi[i] - eps);
        u[i] = log((x - b.lo[i]) / (b.hi[i] - x));
      } else {
        using std::abs;
        const Scalar gap = std::max(t[i] - b.lo[i], std::max(abs(b.lo[i]), Scalar(1)) * Scalar(1e-12));
        u[i] = log(gap);
      }
    }
    return u;
  }
};

template <typename Scalar>
struct LmOutcome {
  Vec5<Scalar> u;
  Scalar cost{};
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
  std::vector<Scalar> history;
};

template <typename Scalar>
Scalar half_sq(const Vector<Scalar>& r) {
  return Scalar(0.5) * r.squaredNorm();
}

/// Levenberg-Marquardt with Marquardt column scaling and Nielsen damping
/// updates, over the free coordinates of u. Non-free parameters take their
/// value from `pinned` when given, else from u.
template <typename Scalar>
LmOutcome<Scalar> levenberg_marquardt(const std::vector<Observation<Scalar>>& obs, const ParamBounds<Scalar>& b,
                                      Vec5<Scalar> u, const std::array<bool, kNumParams>& free, int max_evals,
                                      const Vec5<Scalar>* pinned = nullptr) {
  using std::abs;
  using std::sqrt;
  const Transform<Scalar> tr{b};
  std::vector<int> cols;
  for (int i = 0; i < kNumParams; ++i)
    if (free[i]) cols.push_back(i);
  const auto k = static_cast<Eigen::Index>(cols.size());
  const auto n = static_cast<Eigen::Index>(obs.size());

  LmOutcome<Scalar> out;
  auto params_of = [&](const Vec5<Scalar>& x) {
    Vec5<Scalar> t = tr.to_params(x);
    if (pinned)
      for (int i = 0; i < kNumParams; ++i)
        if (!free[i]) t[i] = (*pinned)[i];
    return ScalingParams<Scalar>::from_vec(t);
  };
  Vector<Scalar> r = residuals(params_of(u), obs);
  out.evaluations = 1;
  Scalar cost = half_sq(r);
  out.history.push_back(cost);
  if (k == 0) {
    out.u = u;
    out.cost = cost;
    out.converged = true;
    out.message = "no free parameters";
    return out;
  }

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar xtol = sqrt(eps) * Scalar(1e-4);
  Scalar lambda = -1;
  Scalar nu = 2;
  Vector<Scalar> scale = Vector<Scalar>::Zero(k);
  bool recompute = true;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> J(n, k);
  Vector<Scalar> g(k);

  while (true) {
    if (recompute) {
      const auto Jt = residual_jacobian(params_of(u), obs);
      const auto s = tr.slope(u);
      for (Eigen::Index c = 0; c < k; ++c) J.col(c) = Jt.col(cols[c]) * s[cols[c]];
      for (Eigen::Index c = 0; c < k; ++c) scale[c] = std::max(scale[c], J.col(c).norm());
      g = J.transpose() * r;
      recompute = false;
      if (lambda < 0) lambda = Scalar(1e-3);
    }
    if (cost == 0 || g.cwiseAbs().maxCoeff() <= eps * eps) {
      out.converged = true;
      out.message = "gradient vanished";
      break;
    }
    if (out.evaluations >= max_evals) {
      out.message = "evaluation budget exhausted";
      break;
    }
    // min |J d + r|^2 + lambda |diag(scale) d|^2 as a stacked least-squares problem.
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A(n + k, k);
    A.topRows(n) = J;
    A.bottomRows(k) = (sqrt(lambda) * scale.cwiseMax(eps)).asDiagonal();
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n + k);
    rhs.head(n) = -r;
    const Vector<Scalar> step = A.colPivHouseholderQr().solve(rhs);

    Vec5<Scalar> trial = u;
    for (Eigen::Index c = 0; c < k; ++c) trial[cols[c]] += step[c];
    const Vector<Scalar> r_trial = residuals(params_of(trial), obs);
    ++out.evaluations;
    const Scalar cost_trial = half_sq(r_trial);
    const Vector<Scalar> Jd = J * step;
    const Scalar predicted = -(g.dot(step) + Scalar(0.5) * Jd.squaredNorm());
    const Scalar rho = predicted > 0 ? (cost - cost_trial) / predicted : Scalar(-1);

    if (std::isfinite(cost_trial) && cost_trial < cost) {
      const Scalar drop = cost - cost_trial;
      u = trial;
      r = r_trial;
      cost = cost_trial;
      ++out.iterations;
      out.history.push_back(cost);
      recompute = true;
      const Scalar t = Scalar(2) * std::max(rho, Scalar(0)) - 1;
      lambda *= std::max(Scalar(1) / Scalar(3), Scalar(1) - t * t * t);
      nu = 2;
      const Scalar unorm = u.norm();
      if (step.norm() <= xtol * (unorm + xtol)) {
        out.converged = true;
        out.message = "step below tolerance";
        break;
      }
      if (drop <= eps * cost) {
        out.converged = true;
        out.message = "relative reduction below tolerance";
        break;
      }
    } else {
      lambda *= nu;
      nu *= 2;
      if (!std::isfinite(lambda) || lambda > Scalar(1e20)) {
        // No descent direction left at working precision.
        out.converged = true;
        out.message = "no further reduction possible";
        break;
      }
    }
  }
  out.u = u;
  out.cost = cost;
  return out;
}

template <typename Scalar>
Vec5<Scalar> initial_guess(const std::vector<Observation<Scalar>>& obs, const ParamBounds<Scalar>& b) {
  using std::pow;
  Scalar min_loss = obs.front().loss;
  for (const auto& o : obs) min_loss = std::min(min_loss, o.loss);
  const Scalar alpha = std::clamp(Scalar(0.4), b.lo[kAlpha], b.hi[kAlpha]);
  const Scalar beta = std::clamp(Scalar(0.4), b.lo[kBeta], b.hi[kBeta]);
  const Scalar l_inf = std::clamp(Scalar(0.9) * min_loss, b.lo[kLinf], b.hi[kLinf]);
  // With exponents fixed the model is linear in the two coefficients.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> X(static_cast<Eigen::Index>(obs.size()), 2);
  Vector<Scalar> y(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    X(r, 0) = pow(obs[i].N, -alpha);
    X(r, 1) = pow(obs[i].D, -beta);
    y[r] = obs[i].loss - l_inf;
  }
  const Eigen::Matrix<Scalar, 2, 1> coef = X.colPivHouseholderQr().solve(y);
  auto coefficient = [&](Scalar c, int i) {
    const Scalar floor = b.lo[i] * Scalar(1.1) + Scalar(1);
    return std::isfinite(c) ? std::max(c, floor) : floor;
  };
  Vec5<Scalar> t;
  t << l_inf, coefficient(coef[0], kAN), alpha, coefficient(coef[1], kAD), beta;
  return t;
}

}  // namespace detail

/// Bounded nonlinear least squares over the five parameters. Starts from a
/// data-derived guess plus jittered restarts; the lowest cost wins, ties to
/// the earlier start. Box-bounded parameters that converge onto a bound are
/// pinned there exactly and the rest refit.
template <typename Scalar>
FitResult<Scalar> fit(const std::vector<Observation<Scalar>>& obs, const ParamBounds<Scalar>& bounds = {},
                      const FitOptions<Scalar>& opts = {}) {
  bounds.validate();
  if (obs.size() < static_cast<std::size_t>(kNumParams))
    throw Error("fit: need at least 5 observations, got " + std::to_string(obs.size()));
  if (opts.max_evals < 1 || opts.starts < 1) throw Error("fit: max_evals and starts must be positive");
  std::set<std::pair<Scalar, Scalar>> pairs;
  std::set<Scalar> ns, ds;
  for (const auto& o : obs) {
    if (!(o.N > 0) || !(o.D > 0) || !(o.loss > 0)) throw Error("fit: N, D and loss must be positive");
    if (!pairs.emplace(o.N, o.D).second) throw Error("fit: duplicate (N, D) observation");
    ns.insert(o.N);
    ds.insert(o.D);
  }

  FitResult<Scalar> res;
  if (ns.size() == 1) res.warnings.push_back("all observations share one N; A_N and alpha are not identifiable");
  if (ds.size() == 1) res.warnings.push_back("all observations share one D; A_D and beta are not identifiable");

  const detail::Transform<Scalar> tr{bounds};
  const Vec5<Scalar> guess = opts.initial ? opts.initial->vec() : detail::initial_guess(obs, bounds);
  const Vec5<Scalar> u0 = tr.from_params(guess);
  const int per_start = std::max(1, opts.max_evals / (opts.starts + 1));
  std::array<bool, kNumParams> all_free;
  all_free.fill(true);

  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::optional<detail::LmOutcome<Scalar>> best;
  int total_evals = 0;
  for (int s = 0; s < opts.starts; ++s) {
    Vec5<Scalar> u = u0;
    if (s > 0)
      for (int i = 0; i < kNumParams; ++i) u[i] += opts.jitter * Scalar(jitter(rng));
    auto run = detail::levenberg_marquardt(obs, bounds, u, all_free, per_start);
    total_evals += run.evaluations;
    if (!best || run.cost < best->cost) best = std::move(run);
  }

  Vec5<Scalar> theta = tr.to_params(best->u);
  std::array<bool, kNumParams> free = all_free;
  for (int i = 0; i < kNumParams; ++i) {
    if (!bounds.is_box(i)) continue;
    const Scalar tol = (bounds.hi[i] - bounds.lo[i]) * Scalar(1e-6);
    if (theta[i] - bounds.lo[i] <= tol) {
      theta[i] = bounds.lo[i];
    } else if (bounds.hi[i] - theta[i] <= tol) {
      theta[i] = bounds.hi[i];
    } else {
      continue;
    }
    free[i] = false;
    res.at_bound[i] = true;
  }
  if (res.any_at_bound()) {
    const Vec5<Scalar> pinned = theta;
    Vec5<Scalar> u = tr.from_params(theta);
    const int budget = std::max(1, opts.max_evals - total_evals);
    auto refit = detail::levenberg_marquardt(obs, bounds, u, free, budget, &pinned);
    total_evals += refit.evaluations;
    theta = tr.to_params(refit.u);
    for (int i = 0; i < kNumParams; ++i)
      if (!free[i]) theta[i] = pinned[i];
    const Scalar refit_cost = detail::half_sq(residuals(ScalingParams<Scalar>::from_vec(theta), obs));
    best->history = std::move(refit.history);
    best->iterations += refit.iterations;
    best->converged = refit.converged;
    best->message = refit.message;
    best->cost = refit_cost;
  }
  for (int i = 0; i < kNumParams; ++i) {
    if (bounds.is_box(i)) continue;
    if (theta[i] - bounds.lo[i] <= bounds.lo[i] * Scalar(1e-6)) res.at_bound[i] = true;
  }

  res.params = ScalingParams<Scalar>::from_vec(theta);
  res.residuals = residuals(res.params, obs);
  using std::sqrt;
  res.rmse = sqrt(res.residuals.squaredNorm() / Scalar(obs.size()));
  res.iterations = best->iterations;
  res.evaluations = total_evals;
  res.converged = best->converged;
  res.message = best->message;
  if (res.any_at_bound()) res.message += "; parameters at bound:";
  for (int i = 0; i < kNumParams; ++i)
    if (res.at_bound[i]) res.message += std::string(" ") + kParamNames[i];
  res.cost_history = std::move(best->history);
  return res;
}

// ---------------------------------------------------------------------------
// Text I/O for double-precision fits.

/// Three columns N, D, loss separated by commas, tabs or spaces. Lines
/// starting with '#' and a non-numeric header line are skipped.
std::vector<Observation<double>> read_observations(const std::filesystem::path& path);

std::string fit_to_json(const FitResult<double>& result, const std::vector<Observation<double>>& obs,
                        const std::vector<std::pair<double, double>>& curve = {}, double curve_N = 0.0);

}  // namespace corpuskit::scaling

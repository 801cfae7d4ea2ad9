#pragma once

// Robust straight-line fits v(t) = slope * t + intercept.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "motseg/error.hpp"

namespace motseg {

struct TimedValue {
  double t = 0.0;
  double v = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  int iterations = 0;

  double operator()(double t) const { return slope * t + intercept; }
};

namespace detail {

inline void require_spread(std::span<const TimedValue> samples) {
  if (samples.size() < 2) fail(ErrorCode::kDegenerateInput, "line fit needs at least 2 samples");
  for (const auto& s : samples) {
    if (!std::isfinite(s.t) || !std::isfinite(s.v)) {
      fail(ErrorCode::kDegenerateInput, "non-finite sample");
    }
  }
  const bool all_equal = std::all_of(samples.begin(), samples.end(),
                                     [&](const TimedValue& s) { return s.t == samples[0].t; });
  if (all_equal) fail(ErrorCode::kDegenerateInput, "all samples share the same t");
}

inline double median(std::vector<double> xs) {
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + mid);
  return 0.5 * (lower + upper);
}

// Weighted least squares in centered form. Returns false when the weighted
// spread of t vanishes.
inline bool weighted_line(std::span<const TimedValue> samples, std::span<const double> weights,
                          LineFit& out) {
  double sw = 0.0, st = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sw += weights[i];
    st += weights[i] * samples[i].t;
    sv += weights[i] * samples[i].v;
  }
  if (!(sw > 0.0)) return false;
  const double tm = st / sw, vm = sv / sw;
  double stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double dt = samples[i].t - tm;
    stt += weights[i] * dt * dt;
    stv += weights[i] * dt * (samples[i].v - vm);
  }
  if (!(stt > 0.0)) return false;
  out.slope = stv / stt;
  out.intercept = vm - out.slope * tm;
  return true;
}

// Robust residual scale: median absolute residual over the normal
// consistency constant, floored so exact fits keep positive weights.
inline double residual_scale(std::span<const TimedValue> samples, const LineFit& fit) {
  std::vector<double> abs_res;
  abs_res.reserve(samples.size());
  double magnitude = 0.0;
  for (const auto& s : samples) {
    abs_res.push_back(std::abs(s.v - fit(s.t)));
    magnitude = std::max(magnitude, std::abs(s.v));
  }
  constexpr double kMadToSigma = 1.0 / 0.6744897501960817;
  return std::max(median(std::move(abs_res)) * kMadToSigma, 1e-12 * (1.0 + magnitude));
}

}  // namespace detail

inline LineFit ols_fit(std::span<const TimedValue> samples) {
  detail::require_spread(samples);
  const std::vector<double> ones(samples.size(), 1.0);
  LineFit fit;
  detail::weighted_line(samples, ones, fit);
  return fit;
}

/// Siegel repeated-median line; tolerates up to half the samples being
/// arbitrary outliers.
inline LineFit repeated_median_fit(std::span<const TimedValue> samples) {
  detail::require_spread(samples);
  std::vector<double> per_point;
  per_point.reserve(samples.size());
  std::vector<double> slopes;
  for (const auto& a : samples) {
    slopes.clear();
    for (const auto& b : samples) {
      if (b.t != a.t) slopes.push_back((b.v - a.v) / (b.t - a.t));
    }
    if (!slopes.empty()) per_point.push_back(detail::median(slopes));
  }
  LineFit fit;
  fit.slope = detail::median(per_point);
  std::vector<double> offsets;
  offsets.reserve(samples.size());
  for (const auto& s : samples) offsets.push_back(s.v - fit.slope * s.t);
  fit.intercept = detail::median(std::move(offsets));
  return fit;
}

struct HuberOptions {
  double delta = 1.0;  // threshold in units of the robust residual scale
  int max_iterations = 50;
  double tolerance = 1e-9;
};

/// Huber M-estimate of a line by iteratively reweighted least squares.
///
/// Residuals are compared against delta times a robust scale (median
/// absolute residual) re-estimated every iteration, so samples within the
/// threshold weigh 1 and the rest weigh threshold / |residual|. When every
/// ordinary least squares residual is already inside the threshold the OLS
/// line is a fixed point and is returned unchanged; otherwise iteration
/// starts from the repeated-median line.
inline LineFit huber_fit(std::span<const TimedValue> samples, const HuberOptions& opts = {}) {
  if (!(opts.delta > 0.0)) fail(ErrorCode::kInvalidArgument, "huber delta must be positive");
  const LineFit ols = ols_fit(samples);
  {
    const double threshold = opts.delta * detail::residual_scale(samples, ols);
    const bool all_inside = std::all_of(samples.begin(), samples.end(), [&](const TimedValue& s) {
      return std::abs(s.v - ols(s.t)) <= threshold;
    });
    if (all_inside) return ols;
  }

  LineFit fit = repeated_median_fit(samples);
  std::vector<double> weights(samples.size());
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const double threshold = opts.delta * detail::residual_scale(samples, fit);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double r = std::abs(samples[i].v - fit(samples[i].t));
      weights[i] = r <= threshold ? 1.0 : threshold / r;
    }
    LineFit next;
    if (!detail::weighted_line(samples, weights, next)) break;
    next.iterations = it;
    const double change =
        std::max(std::abs(next.slope - fit.slope), std::abs(next.intercept - fit.intercept));
    fit = next;
    if (change < opts.tolerance) break;
  }
  return fit;
}

}  // namespace motseg

#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/grid_function.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

enum class NormKind { strong, weak, lorentz };

const char* to_string(NormKind k) noexcept;

struct NormValue {
  double value = 0.0;
  NormKind kind = NormKind::strong;
  double p = 1.0;
  std::string weight_id;
};

// Distribution of |g| under a measure given by cell masses: distinct values
// in decreasing order and the mass of {|g| >= value} for each.
struct Distribution {
  std::vector<double> values;
  std::vector<double> tail_mass;
};

Distribution distribution(std::span<const double> g, std::span<const double> masses);

// The three norms from cell masses directly.
double strong_norm(std::span<const double> g, std::span<const double> masses, double p);
double weak_norm(const Distribution& dist, double p);
double lorentz_p1_norm(const Distribution& dist, double p);

NormValue strong_norm(const GridFunction& g, const Weight& w, double p);
NormValue weak_norm(const GridFunction& g, const Weight& w, double p);
NormValue lorentz_p1_norm(const GridFunction& g, const Weight& w, double p);

// sigma f as a grid function: f times the cell-average density of sigma.
GridFunction times_density(const GridFunction& f, const Weight& v);

// ||T(sigma f)||_{L^{p,inf}(w)} / ||f||_{L^p(sigma)}, sigma = w^{1-p'}.
double sigma_testing_ratio(const GridOperator& t, const GridFunction& f, const Weight& w, double p);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> points;  // (ln x, ln y)
  // max x / min x < 4
  bool narrow_range = false;
};

// Least squares line through (ln x, ln y). Needs >= 3 points with strictly
// increasing positive x and positive y.
FitResult fit_exponent(std::span<const std::pair<double, double>> xy);

// 0.05 when x spans at least 2.5 decades, 0.10 otherwise.
double default_slope_tolerance(const FitResult& fit);

}  // namespace dyadlab

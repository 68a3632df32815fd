#pragma once

// Weights as exact measure providers.
//
// A power weight has density x^s on (0, inf) with s > -1, so every interval
// [a, b) has the closed-form mass (b^(s+1) - a^(s+1)) / (s+1). The weight
// |x|^(eps-1) of the sharpness examples is power(eps). A step weight has a
// strictly positive density on the cells of its own grid.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/grid_function.hpp"

namespace dyadlab {

class Weight {
 public:
  struct Power {
    double exponent;
  };
  struct Step {
    Domain domain;
    std::vector<double> density;
  };

  // Density x^(eps - 1), 0 < eps (eps = 1 is Lebesgue measure).
  static Weight power(double epsilon);
  static Weight power_exponent(double exponent);
  static Weight step(const Domain& d, std::vector<double> density);
  static Weight lebesgue(const Domain& d) { return step(d, std::vector<double>(static_cast<std::size_t>(d.cells()), 1.0)); }
  // Step weight whose cell masses are given (density = mass / cell width).
  static Weight from_cell_masses(const Domain& d, const std::vector<double>& masses);

  bool is_power() const noexcept { return std::holds_alternative<Power>(kind_); }
  const Power* as_power() const noexcept { return std::get_if<Power>(&kind_); }
  const Step* as_step() const noexcept { return std::get_if<Step>(&kind_); }
  // eps for power weights x^(eps-1).
  std::optional<double> epsilon() const noexcept;

  double measure(double a, double b) const;
  double measure(const DyadicInterval& q) const { return measure(q.left(), q.right()); }
  // Mass of every level-J cell of d. Step weights require the same M.
  std::vector<double> cell_masses(const Domain& d) const;
  // Cell masses divided by the cell width.
  std::vector<double> cell_densities(const Domain& d) const;

  // sigma = w^(1 - p'), p' = p / (p - 1).
  Weight dual(double p) const;

  std::string id() const;
  std::string to_json() const;
  static Weight from_json(std::string_view text);

 private:
  explicit Weight(std::variant<Power, Step> k) : kind_(std::move(k)) {}
  std::variant<Power, Step> kind_;
};

double conjugate_exponent(double p);

// (w(Q)/|Q|) (sigma(Q)/|Q|)^(p-1) from raw masses.
double ap_quantity(double w_mass, double sigma_mass, double length, double p);

struct ApCharacteristic {
  double value = 1.0;
  DyadicInterval witness;
  bool witness_is_triple = false;
  double p = 2.0;
};

struct ApScanOptions {
  // Also scan the clipped triples 3Q of every dyadic Q.
  bool include_triples = false;
};

// Maximum over every dyadic interval of d (levels -M..J). Ties go to the
// smallest (level, index).
ApCharacteristic ap_characteristic(const Weight& w, double p, const Domain& d, ApScanOptions opts = {});

// Same, from precomputed cell masses of w and of its dual.
ApCharacteristic ap_characteristic_from_masses(const Domain& d, const std::vector<double>& w_masses,
                                               const std::vector<double>& sigma_masses, double p,
                                               ApScanOptions opts = {});

// max over dyadic Q of (w(Q)/|Q|) / (min cell density in Q).
double a1_characteristic(const Weight& w, const Domain& d);
double a1_characteristic_from_masses(const Domain& d, const std::vector<double>& masses);

struct AinftyDecay {
  double ratio = 0.0;      // w(E) / w(Q)
  double implied_c = 0.0;  // (1 - ratio) [w]_{A_2}
  bool pass = false;       // implied_c >= c_min
};

inline constexpr double kDefaultAinftyFloor = 0.01;

// E is a set of level-J cells inside Q with |E| < |Q|/2.
AinftyDecay ainfty_decay_check(const Weight& w, const Domain& d, const DyadicInterval& q,
                               const std::vector<std::int64_t>& e_cells, double a2_char,
                               double c_min = kDefaultAinftyFloor);

// The heaviest floor((n-1)/2) cells of Q: the E with |E| < |Q|/2 that
// maximizes w(E) among unions of cells.
std::vector<std::int64_t> heaviest_minority_cells(const Weight& w, const Domain& d, const DyadicInterval& q);

}  // namespace dyadlab

#pragma once

// Executable versions of the weak-type proof steps: the level decomposition
// of a sparse family, exceptional sets, the averaging lemma, the per-level
// bounds for p < 2 and p = 2, and extrapolation to p > 2 through a
// Rubio de Francia majorant.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/grid_function.hpp"
#include "dyadlab/interval_set.hpp"
#include "dyadlab/rational.hpp"
#include "dyadlab/sparse_family.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

// Covers every positive double, so the residual bucket holds only zero averages.
inline constexpr int kDefaultEllMax = 1100;
inline constexpr double kDefaultEll0Constant = 4.0;

// ell with 2^{-ell-1} < a <= 2^{-ell} for 0 < a <= 1, from the binary
// exponent of a.
int level_index(double a);

struct LevelDecomposition {
  Rational rho{1};
  SparseFamily s1;                   // <f>_{rho Q} > 1
  std::map<int, SparseFamily> levels;
  // <f>_{rho Q} == 0 or ell beyond ell_max
  std::vector<DyadicInterval> residual;
  int ell_max = kDefaultEllMax;

  std::size_t total_members() const;
};

LevelDecomposition decompose(const SparseFamily& s, const GridFunction& f, Rational rho, int ell_max = kDefaultEllMax);

struct ExceptionalEntry {
  DyadicInterval q;
  IntervalSet dilate;  // clipped rho Q, fine units
  IntervalSet r;       // union of rho Q' over members Q' strictly inside Q
  IntervalSet e;       // dilate minus r
  double average_e = 0.0;  // <f 1_E>_{rho Q}
  double average_r = 0.0;  // (1 / |rho Q|) int_R f
  double average = 0.0;    // <f>_{rho Q}
  bool bound_ok = false;   // average_e >= (3/8) 2^{-ell}
  bool r_small = false;    // |R| < |rho Q| / 8
};

struct ExceptionalSets {
  int ell = 0;
  Rational rho{1};
  std::int64_t units_per_cell = 2;
  std::vector<ExceptionalEntry> entries;
  // Pairs of members whose E sets overlap.
  std::int64_t overlapping_pairs = 0;
  // sum 2^{-2 ell} 1_Q <= (8/3)^2 sum <f 1_E>^2 1_Q at every cell
  bool pointwise_ok = false;

  bool bounds_ok() const;
  bool r_small() const;
  bool disjoint() const noexcept { return overlapping_pairs == 0; }
};

// The family must carry a strengthened certificate for rho.
ExceptionalSets exceptional_sets(const SparseFamily& level_family, const GridFunction& f, Rational rho, int ell);

struct WeakRhoReport {
  double lhs = 0.0;  // ||(sum <g_Q>_{rho Q}^p 1_Q)^{1/p}||_{L^p(w)}
  double rhs = 0.0;  // [w]^{1/p} ||(sum g_Q^p)^{1/p}||_{L^p(w)}
  double ap_char = 1.0;
  double ratio = 0.0;
};

WeakRhoReport lemma_weakrho_check(const Domain& d, const std::vector<DyadicInterval>& family,
                                  const std::vector<GridFunction>& g, const Weight& w, double p, Rational rho);

struct TraceRecord {
  int ell = 0;
  std::size_t bucket_size = 0;
  double level_mass = 0.0;
  double bound_term = 0.0;
};

std::string trace_to_json(const std::vector<TraceRecord>& records);

struct PLessThan2Trace {
  double p = 1.5;
  double epsilon = 0.25;    // 1 - p/2
  double k_eps = 0.0;       // sum 2^{-eps ell} = 1 / (1 - 2^{-eps})
  double decay = 0.0;       // 2^{-(2-p-eps) p / 2}, ratio of successive bound terms
  double ap_char = 1.0;
  double f_norm_p = 0.0;    // ||f||_{L^p(w)}^p
  std::vector<TraceRecord> records;
  double direct_mass = 0.0;       // w{sum over S \ S1 of <f>^2 1_Q > k_eps}
  double level_mass_total = 0.0;
  double bound_total = 0.0;
  bool terms_ok = false;   // every level mass <= its bound term
  bool union_ok = false;   // direct_mass <= level_mass_total
  bool summable = false;   // decay < 1
  bool ok() const noexcept { return terms_ok && union_ok && summable; }
};

// S must be strengthened for rho; the bound terms are certified at rho = 1.
PLessThan2Trace weak_bound_p_lt_2(const SparseFamily& s, const GridFunction& f, const Weight& w, double p, Rational rho);

struct PEqual2Trace {
  double ap_char = 1.0;
  double c_ell0 = kDefaultEll0Constant;
  int ell0 = 0;
  double tau = 0.0;  // sum over ell >= ell0 of 2^{-ell/8}
  double f_norm_sq = 0.0;
  std::vector<TraceRecord> head;  // mass of {sum <f>^2 1_Q > 1/ell0}, bound (8/3)^2 ell0 [w] ||f||^2
  std::vector<TraceRecord> tail;  // mass of {sum <f>^2 1_Q > 2^{-ell/8}}, bound w{N_ell >= 2^{15 ell/8}}
  double direct_mass = 0.0;       // w{sum over S \ S1 of <f>^2 1_Q > 1 + tau}
  double head_bound_total = 0.0;
  double tail_bound_total = 0.0;
  double total_bound = 0.0;
  double envelope_ratio = 0.0;    // total_bound / ([w] (1 + log [w])^2 ||f||^2)
  bool head_ok = false;
  bool tail_ok = false;
  bool union_ok = false;
  // mass <= A exp(-c 2^{15 ell/8} / [w]) fitted on the nonzero tail masses
  std::size_t envelope_points = 0;
  std::optional<double> envelope_a;
  std::optional<double> envelope_c;
  bool ok() const noexcept { return head_ok && tail_ok && union_ok; }
};

PEqual2Trace weak_bound_p_eq_2(const SparseFamily& s, const GridFunction& f, const Weight& w, Rational rho,
                               double c_ell0 = kDefaultEll0Constant);

// Empirical max of ||M g||_{L^q(w)} / ||g||_{L^q(w)} over random g.
double estimate_maximal_norm(const Weight& w, const Domain& d, double q, std::size_t samples, std::uint64_t seed);

// One step of the weighted iteration, M(g w) / w with w as cell densities.
// With H built from it, M(H w) <= 2A H w, which is what puts H w in A_1.
GridFunction rdf_step(const GridFunction& g, const std::vector<double>& density);

// Empirical max of ||rdf_step g||_{L^q(w)} / ||g||_{L^q(w)} over random g.
double estimate_rdf_norm(const Weight& w, const Domain& d, double q, std::size_t samples, std::uint64_t seed);

struct RdfOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
};

struct ExtrapolationMajorant {
  GridFunction h;
  GridFunction H;
  int terms = 0;
  double a = 0.0;
  double qprime = 2.0;
  double m_estimate = 0.0;  // estimate_rdf_norm at q'
  std::vector<double> iterate_norms;  // ||S^k h||_{L^{q'}(w)}, k = 0..K+1
  double norm_h = 0.0;
  double norm_big_h = 0.0;
  double tail_max = 0.0;      // max of S^{K+1} h / (2A)^K
  bool h_le_big_h = false;
  bool norm_ok = false;       // ||H|| <= 2 ||h|| (1 + 1e-6)
  double max_excess = 0.0;    // max of (S H - 2A H - tail) / (2A H), <= ~0
  bool pointwise_ok = false;
  double a1_hw = 0.0;         // [H w]_{A_1}
  double ap_w = 0.0;          // [w]_{A_p}, p = 2 q
};

// H = sum_{k=0}^{K} S^k h / (2A)^k with S g = M(g w) / w and M the dyadic
// maximal function; for w = 1 this is the plain M^k h series.
// Refuses (PreconditionError) when A is below the empirical norm of S
// or when some iterate grows by more than A.
ExtrapolationMajorant rubio_de_francia(const GridFunction& h, const Weight& w, double qprime, double a, int terms,
                                       RdfOptions opts = {});

struct ExtrapolationOptions {
  double c_ell0 = kDefaultEll0Constant;
  int terms = 50;
  double a = 0.0;  // 0: 2.5 times the empirical estimate
  RdfOptions rdf;
};

struct ExtrapolationTrace {
  double p = 2.5;
  double qprime = 5.0;
  double ap_char = 1.0;
  double threshold = 1.0;       // lambda in w{T f > lambda}
  double level_mass = 0.0;      // w{T f > lambda}
  double realized = 0.0;        // level_mass^{1/p}
  double f_norm = 0.0;          // ||f||_{L^p(w)}
  double hw_a2 = 1.0;           // [H w]_{A_2}
  int ell0 = 0;
  double tail_mass = 0.0;       // H w-mass of the tail sets
  double chain_bound = 0.0;
  double envelope = 0.0;        // [w]^{1/2} (1 + log [w]) ||f||
  double chain_ratio = 0.0;     // chain_bound / envelope
  double realized_ratio = 0.0;  // realized / envelope
  bool consistent = false;      // realized <= chain_bound
  ExtrapolationMajorant majorant;
};

ExtrapolationTrace extrapolate_p_gt_2(const GridFunction& f, const Weight& w, double p, const SparseFamily& s,
                                      Rational rho, ExtrapolationOptions opts = {});

}  // namespace dyadlab

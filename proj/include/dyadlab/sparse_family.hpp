#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/grid_function.hpp"
#include "dyadlab/rational.hpp"

namespace dyadlab {

// Member Q whose proper sub-members cover the largest fraction of Q.
struct PackingWitness {
  DyadicInterval member;
  std::int64_t covered_cells = 0;
  std::int64_t member_cells = 0;
};

class SparseFamily {
 public:
  SparseFamily() = default;

  const Domain& domain() const noexcept { return domain_; }
  // Sorted by (level, index), no duplicates.
  const std::vector<DyadicInterval>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(const DyadicInterval& q) const;

  bool certified() const noexcept { return certified_; }
  const std::optional<Rational>& strengthened_for_rho() const noexcept { return strengthened_for_; }
  const std::optional<PackingWitness>& worst() const noexcept { return worst_; }

  // Subfamily with the given members; certificates are recomputed.
  SparseFamily subfamily(std::vector<DyadicInterval> members) const;

  void write(std::ostream& os) const;
  static SparseFamily read(std::istream& is);

 private:
  friend SparseFamily verify_sparse(const Domain&, std::vector<DyadicInterval>);
  friend bool certify_strengthened(SparseFamily&, Rational);

  Domain domain_;
  std::vector<DyadicInterval> members_;
  bool certified_ = false;
  std::optional<Rational> strengthened_for_;
  std::optional<PackingWitness> worst_;
};

// Containment forest of a family: parent[i] is the smallest member strictly
// containing member i (or -1); depth[i] counts its strict ancestors.
struct FamilyForest {
  std::vector<std::int64_t> parent;
  std::vector<int> depth;
  // Cells covered by the union of proper sub-members, i.e. by the children.
  std::vector<std::int64_t> covered_cells;
};

FamilyForest build_forest(const Domain& d, const std::vector<DyadicInterval>& sorted_members);

// |union of proper sub-members of Q| < |Q|/2 for every Q, compared exactly.
SparseFamily verify_sparse(const Domain& d, std::vector<DyadicInterval> family);

struct StrengthenedReport {
  bool packing_ok = true;          // |union of proper sub-members| < |Q| / (8 rho)
  bool dilates_disjoint = true;    // equal-length members have disjoint rho-dilates
  std::optional<PackingWitness> packing_violation;
  std::optional<std::pair<DyadicInterval, DyadicInterval>> overlapping_pair;
  bool ok() const noexcept { return packing_ok && dilates_disjoint; }
};

StrengthenedReport check_strengthened(const SparseFamily& family, Rational rho);

// Sets strengthened_for_rho when the check passes.
bool certify_strengthened(SparseFamily& family, Rational rho);

// Splits a certified family into subfamilies satisfying both strengthened
// conditions for rho. Members are grouped by (depth mod r, index mod m) with
// 2^r >= 8 rho and m = ceil(rho), so at most r*m = O(rho log rho) groups.
std::vector<SparseFamily> split_sparse(const SparseFamily& family, Rational rho);

// Upper bound on the number of groups split_sparse can produce.
std::int64_t split_group_bound(Rational rho);

// Stopping-time family: Q0 plus, recursively, the maximal dyadic Q' inside a
// member Q with <f>_{Q'} > 2 <f>_Q.
SparseFamily dominating_family(const GridFunction& f, const DyadicInterval& q0);

}  // namespace dyadlab

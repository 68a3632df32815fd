#include "dyadlab/sparse_family.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "dyadlab/error.hpp"

namespace dyadlab {
namespace {

void sort_unique(std::vector<DyadicInterval>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Order used to build the forest: by first cell, larger intervals first.
std::vector<std::size_t> spatial_order(const Domain& d, const std::vector<DyadicInterval>& m) {
  std::vector<std::size_t> order(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto fa = m[a].first_cell(d);
    const auto fb = m[b].first_cell(d);
    return fa != fb ? fa < fb : m[a].level < m[b].level;
  });
  return order;
}

}  // namespace

bool SparseFamily::contains(const DyadicInterval& q) const {
  return std::binary_search(members_.begin(), members_.end(), q);
}

FamilyForest build_forest(const Domain& d, const std::vector<DyadicInterval>& members) {
  FamilyForest forest;
  forest.parent.assign(members.size(), -1);
  forest.depth.assign(members.size(), 0);
  forest.covered_cells.assign(members.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i : spatial_order(d, members)) {
    while (!stack.empty() && !members[stack.back()].contains(members[i])) stack.pop_back();
    if (!stack.empty()) {
      const std::size_t p = stack.back();
      forest.parent[i] = static_cast<std::int64_t>(p);
      forest.depth[i] = forest.depth[p] + 1;
      // children of one parent are pairwise disjoint, so their lengths add up
      forest.covered_cells[p] += members[i].cell_count(d);
    }
    stack.push_back(i);
  }
  return forest;
}

SparseFamily verify_sparse(const Domain& d, std::vector<DyadicInterval> family) {
  for (const auto& q : family) q.require_in(d);
  sort_unique(family);
  SparseFamily out;
  out.domain_ = d;
  out.members_ = std::move(family);
  const FamilyForest forest = build_forest(d, out.members_);
  out.certified_ = true;
  for (std::size_t i = 0; i < out.members_.size(); ++i) {
    const std::int64_t covered = forest.covered_cells[i];
    const std::int64_t whole = out.members_[i].cell_count(d);
    if (2 * covered >= whole) out.certified_ = false;
    // worst = largest covered/whole, compared by cross-multiplication
    if (!out.worst_ || covered * out.worst_->member_cells > out.worst_->covered_cells * whole) {
      out.worst_ = PackingWitness{out.members_[i], covered, whole};
    }
  }
  return out;
}

SparseFamily SparseFamily::subfamily(std::vector<DyadicInterval> members) const {
  SparseFamily sub = verify_sparse(domain_, std::move(members));
  if (strengthened_for_) certify_strengthened(sub, *strengthened_for_);
  return sub;
}

StrengthenedReport check_strengthened(const SparseFamily& family, Rational rho) {
  if (rho < Rational(1)) throw PreconditionError("rho must be >= 1");
  const Domain& d = family.domain();
  const auto& m = family.members();
  StrengthenedReport rep;
  const FamilyForest forest = build_forest(d, m);
  const __int128 a = rho.num();
  const __int128 b = rho.den();
  for (std::size_t i = 0; i < m.size(); ++i) {
    // covered < |Q| / (8 rho)  <=>  8 a covered < b |Q|
    const __int128 covered = forest.covered_cells[i];
    const __int128 whole = m[i].cell_count(d);
    if (8 * a * covered >= b * whole) {
      if (rep.packing_ok) rep.packing_violation = PackingWitness{m[i], forest.covered_cells[i], m[i].cell_count(d)};
      rep.packing_ok = false;
    }
  }
  // members are sorted by (level, index): equal-length neighbours are adjacent
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (m[i].level != m[i - 1].level) continue;
    // centres are (index gap) lengths apart; dilates of length rho|Q| overlap iff gap < rho
    const __int128 gap = m[i].index - m[i - 1].index;
    if (gap * b < a) {
      if (rep.dilates_disjoint) rep.overlapping_pair = std::make_pair(m[i - 1], m[i]);
      rep.dilates_disjoint = false;
    }
  }
  return rep;
}

bool certify_strengthened(SparseFamily& family, Rational rho) {
  if (!family.certified_) return false;
  if (check_strengthened(family, rho).ok()) {
    family.strengthened_for_ = rho;
    return true;
  }
  family.strengthened_for_.reset();
  return false;
}

namespace {

struct SplitShape {
  int depth_period;          // r with 2^r >= 8 rho
  std::int64_t index_period; // m = ceil(rho)
};

SplitShape split_shape(Rational rho) {
  SplitShape s{0, 0};
  while ((static_cast<__int128>(1) << s.depth_period) * rho.den() < 8 * static_cast<__int128>(rho.num())) {
    ++s.depth_period;
  }
  s.index_period = (rho.num() + rho.den() - 1) / rho.den();
  return s;
}

}  // namespace

std::int64_t split_group_bound(Rational rho) {
  const SplitShape s = split_shape(rho);
  return s.depth_period * s.index_period;
}

std::vector<SparseFamily> split_sparse(const SparseFamily& family, Rational rho) {
  if (!family.certified()) throw PreconditionError("split_sparse needs a certified family");
  if (rho < Rational(1)) throw PreconditionError("rho must be >= 1");
  const Domain& d = family.domain();
  const auto& m = family.members();
  const SplitShape shape = split_shape(rho);
  const FamilyForest forest = build_forest(d, m);

  std::map<std::int64_t, std::vector<DyadicInterval>> groups;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::int64_t key = (forest.depth[i] % shape.depth_period) * shape.index_period + m[i].index % shape.index_period;
    groups[key].push_back(m[i]);
  }
  std::vector<SparseFamily> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) {
    SparseFamily sub = verify_sparse(d, std::move(members));
    if (!certify_strengthened(sub, rho)) {
      throw std::logic_error("split_sparse produced a subfamily that fails the strengthened check");
    }
    out.push_back(std::move(sub));
  }
  return out;
}

SparseFamily dominating_family(const GridFunction& f, const DyadicInterval& q0) {
  const Domain& d = f.domain();
  q0.require_in(d);
  const auto vals = f.values();
  for (std::int64_t i = 0; i < d.cells(); ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    if (v < 0.0) throw PreconditionError("dominating_family needs f >= 0");
    if (v != 0.0 && !q0.contains_cell(d, i)) throw PreconditionError("f is not supported in Q0");
  }
  const IntegralTable table(f);
  std::vector<DyadicInterval> members{q0};
  std::vector<DyadicInterval> pending{q0};
  std::vector<DyadicInterval> scan;
  while (!pending.empty()) {
    const DyadicInterval q = pending.back();
    pending.pop_back();
    const double iq = table.integral(q);
    if (iq <= 0.0 || q.level == d.resolution) continue;
    scan.clear();
    scan.push_back(q.left_child());
    scan.push_back(q.right_child());
    while (!scan.empty()) {
      const DyadicInterval p = scan.back();
      scan.pop_back();
      // <f>_P > 2 <f>_Q with |Q| = 2^(p.level - q.level) |P|; scaling by powers of two is exact
      const double ip = table.integral(p);
      if (std::ldexp(ip, p.level - q.level) > 2.0 * iq) {
        members.push_back(p);
        pending.push_back(p);
      } else if (p.level < d.resolution) {
        scan.push_back(p.left_child());
        scan.push_back(p.right_child());
      }
    }
  }
  SparseFamily fam = verify_sparse(d, std::move(members));
  if (!fam.certified()) throw std::logic_error("stopping-time family failed its sparseness certificate");
  return fam;
}

void SparseFamily::write(std::ostream& os) const {
  os << "# domain M=" << domain_.top_level << " J=" << domain_.resolution << '\n';
  for (const auto& q : members_) os << q.level << ' ' << q.index << '\n';
}

SparseFamily SparseFamily::read(std::istream& is) {
  std::string line;
  std::optional<Domain> dom;
  std::vector<DyadicInterval> members;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      int M = 0;
      int J = 0;
      if (std::sscanf(line.c_str(), "# domain M=%d J=%d", &M, &J) == 2) dom = Domain(M, J);
      continue;
    }
    std::istringstream row(line);
    DyadicInterval q;
    if (!(row >> q.level >> q.index)) throw FormatError("expected 'level index': " + line);
    members.push_back(q);
  }
  if (!dom) throw FormatError("missing '# domain M=<M> J=<J>' header");
  return verify_sparse(*dom, std::move(members));
}

}  // namespace dyadlab

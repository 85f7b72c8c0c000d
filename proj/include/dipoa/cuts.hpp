#ifndef DIPOA_CUTS_HPP_
#define DIPOA_CUTS_HPP_

#include <string>
#include <vector>

#include "dipoa/problem.hpp"

namespace dipoa {

enum class CutKind { kLinear, kSecondOrder, kFeasibility };
enum class CutSource { kSfp, kPrimal, kInfeasibility };

const char* ToString(CutKind kind);
const char* ToString(CutSource source);

// Optimality cuts bound the epigraph variable of node `node`:
//   alpha_node >= fval + grad'(x - xbar) [+ m/2 ||x - xbar||^2].
// Feasibility cuts require 0 >= fval + grad'(x - xbar); fval is 0 for the
// boundary form. `constraint` is the constraint index, or -1 for the cut on
// the summed constraints.
struct Cut {
  CutKind kind = CutKind::kLinear;
  int node = -1;
  int constraint = -1;
  Vector xbar;
  double fval = 0.0;
  Vector grad;
  double m = 0.0;

  double Evaluate(const Vector& x) const;
  // The affine part only (drops the quadratic term).
  double LinearPart(const Vector& x) const;
};

Cut MakeLinearCut(int node, const Vector& xbar, const ObjectiveOracle& oracle);
// Throws NotStronglyConvex when oracle.strong_convexity is 0.
Cut MakeSoCut(int node, const Vector& xbar, const ObjectiveOracle& oracle);
// Boundary form when |g(xbar)| <= 1e-8, otherwise keeps the constant g(xbar).
Cut MakeFeasibilityCut(int constraint, const Vector& xbar, const SmoothFunction& g,
                       int node = -1);
// Feasibility cut on sum_h g_h, constraint index -1. Any point with every
// g_h <= 0 satisfies it.
Cut MakeAggregateFeasibilityCut(const std::vector<ConstraintOracle>& constraints,
                                const Vector& xbar, int node = -1);

struct PoolEntry {
  Cut cut;
  int iteration = 0;
  CutSource source = CutSource::kPrimal;
};

// Append-only store; a cut with the same kind, owner and linearization point
// (within 1e-10) as a stored one is dropped.
class CutPool {
 public:
  bool Add(Cut cut, int iteration, CutSource source);

  const std::vector<PoolEntry>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  int Count(CutKind kind) const;

  std::string ToJson() const;

 private:
  std::vector<PoolEntry> entries_;
};

// (ub - lb) / max(ub, 0.001) * 100; infinite when either bound is missing.
double RelativeGap(double ub, double lb);
// (r_prev - r_cur) / r_prev.
double EventRatio(double r_prev, double r_cur);
// e <= tol; a previous gap of 0 (or two infinite gaps) counts as flat.
bool EventTriggered(double r_prev, double r_cur, double tol = 0.1);

}  // namespace dipoa

#endif  // DIPOA_CUTS_HPP_

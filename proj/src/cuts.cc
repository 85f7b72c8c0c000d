#include "dipoa/cuts.hpp"

#include <algorithm>

#include "json.hpp"

namespace dipoa {

const char* ToString(CutKind kind) {
  switch (kind) {
    case CutKind::kLinear:
      return "linear";
    case CutKind::kSecondOrder:
      return "second_order";
    case CutKind::kFeasibility:
      return "feasibility";
  }
  return "unknown";
}

const char* ToString(CutSource source) {
  switch (source) {
    case CutSource::kSfp:
      return "sfp";
    case CutSource::kPrimal:
      return "primal";
    case CutSource::kInfeasibility:
      return "infeasibility";
  }
  return "unknown";
}

double Cut::LinearPart(const Vector& x) const { return fval + grad.dot(x - xbar); }

double Cut::Evaluate(const Vector& x) const {
  double v = LinearPart(x);
  if (kind == CutKind::kSecondOrder) v += 0.5 * m * (x - xbar).squaredNorm();
  return v;
}

Cut MakeLinearCut(int node, const Vector& xbar, const ObjectiveOracle& oracle) {
  Cut cut;
  cut.kind = CutKind::kLinear;
  cut.node = node;
  cut.xbar = xbar;
  cut.fval = oracle.function->ValueAndGradient(xbar, &cut.grad);
  return cut;
}

Cut MakeSoCut(int node, const Vector& xbar, const ObjectiveOracle& oracle) {
  if (!(oracle.strong_convexity > 0)) {
    throw NotStronglyConvex("second-order cut needs a positive strong convexity modulus");
  }
  Cut cut = MakeLinearCut(node, xbar, oracle);
  cut.kind = CutKind::kSecondOrder;
  cut.m = oracle.strong_convexity;
  return cut;
}

Cut MakeFeasibilityCut(int constraint, const Vector& xbar, const SmoothFunction& g, int node) {
  Cut cut;
  cut.kind = CutKind::kFeasibility;
  cut.node = node;
  cut.constraint = constraint;
  cut.xbar = xbar;
  const double value = g.ValueAndGradient(xbar, &cut.grad);
  cut.fval = std::abs(value) <= 1e-8 ? 0.0 : value;
  return cut;
}

Cut MakeAggregateFeasibilityCut(const std::vector<ConstraintOracle>& constraints,
                                const Vector& xbar, int node) {
  Cut cut;
  cut.kind = CutKind::kFeasibility;
  cut.node = node;
  cut.constraint = -1;
  cut.xbar = xbar;
  cut.grad = Vector::Zero(xbar.size());
  double value = 0.0;
  Vector g;
  for (const auto& c : constraints) {
    value += c.function->ValueAndGradient(xbar, &g);
    cut.grad += g;
  }
  cut.fval = std::abs(value) <= 1e-8 ? 0.0 : value;
  return cut;
}

bool CutPool::Add(Cut cut, int iteration, CutSource source) {
  for (const auto& e : entries_) {
    const Cut& c = e.cut;
    if (c.kind == cut.kind && c.node == cut.node && c.constraint == cut.constraint &&
        c.xbar.size() == cut.xbar.size() &&
        (c.xbar - cut.xbar).lpNorm<Eigen::Infinity>() <= 1e-10) {
      return false;
    }
  }
  entries_.push_back(PoolEntry{std::move(cut), iteration, source});
  return true;
}

int CutPool::Count(CutKind kind) const {
  return static_cast<int>(std::count_if(entries_.begin(), entries_.end(),
                                        [&](const PoolEntry& e) { return e.cut.kind == kind; }));
}

std::string CutPool::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries_) {
    const Cut& c = e.cut;
    nlohmann::json j;
    j["kind"] = ToString(c.kind);
    j["node"] = c.node;
    if (c.kind == CutKind::kFeasibility) j["constraint"] = c.constraint;
    j["xbar"] = std::vector<double>(c.xbar.data(), c.xbar.data() + c.xbar.size());
    j["fval"] = c.fval;
    j["grad"] = std::vector<double>(c.grad.data(), c.grad.data() + c.grad.size());
    j["m"] = c.m;
    j["iteration"] = e.iteration;
    j["source"] = ToString(e.source);
    out.push_back(std::move(j));
  }
  return out.dump(2);
}

double RelativeGap(double ub, double lb) {
  if (!std::isfinite(ub) || !std::isfinite(lb)) return kInf;
  return (ub - lb) / std::max(ub, 0.001) * 100.0;
}

double EventRatio(double r_prev, double r_cur) {
  if (!std::isfinite(r_prev)) return std::isfinite(r_cur) ? 1.0 : 0.0;
  if (r_prev == 0.0) return 0.0;
  return (r_prev - r_cur) / r_prev;
}

bool EventTriggered(double r_prev, double r_cur, double tol) {
  if (r_prev == 0.0) return true;
  return EventRatio(r_prev, r_cur) <= tol;
}

}  // namespace dipoa

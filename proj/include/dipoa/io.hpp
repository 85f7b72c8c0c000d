#ifndef DIPOA_IO_HPP_
#define DIPOA_IO_HPP_

#include <string>

#include "dipoa/driver.hpp"
#include "dipoa/problem.hpp"

namespace dipoa {

// Instance JSON:
//   {"n", "N", "kappa", "polytope": {"D","d","A","b"},
//    "objectives": [{"kind": "quadratic", "Q","q","d"} | {"kind": "logistic", "X","labels","lambda"}],
//    "constraints": [{"kind": "quadratic", "Q","q","d"}], "big_m": [..] | null}
// An objective may carry an explicit "m"; otherwise it is the smallest
// eigenvalue of Q (quadratic) or lambda (logistic).
ScpInstance InstanceFromJson(const std::string& text);
// Only quadratic and logistic oracles can be written; others throw.
std::string InstanceToJson(const ScpInstance& inst);

// Reads DipoaConfig fields (use_sfp, eps_gap, et_tol, max_iter, time_limit_s,
// seed, shared_support, schedule, admm {...}) over the given defaults.
DipoaConfig ConfigFromJson(const std::string& text, DipoaConfig base = {});

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace dipoa

#endif  // DIPOA_IO_HPP_

#ifndef DIPOA_TYPES_HPP_
#define DIPOA_TYPES_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dipoa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A 0/1 indicator vector over the n coordinates (one per LFC in the master).
using BinaryVector = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Base class for every error the library raises; the derived type names the
// contract that was violated.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundedPolytope : public Error {
 public:
  using Error::Error;
};
class EmptyPolytope : public Error {
 public:
  using Error::Error;
};
class NotStronglyConvex : public Error {
 public:
  using Error::Error;
};
class SubproblemFailure : public Error {
 public:
  using Error::Error;
};
class NumericalFailure : public Error {
 public:
  using Error::Error;
};
class MissingContribution : public Error {
 public:
  using Error::Error;
};
class Timeout : public Error {
 public:
  using Error::Error;
};

// Portable pseudo-random source. The standard distributions are not
// bit-reproducible across library implementations, so uniform and normal
// draws are derived here from the raw 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t NextU64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).
  int Index(int n) { return static_cast<int>(NextU64() % static_cast<std::uint64_t>(n)); }

  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  Vector NormalVector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = Normal();
    return v;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dipoa

#endif  // DIPOA_TYPES_HPP_

/// @file sampling.hpp
/// Deterministic, platform-stable random sampling. Standard-library
/// distributions are implementation-defined, so the uint64 -> double mapping
/// is spelled out here; identical seeds give identical streams everywhere.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace fvrom {

/// SplitMix64 generator (public-domain algorithm); passes through every
/// 64-bit state exactly once.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with full 53-bit mantissa resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

 private:
  std::uint64_t state_;
};

/// n uniform samples in the axis-aligned box [lo, hi]; sample k, dimension d
/// consumes draw k*dim+d of the stream, so the result is reproducible and
/// independent of how callers batch the work.
inline std::vector<Eigen::VectorXd> sample_box(const Eigen::VectorXd& lo,
                                               const Eigen::VectorXd& hi, int n,
                                               std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd mu(lo.size());
    for (Eigen::Index d = 0; d < lo.size(); ++d) mu[d] = rng.uniform(lo[d], hi[d]);
    out.push_back(std::move(mu));
  }
  return out;
}

}  // namespace fvrom

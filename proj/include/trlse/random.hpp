#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace trlse {

using Point = Eigen::VectorXd;
/// A set of points, one point per row.
using Points = Eigen::MatrixXd;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes a list of integers into one seed; used to give every inner solve its
/// own reproducible stream.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline std::uint64_t hash_point(const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::uint64_t h = 0x13198a2e03707344ULL;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x[k]));
  }
  return h;
}

inline Points uniform_points(Eigen::Index count, Eigen::Index dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Points out(count, dim);
  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) out(i, k) = unif(rng);
  return out;
}

}  // namespace trlse

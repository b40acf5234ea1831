#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adev/rng.hpp"
#include "adev/unitary.hpp"

namespace adev {

/// Linear map R^{d_in} -> u(n), stored as one generator per input channel:
/// M(v) = sum_j v_j * generators[j].
class DevMap {
 public:
  DevMap() = default;
  explicit DevMap(std::vector<AntiHermitian> generators);
  static DevMap zero(int d_in, int lie_dim);

  int d_in() const { return static_cast<int>(gens_.size()); }
  int lie_dim() const { return gens_.empty() ? 0 : gens_.front().dim(); }
  const std::vector<AntiHermitian>& generators() const { return gens_; }
  const AntiHermitian& generator(int c) const { return gens_[static_cast<std::size_t>(c)]; }

  AntiHermitian apply(std::span<const double> v) const;

  std::size_t param_count() const {
    return gens_.size() * static_cast<std::size_t>(AntiHermitian::param_count(lie_dim()));
  }
  void to_params(std::span<double> out) const;
  RVector params() const;
  static DevMap from_params(int d_in, int lie_dim, std::span<const double> params);
  static DevMap from_params(int d_in, int lie_dim, const RVector& params);

 private:
  std::vector<AntiHermitian> gens_;
};

/// Empirical law of a random map: K maps with equal weights.
using MapEnsemble = std::vector<DevMap>;

/// One map whose generators are (G - G*)/2 of i.i.d. complex Gaussian G with
/// real and imaginary parts ~ N(0, init_std^2).
DevMap sample_dev_map(int d_in, int lie_dim, double init_std, Rng& rng);

/// K independent maps; map k draws from the stream derive_seed(seed, k).
MapEnsemble sample_map_ensemble(int d_in, int lie_dim, int count, double init_std,
                                std::uint64_t seed);

inline constexpr double kDefaultInitStd = 0.2;

}  // namespace adev

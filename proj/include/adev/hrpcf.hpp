#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "adev/devmap.hpp"
#include "adev/path.hpp"

namespace adev {

/// One sample's estimate of t -> Phi_{X_t}(M) for t = 0..T.
struct CondDevPath {
  std::vector<CMatrix> steps;
  std::size_t length() const { return steps.size(); }
};

/// Per rank-1 map M_i, the conditional development paths of every sample:
/// cond[i][sample].
using CondPathsPerMap = std::vector<std::vector<CondDevPath>>;

/// Real-linear map C^{n x n} -> u(m). The input is realified as
/// (Re P_00, Im P_00, Re P_01, Im P_01, ...) in row-major order; with
/// time_channel set, a leading channel k/T is prepended.
struct DevMap2 {
  int n = 0;
  bool time_channel = true;
  DevMap map;

  int lie_dim() const { return map.lie_dim(); }
  static int input_dim(int n, bool time_channel) { return 2 * n * n + (time_channel ? 1 : 0); }
};

using MapEnsemble2 = std::vector<DevMap2>;

DevMap2 make_dev_map2(int n, bool time_channel, DevMap map);
DevMap2 sample_dev_map2(int n, int lie_dim, bool time_channel, double init_std, Rng& rng);
MapEnsemble2 sample_map_ensemble2(int n, int lie_dim, int count, bool time_channel,
                                  double init_std, std::uint64_t seed);

/// Rank-1 and rank-2 maps with matching dimensions.
struct AdmissiblePair {
  DevMap m;
  DevMap2 m2;
  AdmissiblePair(DevMap m, DevMap2 m2);
};

/// T x input_dim increments of the realified (optionally time-augmented) path.
RMatrix rank2_increments(const CondDevPath& path, bool time_channel);

CMatrix develop_rank2(const DevMap2& m2, const CondDevPath& path);

std::vector<CMatrix> develop_rank2_all(const DevMap2& m2, const std::vector<CondDevPath>& paths,
                                       Exec exec = Exec::parallel);

/// Empirical HRPCF: mean of rank-2 developments in sample order.
CMatrix hrpcf(const DevMap2& m2, const std::vector<CondDevPath>& cond_paths,
              Exec exec = Exec::parallel);

/// The K2 rank-2 maps are shared across the K1 rank-1 maps; cond_x[i] and
/// cond_y[i] must come from the i-th rank-1 map.
double ehrpcfd_squared(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
                       const CondPathsPerMap& cond_y, Exec exec = Exec::parallel);
double ehrpcfd(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
               const CondPathsPerMap& cond_y, Exec exec = Exec::parallel);

/// Kernel kappa(p, q) = mean_{i,j} Re <U_{M2_j}(p^{M_i}), U_{M2_j}(q^{M_i})>.
/// p[i] and q[i] are the conditional paths under the i-th rank-1 map.
double hrpcf_kernel(const MapEnsemble2& m2_ens, const std::vector<CondDevPath>& p,
                    const std::vector<CondDevPath>& q);

/// One term of the truncated metric: ensembles of admissible pairs at (n, m).
struct PairEnsemble {
  MapEnsemble m;
  MapEnsemble2 m2;
};

/// Pair j (1-based) uses n = 2 + ceil(j/2), m = 3 + j.
std::vector<PairEnsemble> sample_truncation_sequence(int d_in, int terms, int k1, int k2,
                                                     double init_std, std::uint64_t seed);

/// Produces conditional paths for X and Y under the given rank-1 ensemble.
using CondProvider =
    std::function<std::pair<CondPathsPerMap, CondPathsPerMap>(const MapEnsemble&)>;

/// sum_{j<=J} min(1, EHRPCFD_j) / 2^j
double truncated_hrpcfd(const std::vector<PairEnsemble>& sequence, const CondProvider& provider,
                        int terms);

}  // namespace adev

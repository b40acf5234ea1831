#include "adev/hrpcf.hpp"

#include <algorithm>
#include <cmath>

#include "adev/errors.hpp"

namespace adev {

DevMap2 make_dev_map2(int n, bool time_channel, DevMap map) {
  require_arg(n >= 1, "rank-2 input size n must be >= 1");
  require_shape(map.d_in() == DevMap2::input_dim(n, time_channel),
                "rank-2 map needs 2n^2 (+1 with time) generators");
  return DevMap2{n, time_channel, std::move(map)};
}

DevMap2 sample_dev_map2(int n, int lie_dim, bool time_channel, double init_std, Rng& rng) {
  return make_dev_map2(n, time_channel,
                       sample_dev_map(DevMap2::input_dim(n, time_channel), lie_dim, init_std, rng));
}

MapEnsemble2 sample_map_ensemble2(int n, int lie_dim, int count, bool time_channel,
                                  double init_std, std::uint64_t seed) {
  require_arg(count >= 1, "ensemble size K must be >= 1");
  MapEnsemble2 ens;
  for (int k = 0; k < count; ++k) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(k));
    ens.push_back(sample_dev_map2(n, lie_dim, time_channel, init_std, rng));
  }
  return ens;
}

AdmissiblePair::AdmissiblePair(DevMap m_, DevMap2 m2_) : m(std::move(m_)), m2(std::move(m2_)) {
  require_shape(m.lie_dim() == m2.n, "admissible pair needs M.lie_dim == M2.n");
}

RMatrix rank2_increments(const CondDevPath& path, bool time_channel) {
  require_shape(path.length() >= 2, "conditional path needs at least 2 steps");
  const auto n = path.steps.front().rows();
  const auto steps = static_cast<Eigen::Index>(path.length()) - 1;
  const int off = time_channel ? 1 : 0;
  RMatrix inc(steps, 2 * n * n + off);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const CMatrix& a = path.steps[static_cast<std::size_t>(t)];
    const CMatrix& b = path.steps[static_cast<std::size_t>(t + 1)];
    require_shape(b.rows() == n && b.cols() == n, "conditional path steps must be n x n");
    if (time_channel) inc(t, 0) = 1.0 / static_cast<double>(steps);
    Eigen::Index c = off;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        const Complex d = b(j, k) - a(j, k);
        inc(t, c++) = d.real();
        inc(t, c++) = d.imag();
      }
    }
  }
  return inc;
}

CMatrix develop_rank2(const DevMap2& m2, const CondDevPath& path) {
  require_shape(!path.steps.empty() && path.steps.front().rows() == m2.n,
                "conditional path size does not match rank-2 map");
  return develop_increments(m2.map, rank2_increments(path, m2.time_channel));
}

std::vector<CMatrix> develop_rank2_all(const DevMap2& m2, const std::vector<CondDevPath>& paths,
                                       Exec exec) {
  require_arg(!paths.empty(), "no conditional paths given");
  std::vector<CMatrix> out(paths.size());
  for_each_index(exec, paths.size(), [&](std::size_t i) { out[i] = develop_rank2(m2, paths[i]); });
  return out;
}

CMatrix hrpcf(const DevMap2& m2, const std::vector<CondDevPath>& cond_paths, Exec exec) {
  return mean_in_order(develop_rank2_all(m2, cond_paths, exec));
}

double ehrpcfd_squared(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
                       const CondPathsPerMap& cond_y, Exec exec) {
  require_arg(!m2_ens.empty(), "rank-2 ensemble must be nonempty");
  require_shape(!cond_x.empty() && cond_x.size() == cond_y.size(),
                "conditional paths must be given for each rank-1 map on both sides");
  double s = 0.0;
  for (std::size_t i = 0; i < cond_x.size(); ++i)
    for (const auto& m2 : m2_ens)
      s += hs_distance_squared(hrpcf(m2, cond_x[i], exec), hrpcf(m2, cond_y[i], exec));
  return s / static_cast<double>(cond_x.size() * m2_ens.size());
}

double ehrpcfd(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
               const CondPathsPerMap& cond_y, Exec exec) {
  return std::sqrt(ehrpcfd_squared(m2_ens, cond_x, cond_y, exec));
}

double hrpcf_kernel(const MapEnsemble2& m2_ens, const std::vector<CondDevPath>& p,
                    const std::vector<CondDevPath>& q) {
  require_arg(!m2_ens.empty(), "rank-2 ensemble must be nonempty");
  require_shape(!p.empty() && p.size() == q.size(), "kernel needs one path per rank-1 map");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (const auto& m2 : m2_ens)
      s += hs_inner(develop_rank2(m2, p[i]), develop_rank2(m2, q[i])).real();
  return s / static_cast<double>(p.size() * m2_ens.size());
}

std::vector<PairEnsemble> sample_truncation_sequence(int d_in, int terms, int k1, int k2,
                                                     double init_std, std::uint64_t seed) {
  require_arg(terms >= 1, "truncation needs J >= 1");
  std::vector<PairEnsemble> seq;
  for (int j = 1; j <= terms; ++j) {
    const int n = 2 + (j + 1) / 2;
    const int m = 3 + j;
    const auto s = derive_seed(seed, static_cast<std::uint64_t>(j));
    seq.push_back({sample_map_ensemble(d_in, n, k1, init_std, derive_seed(s, 1)),
                   sample_map_ensemble2(n, m, k2, true, init_std, derive_seed(s, 2))});
  }
  return seq;
}

double truncated_hrpcfd(const std::vector<PairEnsemble>& sequence, const CondProvider& provider,
                        int terms) {
  require_arg(terms >= 1 && static_cast<std::size_t>(terms) <= sequence.size(),
              "truncation length exceeds the pair sequence");
  double s = 0.0;
  double w = 0.5;
  for (int j = 0; j < terms; ++j) {
    const auto& term = sequence[static_cast<std::size_t>(j)];
    const auto [cx, cy] = provider(term.m);
    s += std::min(1.0, ehrpcfd(term.m2, cx, cy)) * w;
    w *= 0.5;
  }
  return s;
}

}  // namespace adev

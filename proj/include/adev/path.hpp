#pragma once

#include <cstddef>
#include <vector>

#include "adev/devmap.hpp"
#include "adev/parallel.hpp"
#include "adev/unitary.hpp"

namespace adev {

/// Discretely sampled R^d path, linear between samples. values is L x d with
/// one row per time stamp.
class PiecewisePath {
 public:
  PiecewisePath() = default;
  PiecewisePath(RVector times, RMatrix values);

  Eigen::Index length() const { return times_.size(); }
  Eigen::Index dim() const { return values_.cols(); }
  const RVector& times() const { return times_; }
  const RMatrix& values() const { return values_; }

  /// (L-1) x d matrix of increments.
  RMatrix increments() const;

  /// Restriction to the samples [first, last] (inclusive).
  PiecewisePath slice(Eigen::Index first, Eigen::Index last) const;

 private:
  RVector times_;
  RMatrix values_;
};

/// N paths sharing one time grid and one dimension.
class Dataset {
 public:
  Dataset() = default;
  Dataset(RVector times, std::vector<RMatrix> values);
  explicit Dataset(const std::vector<PiecewisePath>& paths);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  Eigen::Index length() const { return times_.size(); }
  Eigen::Index dim() const { return values_.empty() ? 0 : values_.front().cols(); }
  const RVector& times() const { return times_; }
  const RMatrix& values(std::size_t i) const { return values_[i]; }
  const std::vector<RMatrix>& all_values() const { return values_; }
  PiecewisePath path(std::size_t i) const { return PiecewisePath(times_, values_[i]); }

  Dataset subset(const std::vector<std::size_t>& indices) const;
  Dataset concat(const Dataset& other) const;

 private:
  RVector times_;
  std::vector<RMatrix> values_;
};

/// Prepends a time channel running 0 -> 1: (t_i - t_0) / (t_{L-1} - t_0).
PiecewisePath time_augment(const PiecewisePath& path);
Dataset time_augment(const Dataset& data);

/// Normalized time channel for a grid of `points` equally spaced samples.
RVector unit_time_grid(Eigen::Index points);

// ---------------------------------------------------------------------------
// Developments

/// prod_i exp(M(increments.row(i))) multiplied left to right in time.
CMatrix develop_increments(const DevMap& map, const RMatrix& increments);

/// Unitary development of a piecewise linear path under M. The caller is
/// responsible for time augmentation.
CMatrix develop(const DevMap& map, const PiecewisePath& path);

/// Forward record of a development, kept for reverse-mode differentiation.
struct DevelopTape {
  std::vector<SpectralExp> steps;  // exp(M(dx_i)), i = 1..L-1
  std::vector<CMatrix> prefix;     // prefix[t] = E_1 ... E_t, prefix[0] = I
  const CMatrix& result() const { return prefix.back(); }
};

DevelopTape develop_tape(const DevMap& map, const RMatrix& increments);

/// Reverse pass. prefix_cotangents[t] is dL/d(prefix[t]) in the convention
/// dL = Re tr(C* dP); entries may be empty matrices (treated as zero).
/// Returns dL/dA_i for each step generator A_i = M(dx_i).
std::vector<CMatrix> develop_backward(const DevelopTape& tape,
                                      const std::vector<CMatrix>& prefix_cotangents);

/// Convenience: only the final product carries a cotangent.
std::vector<CMatrix> develop_backward(const DevelopTape& tape, const CMatrix& result_cotangent);

/// Accumulates sum_i inc(i, c) * algebra_grads[i] into per-generator
/// parameter gradients (scaled by `weight`).
void accumulate_generator_grads(const RMatrix& increments,
                                const std::vector<CMatrix>& algebra_grads, double weight,
                                std::span<double> param_grads);

/// dL/d increments(i, c) = Re <G_i, generator_c>.
RMatrix increment_grads(const DevMap& map, const std::vector<CMatrix>& algebra_grads);

/// Per-sample developments of a dataset.
std::vector<CMatrix> develop_all(const DevMap& map, const Dataset& data,
                                 Exec exec = Exec::parallel);

/// Empirical PCF: (1/N) sum_i U_M(x_i), summed in index order.
CMatrix pcf(const DevMap& map, const Dataset& data, Exec exec = Exec::parallel);

/// Mean of matrices in index order.
CMatrix mean_in_order(const std::vector<CMatrix>& mats);

double epcfd_squared(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y,
                     Exec exec = Exec::parallel);
double epcfd(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y,
             Exec exec = Exec::parallel);

/// Block-diagonal direct sum of two maps with the same input dimension.
DevMap direct_sum(const DevMap& a, const DevMap& b);

}  // namespace adev

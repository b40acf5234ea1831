#include "adev/unitary.hpp"

#include <cmath>
#include <string>

#include "adev/devmap.hpp"
#include "adev/errors.hpp"
#include "adev/rng.hpp"

namespace adev {

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

// (e^{ia} - e^{ib}) / (i(a - b)) written as e^{i(a+b)/2} sinc((a-b)/2); the
// product form has no cancellation for close eigenvalues.
Complex divided_difference(double a, double b) {
  const double gap = a - b;
  if (std::abs(gap) < kDegenerateGap) return std::polar(1.0, a);
  const double half = 0.5 * gap;
  return (std::sin(half) / half) * std::polar(1.0, 0.5 * (a + b));
}

CMatrix divided_difference_matrix(const RVector& angles) {
  const auto m = angles.size();
  CMatrix f(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = 0; j < m; ++j) f(j, k) = divided_difference(angles(j), angles(k));
  return f;
}

}  // namespace

AntiHermitian::AntiHermitian(const CMatrix& entries) {
  require_shape(entries.rows() == entries.cols() && entries.rows() > 0,
                "anti-Hermitian matrix must be square and non-empty");
  if (!all_finite(entries)) throw NumericError("anti-Hermitian matrix has non-finite entries");
  const double scale = std::max(1.0, entries.norm());
  const double defect = (entries + entries.adjoint()).norm();
  require_arg(defect <= 1e-12 * scale,
              "matrix is not anti-Hermitian (||A + A*|| = " + std::to_string(defect) + ")");
  m_ = 0.5 * (entries - entries.adjoint());
}

AntiHermitian AntiHermitian::zero(int dim) {
  require_arg(dim > 0, "dimension must be positive");
  return AntiHermitian(CMatrix::Zero(dim, dim), Trusted{});
}

AntiHermitian AntiHermitian::project(const CMatrix& g) {
  require_shape(g.rows() == g.cols() && g.rows() > 0, "projection needs a square matrix");
  return AntiHermitian(CMatrix(0.5 * (g - g.adjoint())), Trusted{});
}

AntiHermitian AntiHermitian::from_params(int dim, std::span<const double> params) {
  require_shape(static_cast<int>(params.size()) == param_count(dim),
                "parameter count does not match u(m) dimension");
  CMatrix m(dim, dim);
  std::size_t k = 0;
  for (int j = 0; j < dim; ++j) m(j, j) = Complex(0.0, params[k++]);
  for (int j = 0; j < dim; ++j) {
    for (int l = j + 1; l < dim; ++l) {
      const double re = params[k++];
      const double im = params[k++];
      m(j, l) = Complex(re, im);
      m(l, j) = Complex(-re, im);
    }
  }
  return AntiHermitian(std::move(m), Trusted{});
}

void AntiHermitian::to_params(std::span<double> out) const {
  const int d = dim();
  require_shape(static_cast<int>(out.size()) == param_count(d), "parameter buffer has wrong size");
  std::size_t k = 0;
  for (int j = 0; j < d; ++j) out[k++] = m_(j, j).imag();
  for (int j = 0; j < d; ++j) {
    for (int l = j + 1; l < d; ++l) {
      out[k++] = m_(j, l).real();
      out[k++] = m_(j, l).imag();
    }
  }
}

void AntiHermitian::gradient_to_params(const CMatrix& grad, std::span<double> out) {
  const auto d = static_cast<int>(grad.rows());
  require_shape(static_cast<int>(out.size()) == param_count(d), "parameter buffer has wrong size");
  std::size_t k = 0;
  for (int j = 0; j < d; ++j) out[k++] = grad(j, j).imag();
  for (int j = 0; j < d; ++j) {
    for (int l = j + 1; l < d; ++l) {
      out[k++] = grad(j, l).real() - grad(l, j).real();
      out[k++] = grad(j, l).imag() + grad(l, j).imag();
    }
  }
}

AntiHermitian AntiHermitian::combine(std::span<const AntiHermitian> gens,
                                     std::span<const double> coeffs) {
  require_shape(!gens.empty() && gens.size() == coeffs.size(),
                "combine needs one coefficient per generator");
  const int d = gens.front().dim();
  CMatrix m = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (coeffs[k] != 0.0) m.noalias() += coeffs[k] * gens[k].matrix();
  }
  return AntiHermitian(std::move(m), Trusted{});
}

AntiHermitian AntiHermitian::scaled(double s) const {
  return AntiHermitian(CMatrix(s * m_), Trusted{});
}

SpectralExp spectral_expm(const AntiHermitian& a) {
  const CMatrix& m = a.matrix();
  if (!all_finite(m)) throw NumericError("expm: non-finite generator entries");
  const CMatrix herm = Complex(0.0, -1.0) * m;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
  if (solver.info() != Eigen::Success) throw NumericError("expm: eigendecomposition failed");
  SpectralExp s;
  s.vectors = solver.eigenvectors();
  s.angles = solver.eigenvalues();
  Eigen::VectorXcd phases(s.angles.size());
  for (Eigen::Index k = 0; k < s.angles.size(); ++k) phases(k) = std::polar(1.0, s.angles(k));
  s.value.noalias() = s.vectors * phases.asDiagonal() * s.vectors.adjoint();
  return s;
}

CMatrix expm_anti_hermitian(const AntiHermitian& a) {
  CMatrix u = spectral_expm(a).value;
  if (!is_unitary(u)) {
    throw InternalError("expm: result violates unitarity (defect " +
                        std::to_string(unitarity_defect(u)) + ")");
  }
  return u;
}

double unitarity_defect(const CMatrix& u) {
  return (u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols())).norm();
}

bool is_unitary(const CMatrix& u, double tol) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tol;
}

double hs_norm(const CMatrix& a) { return a.norm(); }

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "hs_inner: dimension mismatch");
  // tr(A B*) = sum_jk A_jk conj(B_jk)
  return (a.array() * b.array().conjugate()).sum();
}

double hs_distance_squared(const CMatrix& a, const CMatrix& b) {
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "hs_distance: dimension mismatch");
  return (a - b).squaredNorm();
}

double hs_distance(const CMatrix& a, const CMatrix& b) {
  return std::sqrt(hs_distance_squared(a, b));
}

CMatrix expm_differential(const SpectralExp& s, const CMatrix& e) {
  require_shape(e.rows() == s.vectors.rows() && e.cols() == s.vectors.cols(),
                "expm_differential: dimension mismatch");
  const CMatrix f = divided_difference_matrix(s.angles);
  const CMatrix inner = s.vectors.adjoint() * e * s.vectors;
  return s.vectors * inner.cwiseProduct(f) * s.vectors.adjoint();
}

CMatrix expm_differential(const AntiHermitian& a, const AntiHermitian& e) {
  require_shape(a.dim() == e.dim(), "expm_differential: dimension mismatch");
  return expm_differential(spectral_expm(a), e.matrix());
}

CMatrix expm_differential_adjoint(const SpectralExp& s, const CMatrix& w) {
  const CMatrix f = divided_difference_matrix(s.angles);
  const CMatrix inner = s.vectors.adjoint() * w * s.vectors;
  return s.vectors * inner.cwiseProduct(f.conjugate()) * s.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Map ensembles

DevMap::DevMap(std::vector<AntiHermitian> generators) : gens_(std::move(generators)) {
  require_arg(!gens_.empty(), "a development map needs at least one generator");
  const int m = gens_.front().dim();
  for (const auto& g : gens_) require_shape(g.dim() == m, "generators must share one dimension");
}

DevMap DevMap::zero(int d_in, int lie_dim) {
  require_arg(d_in > 0 && lie_dim > 0, "DevMap dimensions must be positive");
  return DevMap(std::vector<AntiHermitian>(static_cast<std::size_t>(d_in),
                                           AntiHermitian::zero(lie_dim)));
}

AntiHermitian DevMap::apply(std::span<const double> v) const {
  require_shape(v.size() == gens_.size(), "DevMap input dimension mismatch");
  return AntiHermitian::combine(gens_, v);
}

void DevMap::to_params(std::span<double> out) const {
  require_shape(out.size() == param_count(), "DevMap parameter buffer has wrong size");
  const std::size_t per = static_cast<std::size_t>(AntiHermitian::param_count(lie_dim()));
  for (std::size_t k = 0; k < gens_.size(); ++k) gens_[k].to_params(out.subspan(k * per, per));
}

DevMap DevMap::from_params(int d_in, int lie_dim, std::span<const double> params) {
  const std::size_t per = static_cast<std::size_t>(AntiHermitian::param_count(lie_dim));
  require_shape(params.size() == per * static_cast<std::size_t>(d_in),
                "DevMap parameter count mismatch");
  std::vector<AntiHermitian> gens;
  gens.reserve(static_cast<std::size_t>(d_in));
  for (int k = 0; k < d_in; ++k)
    gens.push_back(AntiHermitian::from_params(lie_dim, params.subspan(k * per, per)));
  return DevMap(std::move(gens));
}

RVector DevMap::params() const {
  RVector p(static_cast<Eigen::Index>(param_count()));
  to_params(std::span<double>(p.data(), static_cast<std::size_t>(p.size())));
  return p;
}

DevMap DevMap::from_params(int d_in, int lie_dim, const RVector& params) {
  return from_params(d_in, lie_dim,
                     std::span<const double>(params.data(), static_cast<std::size_t>(params.size())));
}

DevMap sample_dev_map(int d_in, int lie_dim, double init_std, Rng& rng) {
  require_arg(d_in > 0 && lie_dim > 0, "DevMap dimensions must be positive");
  require_arg(init_std >= 0.0 && std::isfinite(init_std), "init_std must be finite and >= 0");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<AntiHermitian> gens;
  gens.reserve(static_cast<std::size_t>(d_in));
  for (int c = 0; c < d_in; ++c) {
    CMatrix g(lie_dim, lie_dim);
    for (int k = 0; k < lie_dim; ++k) {
      for (int j = 0; j < lie_dim; ++j) {
        const double re = normal(rng);
        const double im = normal(rng);
        g(j, k) = init_std * Complex(re, im);
      }
    }
    gens.push_back(AntiHermitian::project(g));
  }
  return DevMap(std::move(gens));
}

MapEnsemble sample_map_ensemble(int d_in, int lie_dim, int count, double init_std,
                                std::uint64_t seed) {
  require_arg(count >= 1, "ensemble size K must be >= 1");
  MapEnsemble ens;
  ens.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(k));
    ens.push_back(sample_dev_map(d_in, lie_dim, init_std, rng));
  }
  return ens;
}

}  // namespace adev

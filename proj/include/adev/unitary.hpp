#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace adev {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kUnitarityTol = 1e-10;

/// Element of the Lie algebra u(m): an m x m complex matrix with A + A* = 0.
///
/// The optimizer works on the m^2 real coordinates returned by to_params():
/// m imaginary diagonal parts, then (re, im) of each strict upper-triangle
/// entry in row-major order. Any parameter vector maps back to a valid
/// anti-Hermitian matrix, so updates never leave the algebra.
class AntiHermitian {
 public:
  AntiHermitian() = default;

  /// Validates the anti-Hermitian property (relative tolerance 1e-12) and
  /// stores the exact projection. Throws ShapeError / ArgumentError.
  explicit AntiHermitian(const CMatrix& entries);

  static AntiHermitian zero(int dim);
  /// (G - G*) / 2
  static AntiHermitian project(const CMatrix& g);
  static AntiHermitian from_params(int dim, std::span<const double> params);

  static constexpr int param_count(int dim) { return dim * dim; }
  void to_params(std::span<double> out) const;

  /// Chain rule from a Frobenius gradient G (dL = Re tr(G* dA)) to the
  /// real parameter coordinates of to_params().
  static void gradient_to_params(const CMatrix& grad, std::span<double> out);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  /// sum_k coeffs[k] * gens[k]; stays in u(m) exactly.
  static AntiHermitian combine(std::span<const AntiHermitian> gens,
                               std::span<const double> coeffs);

  AntiHermitian scaled(double s) const;

 private:
  struct Trusted {};
  AntiHermitian(CMatrix m, Trusted) : m_(std::move(m)) {}

  CMatrix m_;
};

/// Spectral data of exp(A) for anti-Hermitian A: -iA = V diag(lambda) V*.
struct SpectralExp {
  CMatrix vectors;
  RVector angles;
  CMatrix value;  // V diag(e^{i lambda}) V*
};

SpectralExp spectral_expm(const AntiHermitian& a);

/// exp(A) through the Hermitian eigendecomposition of -iA. Throws
/// NumericError on non-finite input and InternalError if the result fails the
/// unitarity check.
CMatrix expm_anti_hermitian(const AntiHermitian& a);

/// ||U U* - I||_HS
double unitarity_defect(const CMatrix& u);
bool is_unitary(const CMatrix& u, double tol = kUnitarityTol);

double hs_norm(const CMatrix& a);
/// <A, B>_HS = tr(A B*)
Complex hs_inner(const CMatrix& a, const CMatrix& b);
double hs_distance_squared(const CMatrix& a, const CMatrix& b);
double hs_distance(const CMatrix& a, const CMatrix& b);

/// Directional derivative D exp(A)[E] by the Daleckii-Krein formula.
CMatrix expm_differential(const AntiHermitian& a, const AntiHermitian& e);
CMatrix expm_differential(const SpectralExp& s, const CMatrix& e);

/// Adjoint of E -> D exp(A)[E] with respect to Re tr(X* Y): maps the
/// gradient with respect to exp(A) to the gradient with respect to A.
CMatrix expm_differential_adjoint(const SpectralExp& s, const CMatrix& w);

/// Eigenvalue gaps below this use the diagonal limit e^{i lambda_j}.
inline constexpr double kDegenerateGap = 1e-9;

}  // namespace adev

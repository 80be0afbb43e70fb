#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace homest {

using Complex = std::complex<double>;

/// Dense d×d complex operator (Hamiltonian, collapse operator, density matrix).
/// For the qubit preset index 0 is |g⟩ and index 1 is |e⟩, so σ₋ = |g⟩⟨e|.
using Operator = Eigen::MatrixXcd;
using DensityMatrix = Eigen::MatrixXcd;

/// Column-stacking vectorization: vec(ρ)[i + d·j] = ρ(i, j).
/// With this convention vec(A X B) = (Bᵀ ⊗ A) vec(X).
Eigen::VectorXcd vectorize(const Operator& op);
Operator unvectorize(const Eigen::VectorXcd& vec, int dim);

/// Linear map on d×d operators stored as a d²×d² matrix acting on vec(ρ).
class Superoperator {
 public:
  Superoperator() = default;
  Superoperator(int dim, Eigen::MatrixXcd matrix);

  static Superoperator identity(int dim);
  static Superoperator zero(int dim);

  int dim() const { return dim_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  Operator apply(const Operator& op) const;

  Superoperator operator*(const Superoperator& rhs) const;
  Superoperator operator+(const Superoperator& rhs) const;
  Superoperator operator-(const Superoperator& rhs) const;
  Superoperator operator*(Complex scale) const;

 private:
  int dim_ = 0;
  Eigen::MatrixXcd matrix_;
};

/// Left/right multiplication superoperators: ρ ↦ Aρ and ρ ↦ ρA.
Superoperator left_multiply(const Operator& a);
Superoperator right_multiply(const Operator& a);

/// ρ ↦ −i[H,ρ] + Σ_k (c_k ρ c_k† − ½{c_k†c_k, ρ}).
/// Throws InvalidArgument on mismatched dimensions or a non-Hermitian H.
Superoperator build_liouvillian(const Operator& hamiltonian, std::span<const Operator> collapse_ops);

/// Homodyne measurement map 𝓧_Φ ρ = c e^{−iΦ} ρ + ρ c† e^{iΦ}. The efficiency η is applied by callers.
Superoperator measurement_superop(const Operator& c, double phase);

/// Unique ρ with L(ρ) = 0 and Tr ρ = 1. Solves L augmented with the trace row in the least-squares
/// sense. Throws NumericalFailure when the second-smallest singular value of L is below
/// 1e-8·‖L‖ (degenerate null space) or when the residual exceeds 1e-10.
DensityMatrix steady_state(const Superoperator& liouvillian);

/// e^{Lτ} for τ ≥ 0.
Superoperator propagator(const Superoperator& liouvillian, double tau);

bool is_hermitian(const Operator& op, double rel_tol = 1e-12);
double min_eigenvalue(const Operator& hermitian);

/// Orthonormal Hermitian basis of d×d operators: d diagonal units E_jj, then for every j < k the
/// pair (E_jk + E_kj)/√2 and i(E_jk − E_kj)/√2. Hermitian operators have real coordinates
/// v_n = Tr[B_n ρ], and Hermiticity-preserving superoperators become real d²×d² matrices.
class HermitianBasis {
 public:
  explicit HermitianBasis(int dim);

  int dim() const { return dim_; }
  int size() const { return dim_ * dim_; }

  Eigen::VectorXd coordinates(const Operator& hermitian) const;
  Operator from_coordinates(std::span<const double> coords) const;

  /// Real matrix R with R(m, n) = Tr[B_m S(B_n)]; only meaningful for Hermiticity-preserving S.
  Eigen::MatrixXd real_matrix(const Superoperator& s) const;

  /// Row vector t with t·v = Tr ρ.
  Eigen::VectorXd trace_row() const;

  /// Smallest eigenvalue of the operator with the given coordinates (closed form for d = 2).
  double min_eigenvalue(std::span<const double> coords) const;

  /// Replaces negative eigenvalues by zero. Returns false when nothing had to change.
  bool clip_negative(std::span<double> coords) const;

 private:
  Operator element(int n) const;

  int dim_;
};

}  // namespace homest

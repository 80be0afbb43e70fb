#include "homest/qops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "homest/error.hpp"

namespace homest {

Eigen::VectorXcd vectorize(const Operator& op) {
  // Eigen is column-major, so the raw storage is already the column stack.
  return Eigen::Map<const Eigen::VectorXcd>(op.data(), op.size());
}

Operator unvectorize(const Eigen::VectorXcd& vec, int dim) {
  if (vec.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw InvalidArgument("unvectorize: length " + std::to_string(vec.size()) + " is not dim²");
  }
  return Eigen::Map<const Operator>(vec.data(), dim, dim);
}

Superoperator::Superoperator(int dim, Eigen::MatrixXcd matrix) : dim_(dim), matrix_(std::move(matrix)) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  if (dim < 1 || matrix_.rows() != n || matrix_.cols() != n) {
    throw InvalidArgument("Superoperator: matrix must be dim² × dim²");
  }
}

Superoperator Superoperator::identity(int dim) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  return {dim, Eigen::MatrixXcd::Identity(n, n)};
}

Superoperator Superoperator::zero(int dim) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  return {dim, Eigen::MatrixXcd::Zero(n, n)};
}

Operator Superoperator::apply(const Operator& op) const {
  if (op.rows() != dim_ || op.cols() != dim_) {
    throw InvalidArgument("Superoperator::apply: dimension mismatch");
  }
  return unvectorize(matrix_ * vectorize(op), dim_);
}

Superoperator Superoperator::operator*(const Superoperator& rhs) const {
  if (rhs.dim_ != dim_) throw InvalidArgument("Superoperator product: dimension mismatch");
  return {dim_, matrix_ * rhs.matrix_};
}

Superoperator Superoperator::operator+(const Superoperator& rhs) const {
  if (rhs.dim_ != dim_) throw InvalidArgument("Superoperator sum: dimension mismatch");
  return {dim_, matrix_ + rhs.matrix_};
}

Superoperator Superoperator::operator-(const Superoperator& rhs) const {
  if (rhs.dim_ != dim_) throw InvalidArgument("Superoperator difference: dimension mismatch");
  return {dim_, matrix_ - rhs.matrix_};
}

Superoperator Superoperator::operator*(Complex scale) const { return {dim_, matrix_ * scale}; }

Superoperator left_multiply(const Operator& a) {
  const auto dim = static_cast<int>(a.rows());
  const Operator id = Operator::Identity(dim, dim);
  return {dim, Eigen::kroneckerProduct(id, a).eval()};
}

Superoperator right_multiply(const Operator& a) {
  const auto dim = static_cast<int>(a.rows());
  const Operator id = Operator::Identity(dim, dim);
  return {dim, Eigen::kroneckerProduct(a.transpose(), id).eval()};
}

bool is_hermitian(const Operator& op, double rel_tol) {
  if (op.rows() != op.cols()) return false;
  const double scale = std::max(op.norm(), 1.0);
  return (op - op.adjoint()).norm() <= rel_tol * scale;
}

double min_eigenvalue(const Operator& hermitian) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Superoperator build_liouvillian(const Operator& hamiltonian, std::span<const Operator> collapse_ops) {
  const auto dim = static_cast<int>(hamiltonian.rows());
  if (dim < 1 || hamiltonian.cols() != dim) throw InvalidArgument("build_liouvillian: H must be square");
  if (!is_hermitian(hamiltonian)) throw InvalidArgument("build_liouvillian: H is not Hermitian");

  const Complex i_unit{0.0, 1.0};
  Superoperator l = (left_multiply(hamiltonian) - right_multiply(hamiltonian)) * (-i_unit);
  for (const Operator& c : collapse_ops) {
    if (c.rows() != dim || c.cols() != dim) throw InvalidArgument("build_liouvillian: collapse operator dimension");
    const Operator cdc = c.adjoint() * c;
    // c ρ c† = (c̄ ⊗ c) vec ρ
    const Superoperator jump{dim, Eigen::kroneckerProduct(c.conjugate(), c).eval()};
    l = l + jump - (left_multiply(cdc) + right_multiply(cdc)) * Complex{0.5, 0.0};
  }
  return l;
}

Superoperator measurement_superop(const Operator& c, double phase) {
  const Complex rot = std::polar(1.0, -phase);
  return left_multiply(c) * rot + right_multiply(c.adjoint()) * std::conj(rot);
}

DensityMatrix steady_state(const Superoperator& liouvillian) {
  const int dim = liouvillian.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  const Eigen::MatrixXcd& l = liouvillian.matrix();

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(l);
  const Eigen::VectorXd& sv = svd.singularValues();  // descending
  const double norm = sv(0);
  if (n >= 2 && !(sv(n - 2) > 1e-8 * norm)) {
    throw NumericalFailure("steady_state: null space of the Liouvillian is degenerate (σ_{n-1} = " +
                           std::to_string(sv(n - 2)) + ", ‖L‖ = " + std::to_string(norm) + ")");
  }

  Eigen::MatrixXcd augmented(n + 1, n);
  augmented.topRows(n) = l;
  augmented.row(n).setZero();
  for (int j = 0; j < dim; ++j) augmented(n, j + static_cast<Eigen::Index>(dim) * j) = 1.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
  rhs(n) = 1.0;

  const Eigen::VectorXcd solution = augmented.colPivHouseholderQr().solve(rhs);
  DensityMatrix rho = unvectorize(solution, dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();

  const double residual = (l * vectorize(rho)).norm();
  if (!(residual < 1e-10 * std::max(1.0, norm))) {
    throw NumericalFailure("steady_state: residual " + std::to_string(residual) + " too large");
  }
  return rho;
}

Superoperator propagator(const Superoperator& liouvillian, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("propagator: τ must be non-negative");
  if (tau == 0.0) return Superoperator::identity(liouvillian.dim());
  const Eigen::MatrixXcd scaled = liouvillian.matrix() * tau;
  return {liouvillian.dim(), scaled.exp()};
}

// ---------------------------------------------------------------------------------------------

HermitianBasis::HermitianBasis(int dim) : dim_(dim) {
  if (dim < 1) throw InvalidArgument("HermitianBasis: dim must be positive");
}

Operator HermitianBasis::element(int n) const {
  Operator b = Operator::Zero(dim_, dim_);
  if (n < dim_) {
    b(n, n) = 1.0;
    return b;
  }
  int idx = dim_;
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim_; ++j) {
    for (int k = j + 1; k < dim_; ++k) {
      if (idx == n) {
        b(j, k) = s;
        b(k, j) = s;
        return b;
      }
      if (idx + 1 == n) {
        b(j, k) = Complex{0.0, s};
        b(k, j) = Complex{0.0, -s};
        return b;
      }
      idx += 2;
    }
  }
  throw InvalidArgument("HermitianBasis: element index out of range");
}

Eigen::VectorXd HermitianBasis::coordinates(const Operator& hermitian) const {
  if (hermitian.rows() != dim_ || hermitian.cols() != dim_) {
    throw InvalidArgument("HermitianBasis::coordinates: dimension mismatch");
  }
  Eigen::VectorXd v(size());
  for (int j = 0; j < dim_; ++j) v(j) = hermitian(j, j).real();
  int idx = dim_;
  const double r = std::sqrt(2.0);
  for (int j = 0; j < dim_; ++j) {
    for (int k = j + 1; k < dim_; ++k) {
      // Tr[B ρ] for the symmetric and antisymmetric elements.
      const Complex avg = 0.5 * (hermitian(j, k) + std::conj(hermitian(k, j)));
      v(idx++) = r * avg.real();
      v(idx++) = r * avg.imag();
    }
  }
  return v;
}

Operator HermitianBasis::from_coordinates(std::span<const double> coords) const {
  if (static_cast<int>(coords.size()) != size()) {
    throw InvalidArgument("HermitianBasis::from_coordinates: wrong length");
  }
  Operator op = Operator::Zero(dim_, dim_);
  for (int j = 0; j < dim_; ++j) op(j, j) = coords[j];
  std::size_t idx = dim_;
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim_; ++j) {
    for (int k = j + 1; k < dim_; ++k) {
      const Complex value{s * coords[idx], s * coords[idx + 1]};
      op(j, k) = value;
      op(k, j) = std::conj(value);
      idx += 2;
    }
  }
  return op;
}

Eigen::MatrixXd HermitianBasis::real_matrix(const Superoperator& s) const {
  if (s.dim() != dim_) throw InvalidArgument("HermitianBasis::real_matrix: dimension mismatch");
  Eigen::MatrixXd r(size(), size());
  for (int n = 0; n < size(); ++n) {
    const Operator image = s.apply(element(n));
    for (int m = 0; m < size(); ++m) {
      r(m, n) = (element(m) * image).trace().real();
    }
  }
  return r;
}

Eigen::VectorXd HermitianBasis::trace_row() const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(size());
  t.head(dim_).setOnes();
  return t;
}

double HermitianBasis::min_eigenvalue(std::span<const double> coords) const {
  if (dim_ == 2) {
    const double a = coords[0];
    const double d = coords[1];
    // |ρ_01|² = (v_s² + v_a²)/2
    const double off2 = 0.5 * (coords[2] * coords[2] + coords[3] * coords[3]);
    const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + off2);
    return 0.5 * (a + d) - half_gap;
  }
  return homest::min_eigenvalue(from_coordinates(coords));
}

bool HermitianBasis::clip_negative(std::span<double> coords) const {
  if (min_eigenvalue(coords) >= 0.0) return false;
  Eigen::SelfAdjointEigenSolver<Operator> solver(from_coordinates(coords));
  const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  const Operator repaired = solver.eigenvectors() * clipped.cast<Complex>().asDiagonal() *
                            solver.eigenvectors().adjoint();
  const Eigen::VectorXd v = coordinates(repaired);
  std::copy(v.data(), v.data() + v.size(), coords.begin());
  return true;
}

}  // namespace homest

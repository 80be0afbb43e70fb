#pragma once

// Real-coordinate kernels for the conditional master equation. Internal to homest_core.

#include <array>
#include <cmath>
#include <vector>

#include "homest/model.hpp"
#include "homest/qops.hpp"

namespace homest::detail {

/// Row-major real forms of the superoperators that drive a trajectory.
struct SmeOperators {
  HermitianBasis basis;
  int n = 0;
  std::vector<double> liouvillian;
  std::vector<double> measurement;
  std::vector<double> trace_x;
  double sqrt_eta = 1.0;

  SmeOperators(const SystemModel& model, double theta);
};

std::vector<double> to_row_major(const Eigen::MatrixXd& m);

template <int N>
inline void matvec(const double* m, const double* v, double* out, int n) {
  const int size = N > 0 ? N : n;
  for (int i = 0; i < size; ++i) {
    double acc = 0.0;
    for (int j = 0; j < size; ++j) acc += m[i * size + j] * v[j];
    out[i] = acc;
  }
}

template <int N>
inline double dot(const double* a, const double* b, int n) {
  const int size = N > 0 ? N : n;
  double acc = 0.0;
  for (int i = 0; i < size; ++i) acc += a[i] * b[i];
  return acc;
}

/// Trace of an operator from Hermitian-basis coordinates (the first `dim` entries are diagonal).
inline double coords_trace(const double* v, int dim) {
  double t = 0.0;
  for (int j = 0; j < dim; ++j) t += v[j];
  return t;
}

/// Positivity-preserving first-order step written as a polynomial in the measured increment:
///   ρ' ∝ M ρ M† + (1 − η) dt a ρ a† + dt Σ_{unmonitored} c ρ c†,
///   M = I − (iH + ½Σc†c) dt + √η a dy + (η/2) a² (dy² − dt),  a = c e^{−iΦ},
/// so that ρ' = Σ_k dy^k P_k ρ before normalization. To first order in dt this is the same
/// Itô equation as the Euler–Maruyama update, but a pure state stays pure at η = 1.
///
/// `mean` is P̄ = E[P(dy)] for dy ~ Normal(0, dt). The density φ(dy) Tr[P(dy)ρ] / Tr[P̄ρ] of the
/// next increment integrates to one, and at η = 0 P̄ equals P bit for bit.
struct KrausPolynomial {
  int n = 0;
  std::array<std::vector<double>, 5> p;
  std::vector<double> mean;

  KrausPolynomial(const SystemModel& model, double theta, double dt);
};

template <int N>
inline void kraus_apply(const KrausPolynomial& k, const double* v, double dy, double* out, double* scratch) {
  const int n = k.n;
  const int size = N > 0 ? N : n;
  // Horner in dy.
  matvec<N>(k.p[4].data(), v, out, n);
  for (int order = 3; order >= 0; --order) {
    matvec<N>(k.p[order].data(), v, scratch, n);
    for (int i = 0; i < size; ++i) out[i] = scratch[i] + dy * out[i];
  }
}

}  // namespace homest::detail

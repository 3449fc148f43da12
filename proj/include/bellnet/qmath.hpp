#pragma once

// Dense complex linear algebra and quantum-state primitives.
//
// Qubit 0 is the most significant bit of a computational-basis index, so the
// state |q0 q1 ... q_{N-1}> lives at index sum_k q_k * 2^(N-1-k).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bellnet {

using cplx = std::complex<double>;

inline constexpr double kValidationTol = 1e-8;
inline constexpr double kSelfCheckTol = 1e-10;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                                  " does not match " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_));
    }
  }
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("ComplexMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("ComplexMatrix: product shape mismatch");
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx(0.0, 0.0)) continue;
        const cplx* brow = &b.data_[k * b.cols_];
        cplx* orow = &out.data_[i * out.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
      }
    }
    return out;
  }

  std::vector<cplx> apply(std::span<const cplx> v) const {
    if (v.size() != cols_) throw std::invalid_argument("ComplexMatrix: vector length mismatch");
    std::vector<cplx> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
      out[i] = acc;
    }
    return out;
  }

  double max_abs_diff(const ComplexMatrix& o) const {
    require_same_shape(o);
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - o.data_[i]));
    return m;
  }

  bool is_hermitian(double tol = kValidationTol) const {
    if (!is_square()) return false;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r; c < cols_; ++c)
        if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
    return true;
  }

  bool is_unitary(double tol = kValidationTol) const {
    if (!is_square()) return false;
    return (adjoint() * (*this)).max_abs_diff(identity(rows_)) <= tol;
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("ComplexMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx s = a(ar, ac);
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

inline ComplexMatrix outer(std::span<const cplx> ket, std::span<const cplx> bra) {
  ComplexMatrix out(ket.size(), bra.size());
  for (std::size_t i = 0; i < ket.size(); ++i)
    for (std::size_t j = 0; j < bra.size(); ++j) out(i, j) = ket[i] * std::conj(bra[j]);
  return out;
}

namespace pauli {
inline ComplexMatrix I() { return ComplexMatrix::identity(2); }
inline ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix Y() { return {{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}}; }
inline ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
// index 0..3 -> I, X, Y, Z
inline ComplexMatrix by_index(int k) {
  switch (k) {
    case 0: return I();
    case 1: return X();
    case 2: return Y();
    case 3: return Z();
    default: throw std::invalid_argument("pauli::by_index: index must be 0..3");
  }
}
}  // namespace pauli

inline ComplexMatrix hadamard() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {{s, s}, {s, -s}};
}

// CNOT with the first qubit as control.
inline ComplexMatrix cnot() {
  ComplexMatrix m(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return m;
}

inline std::size_t dim_of(int num_qubits) { return std::size_t{1} << num_qubits; }

class Ket {
 public:
  Ket() = default;
  Ket(int num_qubits, std::vector<cplx> amplitudes)
      : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits_ < 0 || amps_.size() != dim_of(num_qubits_))
      throw std::invalid_argument("Ket: amplitude count must be 2^num_qubits");
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > kValidationTol)
      throw std::invalid_argument("Ket: squared norm " + std::to_string(n2) + " differs from 1");
  }
  static Ket zero(int num_qubits) {
    std::vector<cplx> a(dim_of(num_qubits), 0.0);
    a[0] = 1.0;
    return Ket(num_qubits, std::move(a));
  }

  int num_qubits() const { return num_qubits_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::vector<cplx>& mutable_amplitudes() { return amps_; }

 private:
  int num_qubits_ = 0;
  std::vector<cplx> amps_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;

  // Validated construction: trace 1, Hermitian, positive semidefinite.
  static DensityMatrix from_matrix(ComplexMatrix m);

  // No validation; for states produced by trusted internal pipelines.
  static DensityMatrix unchecked(int num_qubits, ComplexMatrix m) {
    DensityMatrix d;
    d.num_qubits_ = num_qubits;
    d.m_ = std::move(m);
    return d;
  }

  static DensityMatrix from_ket(const Ket& k) {
    return unchecked(k.num_qubits(), outer(k.amplitudes(), k.amplitudes()));
  }

  static DensityMatrix zero_state(int num_qubits) { return from_ket(Ket::zero(num_qubits)); }

  static DensityMatrix maximally_mixed(int num_qubits) {
    const std::size_t d = dim_of(num_qubits);
    return unchecked(num_qubits, ComplexMatrix::identity(d) * cplx(1.0 / double(d), 0.0));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  int num_qubits_ = 0;
  ComplexMatrix m_;
};

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic complex Jacobi). Eigenvalues ascending,
// eigenvectors stored as columns.

struct HermitianEigen {
  std::vector<double> values;
  ComplexMatrix vectors;
};

inline HermitianEigen hermitian_eigen(const ComplexMatrix& input, double tol = kValidationTol) {
  if (!input.is_square()) throw std::invalid_argument("hermitian_eigen: matrix must be square");
  if (!input.is_hermitian(tol)) throw std::invalid_argument("hermitian_eigen: matrix not Hermitian");
  const std::size_t n = input.rows();
  ComplexMatrix a = input;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);

  double scale = 0.0;
  for (const auto& x : a.data()) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) scale = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-15 * scale * double(n)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Phase-rotate so the off-diagonal entry is real, then a real Jacobi step.
        const cplx ph = apq / mag;
        const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // Columns p,q transform with G = [[c, s*ph], [-s*conj(ph), c]] acting as A <- G^H A G.
        const cplx gpp = c, gpq = s * ph, gqp = -s * std::conj(ph), gqq = c;
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

inline DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
  if (!m.is_square()) throw std::invalid_argument("DensityMatrix: matrix must be square");
  const std::size_t d = m.rows();
  int n = 0;
  while (dim_of(n) < d) ++n;
  if (dim_of(n) != d) throw std::invalid_argument("DensityMatrix: dimension must be a power of two");
  if (std::abs(m.trace() - cplx(1.0, 0.0)) > kValidationTol)
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  if (!m.is_hermitian(kValidationTol)) throw std::invalid_argument("DensityMatrix: not Hermitian");
  const auto eig = hermitian_eigen(m);
  if (eig.values.front() < -kValidationTol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(eig.values.front()));
  return unchecked(n, std::move(m));
}

// ---------------------------------------------------------------------------
// Embedding of a local operator on a subset of qubits.

struct TargetIndex {
  std::vector<std::size_t> offsets;  // local basis index -> offset in the full register
  std::vector<std::size_t> bases;    // full indices whose target bits are all zero
};

inline void validate_targets(int num_qubits, std::span<const int> targets) {
  if (targets.empty()) throw std::invalid_argument("targets must be nonempty");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits)
      throw std::invalid_argument("target qubit " + std::to_string(targets[i]) + " out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j])
        throw std::invalid_argument("target qubit " + std::to_string(targets[i]) + " repeated");
  }
}

inline TargetIndex make_target_index(int num_qubits, std::span<const int> targets) {
  validate_targets(num_qubits, targets);
  const std::size_t k = targets.size();
  TargetIndex ti;
  ti.offsets.resize(dim_of(int(k)));
  std::size_t mask = 0;
  for (std::size_t t = 0; t < k; ++t) mask |= std::size_t{1} << (num_qubits - 1 - targets[t]);
  for (std::size_t l = 0; l < ti.offsets.size(); ++l) {
    std::size_t off = 0;
    for (std::size_t t = 0; t < k; ++t)
      if ((l >> (k - 1 - t)) & 1U) off |= std::size_t{1} << (num_qubits - 1 - targets[t]);
    ti.offsets[l] = off;
  }
  const std::size_t d = dim_of(num_qubits);
  ti.bases.reserve(d >> k);
  for (std::size_t i = 0; i < d; ++i)
    if ((i & mask) == 0) ti.bases.push_back(i);
  return ti;
}

namespace detail {

// rho <- (op on targets) rho, in place on a row-major d x d buffer.
inline void left_multiply(std::vector<cplx>& rho, std::size_t d, const ComplexMatrix& op,
                          const TargetIndex& ti) {
  const std::size_t t = ti.offsets.size();
  std::vector<cplx> in(t), out(t);
  for (std::size_t col = 0; col < d; ++col) {
    for (std::size_t b : ti.bases) {
      for (std::size_t l = 0; l < t; ++l) in[l] = rho[(b + ti.offsets[l]) * d + col];
      for (std::size_t r = 0; r < t; ++r) {
        cplx acc = 0.0;
        for (std::size_t l = 0; l < t; ++l) acc += op(r, l) * in[l];
        out[r] = acc;
      }
      for (std::size_t l = 0; l < t; ++l) rho[(b + ti.offsets[l]) * d + col] = out[l];
    }
  }
}

// rho <- rho (op on targets)^dagger, in place.
inline void right_multiply_adjoint(std::vector<cplx>& rho, std::size_t d, const ComplexMatrix& op,
                                   const TargetIndex& ti) {
  const std::size_t t = ti.offsets.size();
  std::vector<cplx> in(t), out(t);
  for (std::size_t row = 0; row < d; ++row) {
    cplx* r = &rho[row * d];
    for (std::size_t b : ti.bases) {
      for (std::size_t l = 0; l < t; ++l) in[l] = r[b + ti.offsets[l]];
      for (std::size_t c = 0; c < t; ++c) {
        cplx acc = 0.0;
        for (std::size_t l = 0; l < t; ++l) acc += in[l] * std::conj(op(c, l));
        out[c] = acc;
      }
      for (std::size_t l = 0; l < t; ++l) r[b + ti.offsets[l]] = out[l];
    }
  }
}

inline void apply_to_vector(std::vector<cplx>& psi, const ComplexMatrix& op, const TargetIndex& ti) {
  const std::size_t t = ti.offsets.size();
  std::vector<cplx> in(t);
  for (std::size_t b : ti.bases) {
    for (std::size_t l = 0; l < t; ++l) in[l] = psi[b + ti.offsets[l]];
    for (std::size_t r = 0; r < t; ++r) {
      cplx acc = 0.0;
      for (std::size_t l = 0; l < t; ++l) acc += op(r, l) * in[l];
      psi[b + ti.offsets[r]] = acc;
    }
  }
}

inline void require_op_dim(const ComplexMatrix& op, std::size_t k) {
  if (!op.is_square() || op.rows() != dim_of(int(k)))
    throw std::invalid_argument("operator dimension " + std::to_string(op.rows()) +
                                " does not match 2^" + std::to_string(k));
}

}  // namespace detail

inline DensityMatrix apply_unitary(const DensityMatrix& state, const ComplexMatrix& u,
                                   std::span<const int> targets) {
  detail::require_op_dim(u, targets.size());
  if (!u.is_unitary(kValidationTol)) throw std::invalid_argument("apply_unitary: operator is not unitary");
  const auto ti = make_target_index(state.num_qubits(), targets);
  std::vector<cplx> rho = state.matrix().data();
  const std::size_t d = state.dim();
  detail::left_multiply(rho, d, u, ti);
  detail::right_multiply_adjoint(rho, d, u, ti);
  return DensityMatrix::unchecked(state.num_qubits(), ComplexMatrix(d, d, std::move(rho)));
}

inline DensityMatrix apply_unitary(const DensityMatrix& state, const ComplexMatrix& u,
                                   std::initializer_list<int> targets) {
  return apply_unitary(state, u, std::span<const int>(targets.begin(), targets.size()));
}

inline Ket apply_unitary(const Ket& state, const ComplexMatrix& u, std::span<const int> targets) {
  detail::require_op_dim(u, targets.size());
  if (!u.is_unitary(kValidationTol)) throw std::invalid_argument("apply_unitary: operator is not unitary");
  const auto ti = make_target_index(state.num_qubits(), targets);
  Ket out = state;
  detail::apply_to_vector(out.mutable_amplitudes(), u, ti);
  return out;
}

inline bool kraus_complete(const std::vector<ComplexMatrix>& kraus, double tol = kValidationTol) {
  if (kraus.empty()) return false;
  ComplexMatrix sum(kraus.front().cols(), kraus.front().cols());
  for (const auto& k : kraus) {
    if (k.rows() != sum.rows() || k.cols() != sum.cols()) return false;
    sum += k.adjoint() * k;
  }
  return sum.max_abs_diff(ComplexMatrix::identity(sum.rows())) <= tol;
}

inline DensityMatrix apply_kraus(const DensityMatrix& state, const std::vector<ComplexMatrix>& kraus,
                                 std::span<const int> targets) {
  if (kraus.empty()) throw std::invalid_argument("apply_kraus: empty Kraus list");
  for (const auto& k : kraus) detail::require_op_dim(k, targets.size());
  if (!kraus_complete(kraus)) throw std::invalid_argument("apply_kraus: completeness violated");
  const auto ti = make_target_index(state.num_qubits(), targets);
  const std::size_t d = state.dim();
  std::vector<cplx> acc(d * d, 0.0);
  for (const auto& k : kraus) {
    std::vector<cplx> rho = state.matrix().data();
    detail::left_multiply(rho, d, k, ti);
    detail::right_multiply_adjoint(rho, d, k, ti);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += rho[i];
  }
  return DensityMatrix::unchecked(state.num_qubits(), ComplexMatrix(d, d, std::move(acc)));
}

inline DensityMatrix apply_kraus(const DensityMatrix& state, const std::vector<ComplexMatrix>& kraus,
                                 std::initializer_list<int> targets) {
  return apply_kraus(state, kraus, std::span<const int>(targets.begin(), targets.size()));
}

inline DensityMatrix partial_trace(const DensityMatrix& state, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  const int n = state.num_qubits();
  validate_targets(n, keep);
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  const auto kept = make_target_index(n, keep);
  std::vector<std::size_t> env_offsets{0};
  if (!traced.empty()) env_offsets = make_target_index(n, traced).offsets;
  const std::size_t dk = kept.offsets.size();
  ComplexMatrix out(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx acc = 0.0;
      for (std::size_t e : env_offsets) acc += state(kept.offsets[i] + e, kept.offsets[j] + e);
      out(i, j) = acc;
    }
  return DensityMatrix::unchecked(int(keep.size()), std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& state, std::initializer_list<int> keep) {
  return partial_trace(state, std::span<const int>(keep.begin(), keep.size()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(a.num_qubits() + b.num_qubits(), kron(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// Real symmetric 3x3 eigenvalues, descending (cyclic Jacobi).

using Mat3 = std::array<std::array<double, 3>, 3>;

inline std::array<double, 3> eig3_sym_desc(const Mat3& r) {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(r[i][j] - r[j][i]) > kSelfCheckTol)
        throw std::invalid_argument("eig3_sym_desc: matrix is not symmetric");
  Mat3 a = r;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) a[j][i] = a[i][j] = 0.5 * (r[i][j] + r[j][i]);
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off < 1e-34) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        const double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = a[q][p] = 0.0;
      }
  }
  std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

}  // namespace bellnet

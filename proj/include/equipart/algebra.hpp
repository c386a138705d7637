#pragma once

// Scalar arithmetic over the three normed division algebras R, C, H and the
// F-valued inner product on F^n.  Complex and real values are the 2- and
// 1-component cases of the quaternion layout, so generic code is written once.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace equipart {

enum class Algebra : int { R = 1, C = 2, H = 4 };

inline constexpr int dim(Algebra a) { return static_cast<int>(a); }

inline const char* algebra_name(Algebra a) {
  switch (a) {
    case Algebra::R: return "R";
    case Algebra::C: return "C";
    case Algebra::H: return "H";
  }
  return "?";
}

inline Algebra algebra_from_name(const std::string& s) {
  if (s == "R") return Algebra::R;
  if (s == "C") return Algebra::C;
  if (s == "H") return Algebra::H;
  throw std::invalid_argument("unknown algebra tag: " + s);
}

/// A value in R, C, or H.  Components live in the basis (1, i, j, k);
/// components past dim(algebra) are identically zero.
class FScalar {
 public:
  FScalar() : alg_(Algebra::R), c_{0, 0, 0, 0} {}

  FScalar(Algebra a, std::span<const double> coords) : alg_(a), c_{0, 0, 0, 0} {
    if (coords.size() > static_cast<std::size_t>(dim(a)))
      throw std::invalid_argument("FScalar: too many components for algebra " +
                                  std::string(algebra_name(a)));
    for (std::size_t k = 0; k < coords.size(); ++k) c_[k] = coords[k];
  }

  static FScalar zero(Algebra a) { return FScalar(a, {}); }
  static FScalar one(Algebra a) {
    FScalar s = zero(a);
    s.c_[0] = 1.0;
    return s;
  }
  static FScalar real(double w) { return FScalar(Algebra::R, std::array{w}); }
  static FScalar complex(double re, double im) {
    return FScalar(Algebra::C, std::array{re, im});
  }
  static FScalar quaternion(double w, double x, double y, double z) {
    return FScalar(Algebra::H, std::array{w, x, y, z});
  }
  /// Embeds `value` into `a` (widening only: R -> C -> H).
  static FScalar embed(Algebra a, const FScalar& value) {
    if (dim(value.algebra()) > dim(a))
      throw std::invalid_argument("FScalar::embed: narrowing embedding");
    FScalar s = zero(a);
    s.c_ = value.c_;
    return s;
  }

  Algebra algebra() const { return alg_; }
  int dimension() const { return dim(alg_); }
  double operator[](int k) const { return c_[k]; }
  std::span<const double> components() const { return {c_.data(), static_cast<std::size_t>(dim(alg_))}; }

  double real_part() const { return c_[0]; }

  friend FScalar operator+(const FScalar& a, const FScalar& b) {
    check_tags(a, b, "+");
    FScalar r = a;
    for (int k = 0; k < 4; ++k) r.c_[k] += b.c_[k];
    return r;
  }
  friend FScalar operator-(const FScalar& a, const FScalar& b) {
    check_tags(a, b, "-");
    FScalar r = a;
    for (int k = 0; k < 4; ++k) r.c_[k] -= b.c_[k];
    return r;
  }
  friend FScalar operator-(const FScalar& a) {
    FScalar r = a;
    for (int k = 0; k < 4; ++k) r.c_[k] = -r.c_[k];
    return r;
  }
  friend FScalar operator*(double s, const FScalar& a) {
    FScalar r = a;
    for (int k = 0; k < 4; ++k) r.c_[k] *= s;
    return r;
  }
  friend FScalar operator*(const FScalar& a, double s) { return s * a; }

  /// Quaternion product restricted to the common algebra; noncommutative for H.
  friend FScalar operator*(const FScalar& a, const FScalar& b) {
    check_tags(a, b, "*");
    const auto& p = a.c_;
    const auto& q = b.c_;
    FScalar r = zero(a.alg_);
    r.c_[0] = p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3];
    r.c_[1] = p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2];
    r.c_[2] = p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1];
    r.c_[3] = p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0];
    return r;
  }

  FScalar& operator+=(const FScalar& b) { return *this = *this + b; }
  FScalar& operator-=(const FScalar& b) { return *this = *this - b; }

  bool operator==(const FScalar& b) const { return alg_ == b.alg_ && c_ == b.c_; }

 private:
  static void check_tags(const FScalar& a, const FScalar& b, const char* op) {
    if (a.alg_ != b.alg_)
      throw std::invalid_argument(std::string("FScalar: algebra mismatch in ") + op +
                                  " (" + algebra_name(a.alg_) + " vs " +
                                  algebra_name(b.alg_) + ")");
  }

  Algebra alg_;
  std::array<double, 4> c_;
};

inline FScalar conj(const FScalar& a) {
  double c[4] = {a[0], -a[1], -a[2], -a[3]};
  return FScalar(a.algebra(), std::span<const double>(c, static_cast<std::size_t>(a.dimension())));
}

inline double norm_sq(const FScalar& a) {
  return a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3];
}

inline double norm(const FScalar& a) { return std::sqrt(norm_sq(a)); }

inline double distance_sq(const FScalar& a, const FScalar& b) { return norm_sq(a - b); }

/// Multiplicative inverse; throws on (near-)zero input.
inline FScalar inverse(const FScalar& a) {
  const double n2 = norm_sq(a);
  if (n2 < 1e-300) throw std::domain_error("FScalar: inverse of zero");
  return (1.0 / n2) * conj(a);
}

inline bool approx_equal(const FScalar& a, const FScalar& b, double tol) {
  return a.algebra() == b.algebra() && norm(a - b) <= tol;
}

/// e^(theta*x) = cos(theta) + sin(theta)*x for a unit purely imaginary quaternion x.
inline FScalar from_polar(double theta, const FScalar& axis) {
  if (axis.algebra() != Algebra::H)
    throw std::invalid_argument("from_polar: axis must be quaternionic");
  if (std::abs(axis.real_part()) > 1e-9)
    throw std::invalid_argument("from_polar: axis must be purely imaginary");
  if (std::abs(norm(axis) - 1.0) > 1e-9)
    throw std::invalid_argument("from_polar: axis must have unit norm");
  const double c = std::cos(theta), s = std::sin(theta);
  return FScalar::quaternion(c, s * axis[1], s * axis[2], s * axis[3]);
}

/// cos(theta) + sin(theta) i embedded into algebra `a` (the 1,i-plane circle).
inline FScalar unit_angle(Algebra a, double theta) {
  if (a == Algebra::R)
    throw std::invalid_argument("unit_angle: R has no continuous circle");
  return FScalar::embed(a, FScalar::complex(std::cos(theta), std::sin(theta)));
}

/// Vector in F^n with a shared algebra tag.
class FVector {
 public:
  FVector() : alg_(Algebra::R) {}
  FVector(Algebra a, std::vector<FScalar> entries) : alg_(a), e_(std::move(entries)) {
    for (const auto& x : e_)
      if (x.algebra() != a)
        throw std::invalid_argument("FVector: entry algebra mismatch");
  }
  static FVector zero(Algebra a, int n) {
    return FVector(a, std::vector<FScalar>(static_cast<std::size_t>(n), FScalar::zero(a)));
  }

  Algebra algebra() const { return alg_; }
  int size() const { return static_cast<int>(e_.size()); }
  const FScalar& operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
  FScalar& operator[](int i) { return e_[static_cast<std::size_t>(i)]; }
  const std::vector<FScalar>& entries() const { return e_; }

  /// Flattens to d*n reals in entry-major component order.
  std::vector<double> to_reals() const {
    std::vector<double> out;
    out.reserve(e_.size() * static_cast<std::size_t>(dim(alg_)));
    for (const auto& x : e_)
      for (int k = 0; k < dim(alg_); ++k) out.push_back(x[k]);
    return out;
  }
  static FVector from_reals(Algebra a, std::span<const double> reals) {
    const int d = dim(a);
    if (reals.size() % static_cast<std::size_t>(d) != 0)
      throw std::invalid_argument("FVector::from_reals: length not divisible by dim(F)");
    std::vector<FScalar> entries;
    entries.reserve(reals.size() / static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < reals.size(); i += static_cast<std::size_t>(d))
      entries.push_back(FScalar(a, reals.subspan(i, static_cast<std::size_t>(d))));
    return FVector(a, std::move(entries));
  }

  friend FVector operator*(double s, const FVector& v) {
    FVector r = v;
    for (auto& x : r.e_) x = s * x;
    return r;
  }

 private:
  Algebra alg_;
  std::vector<FScalar> e_;
};

/// Standard F-valued inner product: sum_i u_i * conj(v_i).  Left F-linear in u.
inline FScalar inner(const FVector& u, const FVector& v) {
  if (u.algebra() != v.algebra())
    throw std::invalid_argument("inner: algebra mismatch");
  if (u.size() != v.size())
    throw std::invalid_argument("inner: length mismatch");
  FScalar acc = FScalar::zero(u.algebra());
  for (int i = 0; i < u.size(); ++i) acc += u[i] * conj(v[i]);
  return acc;
}

inline double norm_sq(const FVector& v) {
  double s = 0;
  for (int i = 0; i < v.size(); ++i) s += norm_sq(v[i]);
  return s;
}

inline double norm(const FVector& v) { return std::sqrt(norm_sq(v)); }

}  // namespace equipart

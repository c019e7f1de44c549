// Exact arithmetic helpers: big rationals, small exact linear solves, and a
// quadratic-extension number type a + b*sqrt(D) used wherever square roots of
// vertex weights must be manipulated without rounding.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perclab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

inline std::string to_string(const Rat& r) {
  if (boost::multiprecision::denominator(r) == 1)
    return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

// Parses "n" or "n/d"; throws std::invalid_argument on malformed input.
inline Rat parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rat(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational: " + s);
  }
}

// q^e for integer e of either sign (q > 0).
inline Rat rat_pow(const Rat& q, long long e) {
  if (q <= 0) throw std::invalid_argument("rat_pow: base must be positive");
  Rat base = e >= 0 ? q : Rat(1) / q;
  unsigned long long n = e >= 0 ? static_cast<unsigned long long>(e)
                                : static_cast<unsigned long long>(-e);
  Rat acc(1);
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

// Exact integer square root test.
inline std::optional<BigInt> sqrt_exact(const BigInt& n) {
  if (n < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

inline std::optional<Rat> sqrt_exact(const Rat& r) {
  auto n = sqrt_exact(BigInt(boost::multiprecision::numerator(r)));
  auto d = sqrt_exact(BigInt(boost::multiprecision::denominator(r)));
  if (n && d) return Rat(*n, *d);
  return std::nullopt;
}

// Squarefree part of a small positive integer (trial division; inputs here are
// products of family parameters, far below any size where this matters).
inline long long squarefree_part(long long n) {
  if (n <= 0) throw std::invalid_argument("squarefree_part: positive input required");
  long long out = 1;
  for (long long p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) { n /= p; ++e; }
    if (e & 1) out *= p;
  }
  return out * n;
}

// Element of the real quadratic field Q(sqrt(D)): value = a + b*sqrt(D).
// D is a squarefree positive integer fixed by the graph family (D = 1 keeps
// everything rational). Mixing distinct nontrivial Ds is a logic error.
struct Quad {
  Rat a{0};
  Rat b{0};
  long long D{1};

  Quad() = default;
  Quad(Rat a_, Rat b_, long long D_) : a(std::move(a_)), b(std::move(b_)), D(D_) {
    if (D == 1 && b != 0) { a += b; b = 0; }  // sqrt(1) folds into the rational part
  }
  /* implicit */ Quad(const Rat& r) : a(r) {}
  /* implicit */ Quad(long long n) : a(n) {}

  bool is_rational() const { return b == 0; }
  bool is_zero() const { return a == 0 && b == 0; }

  static long long join(long long d1, long long d2) {
    if (d1 == d2 || d2 == 1) return d1;
    if (d1 == 1) return d2;
    throw std::logic_error("Quad: mixed quadratic extensions");
  }

  friend Quad operator+(const Quad& x, const Quad& y) {
    return Quad(x.a + y.a, x.b + y.b, join(x.D, y.D));
  }
  friend Quad operator-(const Quad& x, const Quad& y) {
    return Quad(x.a - y.a, x.b - y.b, join(x.D, y.D));
  }
  friend Quad operator-(const Quad& x) { return Quad(-x.a, -x.b, x.D); }
  friend Quad operator*(const Quad& x, const Quad& y) {
    long long d = join(x.D, y.D);
    return Quad(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d);
  }
  friend Quad operator/(const Quad& x, const Quad& y) {
    long long d = join(x.D, y.D);
    Rat norm = y.a * y.a - y.b * y.b * d;  // (a+b*sqrt(D))(a-b*sqrt(D))
    if (norm == 0) throw std::domain_error("Quad: division by zero");
    Quad num = x * Quad(y.a, -y.b, d);
    return Quad(num.a / norm, num.b / norm, d);
  }
  Quad& operator+=(const Quad& y) { return *this = *this + y; }
  Quad& operator-=(const Quad& y) { return *this = *this - y; }
  Quad& operator*=(const Quad& y) { return *this = *this * y; }
  Quad& operator/=(const Quad& y) { return *this = *this / y; }

  friend bool operator==(const Quad& x, const Quad& y) {
    join(x.D, y.D);
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const Quad& x, const Quad& y) { return !(x == y); }

  // Sign of a + b*sqrt(D), decided exactly.
  int sign() const {
    int sa = a.sign(), sb = b.sign();
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // a and b oppose: compare a^2 with b^2 D.
    Rat lhs = a * a, rhs = b * b * Rat(D);
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
  }
  friend bool operator<(const Quad& x, const Quad& y) { return (x - y).sign() < 0; }

  double to_double() const {
    return perclab::to_double(a) + perclab::to_double(b) * std::sqrt(static_cast<double>(D));
  }

  std::string str() const {
    if (b == 0) return to_string(a);
    return to_string(a) + "+" + to_string(b) + "*sqrt(" + std::to_string(D) + ")";
  }
};

// sqrt(r) for positive rational r, expressed inside Q(sqrt(D)).
// Succeeds when r = t^2 or r = t^2 * D; anything else means the caller picked
// the wrong extension for its family and is a logic error.
inline Quad quad_sqrt(const Rat& r, long long D) {
  if (r < 0) throw std::domain_error("quad_sqrt: negative input");
  if (r == 0) return Quad(Rat(0), Rat(0), D);
  if (auto t = sqrt_exact(r)) return Quad(*t, Rat(0), D);
  if (auto t = sqrt_exact(r / Rat(D))) return Quad(Rat(0), *t, D);
  throw std::logic_error("quad_sqrt: " + to_string(r) + " not representable in Q(sqrt(" +
                         std::to_string(D) + "))");
}

// Solves A x = rhs exactly by Gaussian elimination with partial (first nonzero)
// pivoting. Returns nullopt when the system is singular/inconsistent. Intended
// for the small orbit systems (a handful of unknowns).
inline std::optional<std::vector<Rat>> solve_exact(std::vector<std::vector<Rat>> A,
                                                   std::vector<Rat> rhs) {
  const size_t n = A.size();
  if (n == 0 || A[0].size() != n || rhs.size() != n) return std::nullopt;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    for (size_t row = 0; row < n; ++row) {
      if (row == col || A[row][col] == 0) continue;
      Rat f = A[row][col] / A[col][col];
      for (size_t k = col; k < n; ++k) A[row][k] -= f * A[col][k];
      rhs[row] -= f * rhs[col];
    }
  }
  std::vector<Rat> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = rhs[i] / A[i][i];
  return x;
}

}  // namespace perclab

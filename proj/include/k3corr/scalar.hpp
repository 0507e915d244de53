#pragma once
// Scalar kinds, seeded randomness and the tolerance model shared by every
// module.  Two coefficient fields are used throughout: exact rationals for
// constructed/symbolic data and complex doubles for anything sampled.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace k3 {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

inline double abs_val(const Complex& z) { return std::abs(z); }
inline double abs_val(const Rational& r) { return std::fabs(static_cast<double>(r)); }
inline bool is_exact_zero(const Complex& z) { return z == Complex(0.0, 0.0); }
inline bool is_exact_zero(const Rational& r) { return r == 0; }
inline Complex to_complex(const Complex& z) { return z; }
inline Complex to_complex(const Rational& r) { return Complex(static_cast<double>(r), 0.0); }

template <class K> struct scalar_traits;
template <> struct scalar_traits<Complex> {
  static constexpr bool exact = false;
  static const char* name() { return "complex"; }
};
template <> struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static const char* name() { return "rational"; }
};

// ===== tolerances ==========================================================
//
// eps_cluster : relative radius below which extracted roots merge
// eps_cert    : relative residual bound a contact/torsion certificate must meet
// eps_rank    : relative singular-value cutoff for rank decisions
struct Tolerances {
  double cluster = 1e-6;
  double cert = 1e-8;
  double rank = 1e-8;

  void validate() const {
    if (!(cert > 0) || !(cluster > 0) || !(rank > 0))
      throw std::invalid_argument("tolerances must be positive");
    if (cert > cluster)
      throw std::invalid_argument("eps_cert must not exceed eps_cluster");
  }
};

struct RunConfig {
  std::uint64_t seed = 1;
  Tolerances tol;
};

// ===== errors ==============================================================
//
// Precondition violations (bad input, mathematical degeneracy of the input)
// are distinct from solver non-convergence; the CLI maps them to different
// exit codes.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};
struct LineOnSurfaceError : PreconditionError {
  explicit LineOnSurfaceError(const std::string& what) : PreconditionError(what) {}
};
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// ===== seeded randomness ===================================================
//
// All draws go through this wrapper so that a run is fully determined by its
// seed.  Distributions are hand-rolled on top of mt19937_64 output; the
// standard library ones are not guaranteed to produce identical streams
// across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform in [0,1)
  double uniform() { return std::ldexp(static_cast<double>(eng_() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform();
    double u2 = uniform();
    double m = std::sqrt(-2.0 * std::log(u1));
    spare_ = m * std::sin(6.283185307179586476925286766559 * u2);
    have_spare_ = true;
    return m * std::cos(6.283185307179586476925286766559 * u2);
  }

  Complex cgauss() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re, im);
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // bounded-height rational: |num| <= height, 1 <= den <= height
  Rational rational(int height = 100) {
    std::int64_t num = integer(-height, height);
    std::int64_t den = integer(1, height);
    return Rational(num) / den;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Deterministic sub-seed derivation (splitmix-style), so composite pipelines
// can hand independent streams to their stages.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t subseed(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return subseed(seed, h);
}

}  // namespace k3

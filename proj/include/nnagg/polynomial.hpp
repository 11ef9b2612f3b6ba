#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nnagg/dataset.hpp"

namespace nnagg {

inline constexpr int kPolynomialVars = 7;

struct PolyTerm {
  std::array<int, kPolynomialVars> exponents{};
  double coefficient = 0.0;
};

// Multivariate polynomial over 7 variables. Terms are kept strictly
// decreasing under lexicographic comparison of exponent vectors, x1 most
// significant, so the constant term comes last.
struct Polynomial {
  int degree = 0;
  std::vector<PolyTerm> terms;

  // Sum of coeff * prod x_i^e_i, accumulated in term order.
  double evaluate(std::span<const double> x) const;
};

// All C(7+d, d) monomials of total degree <= d, coefficients i.i.d. standard
// normal, assigned in lex term order. Deterministic per seed.
Polynomial generate_polynomial(int degree, std::uint64_t seed);

// Additive noise n*d*r on targets; r is standard normal truncated to
// [r_low, r_high] (resample on miss), d the polynomial degree.
struct NoiseSpec {
  double level = 0.0;  // n
  double r_low = -2.0;
  double r_high = 2.0;
};

struct FeatureRange {
  double lo = -3.0;
  double hi = 3.0;
};

// Features drawn from a seeded standard normal clipped to the range;
// target = f(x) + n*d*r per row. Deterministic per seed, and the feature
// stream is independent of the noise stream.
Dataset generate_dataset(const Polynomial& p, std::size_t size, const NoiseSpec& noise,
                         FeatureRange range, std::uint64_t seed);

}  // namespace nnagg

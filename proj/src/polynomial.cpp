#include "nnagg/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "nnagg/errors.hpp"
#include "nnagg/rng.hpp"

namespace nnagg {

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != kPolynomialVars) {
    throw ShapeError("evaluate: polynomial takes exactly 7 variables");
  }
  double sum = 0.0;
  for (const auto& term : terms) {
    double prod = term.coefficient;
    for (int i = 0; i < kPolynomialVars; ++i) {
      for (int e = 0; e < term.exponents[i]; ++e) prod *= x[i];
    }
    sum += prod;
  }
  return sum;
}

namespace {

void enumerate_exponents(int var, int remaining,
                         std::array<int, kPolynomialVars>& cur,
                         std::vector<std::array<int, kPolynomialVars>>& out) {
  if (var == kPolynomialVars) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[var] = e;
    enumerate_exponents(var + 1, remaining - e, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

Polynomial generate_polynomial(int degree, std::uint64_t seed) {
  if (degree < 1) throw ConfigError("generate_polynomial: degree must be >= 1");

  std::vector<std::array<int, kPolynomialVars>> exponents;
  std::array<int, kPolynomialVars> cur{};
  enumerate_exponents(0, degree, cur, exponents);
  // Strictly decreasing lex order, x1 most significant.
  std::sort(exponents.begin(), exponents.end(),
            [](const auto& a, const auto& b) { return b < a; });

  Polynomial p;
  p.degree = degree;
  p.terms.reserve(exponents.size());
  Rng rng(seed);
  for (const auto& e : exponents) {
    p.terms.push_back({e, rng.normal()});
  }
  return p;
}

Dataset generate_dataset(const Polynomial& p, std::size_t size, const NoiseSpec& noise,
                         FeatureRange range, std::uint64_t seed) {
  if (size < 1) throw ConfigError("generate_dataset: size must be >= 1");
  if (noise.level < 0.0) throw ConfigError("generate_dataset: noise level must be >= 0");

  Dataset ds;
  ds.task = Task::Regression;
  ds.name = "poly_d" + std::to_string(p.degree);
  ds.features = Matrix(size, kPolynomialVars);
  ds.targets = Matrix(size, 1);

  Rng feature_rng = Rng::derive(seed, 0);
  Rng noise_rng = Rng::derive(seed, 1);
  const double d = static_cast<double>(p.degree);
  for (std::size_t i = 0; i < size; ++i) {
    for (int j = 0; j < kPolynomialVars; ++j) {
      ds.features(i, j) = std::clamp(feature_rng.normal(), range.lo, range.hi);
    }
    double y = p.evaluate(ds.features.row(i));
    if (noise.level > 0.0) {
      y += noise.level * d * noise_rng.truncated_normal(noise.r_low, noise.r_high);
    }
    ds.targets(i, 0) = y;
  }
  return ds;
}

}  // namespace nnagg

#include "goci/pac.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace goci {

void PacParams::validate() const {
  if (!(epsilon > 0 && epsilon <= 1)) throw std::invalid_argument("epsilon must lie in (0,1]");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
  for (double v : {d, L, m, t, p, i, j, num_inputs})
    if (!(v >= 1)) throw std::invalid_argument("counts must be at least 1");
  if (lib_size < 1 || q < 1) throw std::invalid_argument("library size and arity must be at least 1");
}

HypothesisSize hypothesis_space_size(double t, double p, double m, double i, double j) {
  if (t < 1 || p < 1 || m < 1 || i < 1 || j < 1) throw std::invalid_argument("counts must be at least 1");
  const double c = std::pow(j, i);
  const double lg = c * std::log(t * p * m);
  if (!std::isfinite(lg)) throw std::overflow_error("hypothesis space size overflows even in log domain");
  return {std::exp(lg), lg};
}

double sample_complexity(const PacParams& params, double h0) {
  params.validate();
  if (!(h0 > 0)) throw std::invalid_argument("|H0| must be positive");
  return (1.0 / params.epsilon) *
         (std::pow(params.d, params.L) * std::log(h0 + params.d + params.m) + std::log(1.0 / params.delta));
}

double constraint_literal_count(std::size_t lib_size, std::size_t t, std::size_t q) {
  if (lib_size < 1) throw std::invalid_argument("library size must be at least 1");
  double perm = q > t ? 0.0 : 1.0;
  for (std::size_t k = 0; k < q && k < t; ++k) perm *= static_cast<double>(t - k);
  return std::ldexp(perm, static_cast<int>(lib_size) - 1);
}

DistanceBounds refinement_distance_bounds(double D_l, double D_lprev, std::size_t lib_size, std::size_t t,
                                          std::size_t q, const std::vector<double>& pref_probs) {
  const double count = constraint_literal_count(lib_size, t, q);
  double upper = 0;
  if (pref_probs.empty()) {
    upper = 0.5 * count;
  } else {
    if (static_cast<double>(pref_probs.size()) != count)
      throw std::invalid_argument("expected " + std::to_string(static_cast<long long>(count)) +
                                  " preference probabilities");
    for (double pr : pref_probs) {
      if (!(pr >= 0 && pr <= 1)) throw std::invalid_argument("preference probability outside [0,1]");
      upper += pr;
    }
  }
  return {std::fabs(D_l - D_lprev), upper};
}

double advice_examples(double n_star, double num_inputs, double L) {
  if (L < 1) throw std::invalid_argument("L must be at least 1");
  return (n_star - num_inputs) / L;
}

}  // namespace goci

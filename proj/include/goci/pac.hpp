#pragma once

#include <cstddef>
#include <vector>

namespace goci {

/// Parameters of the sample-complexity expressions. Asymptotic constants
/// are taken as 1, so results give the shape of a bound, not its value.
struct PacParams {
  double epsilon = 0.1;
  double delta = 0.05;
  double d = 1;  // refinement distance
  double L = 10;
  double m = 1;  // distinct predicates
  double t = 1;  // terms
  double p = 1;  // places
  double i = 1;  // depth bound
  double j = 1;  // arity bound
  double num_inputs = 1;
  std::size_t lib_size = 4;
  std::size_t q = 2;

  void validate() const;
};

struct HypothesisSize {
  double value;      // +inf when only the log is representable
  double log_value;  // j^i * ln(t p m)
};

HypothesisSize hypothesis_space_size(double t, double p, double m, double i, double j);

/// (1/eps) [d^L ln(h0 + d + m) + ln(1/delta)]
double sample_complexity(const PacParams& params, double h0);

struct DistanceBounds {
  double lower;
  double upper;
};

/// lower = |D_l - D_lprev|; upper sums preference probabilities over the
/// 2^(|U|-1) P(t,q) constraint literals. Empty probabilities mean 0.5 each.
DistanceBounds refinement_distance_bounds(double D_l, double D_lprev, std::size_t lib_size, std::size_t t,
                                          std::size_t q, const std::vector<double>& pref_probs = {});

/// Number of constraint literals in the upper bound: 2^(|U|-1) P(t,q).
double constraint_literal_count(std::size_t lib_size, std::size_t t, std::size_t q);

/// (n* - |X|) / L
double advice_examples(double n_star, double num_inputs, double L);

}  // namespace goci

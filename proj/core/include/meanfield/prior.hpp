#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mf {

/// Law of the planted signal entries Θ*, normalized to E Θ² = 1.
struct PriorSpec {
  enum class Kind { rademacher, gaussian, sparse_rademacher, two_point };

  Kind kind = Kind::rademacher;
  double epsilon = 1.0;  // sparse_rademacher: P(Θ ≠ 0)
  double a = 1.0;        // two_point: value with probability p
  double b = -1.0;       // two_point: value with probability 1 - p
  double p = 0.5;

  static PriorSpec rademacher();
  static PriorSpec gaussian();
  static PriorSpec sparse_rademacher(double epsilon);
  static PriorSpec two_point(double a, double b, double p);
  /// "rademacher", "gaussian", "sparse:<eps>", "twopoint:<a>,<b>,<p>".
  static PriorSpec parse(const std::string& text);

  std::string to_string() const;
  bool is_discrete() const { return kind != Kind::gaussian; }
  /// Atoms (value, probability) with positive mass; empty for the Gaussian prior.
  std::vector<std::pair<double, double>> atoms() const;
  double mean() const;
  double second_moment() const;
  bool centered() const;
  /// Throws invalid_input unless the parameters are admissible and E Θ² = 1.
  void validate() const;
};

/// Priors shipped with the toolkit (used by property tests and the CLI).
std::vector<PriorSpec> shipped_priors();

}  // namespace mf

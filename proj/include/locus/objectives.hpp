#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "locus/error.hpp"

// Mean-variance evaluators: expected portfolio return, portfolio variance and
// the simplex constraints on the weights. No solver lives here; the GA can
// drive penalized_fitness() when an optimizer is wanted.
namespace locus::objectives {

class PortfolioSpec {
public:
  PortfolioSpec(std::vector<double> mu, std::vector<std::vector<double>> cov,
                std::optional<double> target_return = std::nullopt,
                std::optional<double> variance_budget = std::nullopt)
      : mu_(std::move(mu)), cov_(std::move(cov)), target_return_(target_return), variance_budget_(variance_budget) {
    const std::size_t n = mu_.size();
    if (n == 0) throw ValidationError("portfolio needs at least one asset");
    if (cov_.size() != n) throw ValidationError("covariance matrix has " + std::to_string(cov_.size()) +
                                                " rows, expected " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (cov_[i].size() != n) throw ValidationError("covariance row " + std::to_string(i + 1) + " has " +
                                                     std::to_string(cov_[i].size()) + " entries, expected " +
                                                     std::to_string(n));
      if (!std::isfinite(mu_[i])) throw ValidationError("expected return " + std::to_string(i + 1) + " is not finite");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (cov_[i][i] < 0) throw ValidationError("covariance diagonal entry " + std::to_string(i + 1) + " is negative");
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(cov_[i][j])) throw ValidationError("covariance entry is not finite");
        if (std::abs(cov_[i][j] - cov_[j][i]) > 1e-12)
          throw ValidationError("covariance matrix is not symmetric at (" + std::to_string(i + 1) + ", " +
                                std::to_string(j + 1) + ")");
      }
    }
    check_psd();
  }

  std::size_t size() const { return mu_.size(); }
  const std::vector<double>& mu() const { return mu_; }
  const std::vector<std::vector<double>>& cov() const { return cov_; }
  std::optional<double> target_return() const { return target_return_; }
  std::optional<double> variance_budget() const { return variance_budget_; }

private:
  // Sampled quadratic forms x'Cx over a fixed pseudo-random set of directions.
  void check_psd() const {
    const std::size_t n = mu_.size();
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(cov_[i][i]));
    const double tol = 1e-12 * std::max(1.0, scale);
    std::vector<double> x(n);
    for (int trial = 0; trial < 256; ++trial) {
      double norm = 0.0;
      for (auto& xi : x) {
        xi = gauss(rng);
        norm += xi * xi;
      }
      norm = std::sqrt(norm);
      double q = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q += x[i] * x[j] * cov_[i][j];
      if (q / (norm * norm) < -tol) throw ValidationError("covariance matrix is not positive semidefinite");
    }
  }

  std::vector<double> mu_;
  std::vector<std::vector<double>> cov_;
  std::optional<double> target_return_;
  std::optional<double> variance_budget_;
};

inline double expected_return(std::span<const double> w, const PortfolioSpec& p) {
  if (w.size() != p.size())
    throw ValidationError("weight vector has " + std::to_string(w.size()) + " entries, portfolio has " +
                          std::to_string(p.size()) + " assets");
  double r = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) r += w[i] * p.mu()[i];
  return r;
}

inline double portfolio_variance(std::span<const double> w, const PortfolioSpec& p) {
  if (w.size() != p.size())
    throw ValidationError("weight vector has " + std::to_string(w.size()) + " entries, portfolio has " +
                          std::to_string(p.size()) + " assets");
  double v = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) v += w[i] * w[j] * p.cov()[i][j];
  return v;
}

enum class ConstraintKind { SumToOne, Nonnegative, TargetReturn, VarianceBudget };

inline std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::SumToOne: return "sum";
    case ConstraintKind::Nonnegative: return "nonnegative";
    case ConstraintKind::TargetReturn: return "target_return";
    case ConstraintKind::VarianceBudget: return "variance_budget";
  }
  return "sum";
}

struct Violation {
  ConstraintKind kind;
  std::optional<std::size_t> index;  // 1-based asset index for Nonnegative
  double magnitude;                  // signed for SumToOne and the equality targets
  friend bool operator==(const Violation&, const Violation&) = default;
};

inline constexpr double kWeightSumTolerance = 1e-9;

// Empty result means the weights are on the simplex.
inline std::vector<Violation> validate_weights(std::span<const double> w) {
  std::vector<Violation> out;
  double sum = 0.0;
  for (double x : w) sum += x;
  if (std::abs(sum - 1.0) > kWeightSumTolerance) out.push_back({ConstraintKind::SumToOne, std::nullopt, sum - 1.0});
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] < 0) out.push_back({ConstraintKind::Nonnegative, i + 1, -w[i]});
  return out;
}

// Simplex checks plus the optional return target and variance budget.
inline std::vector<Violation> validate(std::span<const double> w, const PortfolioSpec& p,
                                       double tolerance = kWeightSumTolerance) {
  auto out = validate_weights(w);
  if (p.target_return()) {
    const double gap = expected_return(w, p) - *p.target_return();
    if (std::abs(gap) > tolerance) out.push_back({ConstraintKind::TargetReturn, std::nullopt, gap});
  }
  if (p.variance_budget()) {
    const double gap = portfolio_variance(w, p) - *p.variance_budget();
    if (std::abs(gap) > tolerance) out.push_back({ConstraintKind::VarianceBudget, std::nullopt, gap});
  }
  return out;
}

inline constexpr double kDefaultPenalty = 1000.0;

/// Scalar objective for maximization. With a target return set this is the
/// risk problem (minimize variance at R*); otherwise it is the return problem
/// (maximize E[R], optionally at a fixed variance). Every unit of constraint
/// violation costs `penalty`.
inline double penalized_fitness(std::span<const double> w, const PortfolioSpec& p,
                                double penalty = kDefaultPenalty) {
  double violation = 0.0;
  for (const auto& v : validate(w, p, 0.0)) violation += std::abs(v.magnitude);
  const double base = p.target_return() ? -portfolio_variance(w, p) : expected_return(w, p);
  return base - penalty * violation;
}

}  // namespace locus::objectives

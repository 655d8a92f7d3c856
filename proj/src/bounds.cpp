#include "epistemic/bounds.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "epistemic/error.hpp"
#include "epistemic/mub.hpp"

namespace epi {

namespace {

double exact_form(double d) { return (1.0 / d) * (1.0 + std::sqrt(1.0 - 1.0 / d)); }

void require_noise(double eps1, double eps2) {
  require(std::isfinite(eps1) && std::isfinite(eps2) && eps1 >= 0.0 && eps2 >= 0.0,
          ErrorCode::InvalidArgument, "noise parameters must be finite and non-negative");
}

void require_prime_power(std::size_t d) {
  require(d >= 4 && is_prime_power(d), ErrorCode::UnsupportedDimension,
          "noisy bounds need a prime power d >= 4, got " + std::to_string(d));
}

}  // namespace

KBoundReport theorem2_bound(std::size_t d) {
  require(d >= 4, ErrorCode::UnsupportedDimension,
          "theorem2_bound needs d >= 4, got " + std::to_string(d));
  KBoundReport r;
  r.dim = d;
  r.subdim_used = largest_prime_power_leq(d);
  const auto dp = static_cast<double>(r.subdim_used);
  r.exact_bound = exact_form(dp);
  r.coarse_bound_subdim = 2.0 / dp;
  r.coarse_bound_dim = 4.0 / (static_cast<double>(d) - 1.0);
  return r;
}

KBoundReport theorem2_bound(std::size_t d, double eps1, double eps2) {
  KBoundReport r = theorem2_bound(d);
  const NoisyBound nb = noisy_bound(r.subdim_used, eps1, eps2);
  r.eps1 = eps1;
  r.eps2 = eps2;
  r.noise_adjusted = nb.tight;
  r.noise_adjusted_coarse = nb.coarse;
  r.threshold_ok = nb.tight < 1.0;
  return r;
}

std::vector<KBoundReport> asymptotic_check(std::span<const std::size_t> dims) {
  std::vector<KBoundReport> out;
  out.reserve(dims.size());
  for (std::size_t d : dims) out.push_back(theorem2_bound(d));
  return out;
}

NoisyBound noisy_bound(std::size_t d, double eps1, double eps2) {
  require_prime_power(d);
  require_noise(eps1, eps2);
  const auto x = static_cast<double>(d);
  NoisyBound b;
  b.tight = (1.0 / x) * (1.0 + x * x * (x - 1.0) * (1.5 * x * eps1 + eps2)) *
            (1.0 + std::sqrt(1.0 - 1.0 / x));
  b.coarse = 2.0 / x + x * x * (3.0 * x * eps1 + 2.0 * eps2);
  return b;
}

double noise_threshold(std::size_t d) {
  require_prime_power(d);
  const auto x = static_cast<double>(d);
  return (2.0 / ((x - 1.0) * (3.0 * x + 2.0))) *
         (1.0 - std::sqrt(1.0 - 1.0 / x) - 1.0 / (x * x));
}

AveragedBound averaged_k_bound(std::span<const double> k_values, std::size_t d) {
  require(d >= 2, ErrorCode::InvalidArgument, "averaged bound needs d >= 2");
  require(k_values.size() == d * d, ErrorCode::InvalidArgument,
          "expected " + std::to_string(d * d) + " values, got " +
              std::to_string(k_values.size()));
  for (double k : k_values)
    require(k >= 0.0 && k <= 1.0, ErrorCode::InvalidArgument, "k values must lie in [0, 1]");
  AveragedBound r;
  r.average = std::accumulate(k_values.begin(), k_values.end(), 0.0) /
              static_cast<double>(k_values.size());
  r.bound = 4.0 / (static_cast<double>(d) - 1.0);
  r.satisfied = r.average < r.bound;
  r.binding = r.bound < 1.0;
  return r;
}

}  // namespace epi

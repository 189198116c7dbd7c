#pragma once

#include <cstdint>

namespace sba {

// Seeded, splittable random stream. The generator is SplitMix64 over a
// state derived from (seed, stream_id) with integer-only mixing, so the
// same (seed, stream_id) yields an identical sequence on every platform.
// Floating-point variates are produced by inverse-transform sampling; no
// rejection loops, so the uniform draw count per variate is fixed.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform in the open interval (0, 1) with 53-bit resolution.
  double next_uniform();

  double next_normal(double mean, double sd);

  // Derives an independent child stream. Children with distinct ids are
  // decorrelated from each other and from the parent; forking does not
  // advance the parent.
  RngStream fork(std::uint64_t child_id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
};

// Standard-normal quantile (Wichura's AS241 rational approximation,
// |error| < 1e-9 in the standardized variable). q must lie in (0, 1).
double normal_inverse_cdf(double q);

// Quantile of N(mean, sd^2); sd = 0 collapses to the mean.
double normal_inverse_cdf(double q, double mean, double sd);

// Standard-normal CDF.
double normal_cdf(double x);

// Log-normal distribution parameterized by its population mean and
// coefficient of variation. Internally mu_ln = ln(mean) - ln(1+cv^2)/2,
// sigma_ln = sqrt(ln(1+cv^2)).
class LogNormalMeanCV {
 public:
  LogNormalMeanCV(double mean, double cv);

  double mean() const { return mean_; }
  double cv() const { return cv_; }
  double mu_log() const { return mu_log_; }
  double sigma_log() const { return sigma_log_; }

  double sample(RngStream& rng) const;

 private:
  double mean_;
  double cv_;
  double mu_log_;
  double sigma_log_;
};

// Stable, injective stream assignment for sweep runs: every
// (design_id, replication) pair maps to a distinct stream.
RngStream seed_for(std::uint64_t design_id, std::uint64_t replication);

}  // namespace sba

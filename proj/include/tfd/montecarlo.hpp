#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tfd/core.hpp"

namespace tfd {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream index). Batches are cut into fixed
/// chunks with one stream each, so the draws do not depend on thread count.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

enum class Process { stable_half, tempered_subordinator, drifted, reflected, inverse_stable_half };

std::string to_string(Process p);

struct SampleBatch {
    Process process;
    std::variant<TemperParams, DriftSpec> params;
    double t;
    std::uint64_t seed;
    std::vector<double> samples;
    // proposals drawn by the rejection sampler (== samples.size() otherwise)
    std::uint64_t proposals = 0;
};

struct EstimateWithError {
    double value;
    double std_error;
    std::size_t n;
};

// single draws

/// S = t^2 / (2 N^2): positive 1/2-stable with E e^{-lambda S} = e^{-t sqrt(lambda)}.
double sample_stable_half(double t, Rng& rng);

/// Positive alpha-stable with E e^{-lambda S} = e^{-t lambda^alpha} (Kanter's representation).
double sample_positive_stable(double alpha, double t, Rng& rng);

struct TemperedDraw {
    double value;
    std::uint64_t proposals;
};

/// Tempered stable subordinator at time t by exponential tilting: propose a
/// stable draw S and accept it with probability e^{-eta S}.
/// Rejects t eta^alpha > 30 (expected acceptance e^{-t eta^alpha}).
TemperedDraw sample_tempered_subordinator(const TemperParams& p, double t, Rng& rng);

/// x0 + mu t + sqrt(2t) N.
double sample_drifted_endpoint(const DriftSpec& d, double t, Rng& rng);

/// x0 + |sqrt(2t) N + mu t|; requires x0 >= 0.
double sample_reflected_endpoint(const DriftSpec& d, double t, Rng& rng);

/// Inverse 1/2-stable subordinator at t, |sqrt(2t) N|.
double sample_inverse_stable_half(double t, Rng& rng);

// batches

struct BatchOptions {
    std::size_t n = 100000;
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0: hardware concurrency
};

SampleBatch sample_stable_half_batch(double t, const BatchOptions& opt);
SampleBatch sample_tempered_batch(const TemperParams& p, double t, const BatchOptions& opt);
SampleBatch sample_drifted_batch(const DriftSpec& d, double t, const BatchOptions& opt);
SampleBatch sample_reflected_batch(const DriftSpec& d, double t, const BatchOptions& opt);
SampleBatch sample_inverse_stable_half_batch(double t, const BatchOptions& opt);

// estimators

/// Sum with a fixed pairwise tree, so the result does not depend on how the
/// samples were produced.
double pairwise_sum(std::span<const double> v);

/// Mean and standard error of e^{-lambda X} over the batch.
EstimateWithError empirical_laplace(const SampleBatch& batch, double lambda);

/// Mean and standard error of the samples.
EstimateWithError empirical_mean(std::span<const double> samples);

/// Kolmogorov-Smirnov distance sup |F_n - F|. Throws when cdf decreases
/// along the sorted samples.
double ks_statistic(std::span<const double> samples, const RealFn& cdf);
double ks_statistic(const SampleBatch& batch, const RealFn& cdf);

/// Asymptotic 1% critical value 1.628 / sqrt(n).
double ks_critical_1pct(std::size_t n);

}  // namespace tfd

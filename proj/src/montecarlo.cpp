#include "tfd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tfd/parallel.hpp"

namespace tfd {
namespace {

constexpr std::size_t kChunk = std::size_t{1} << 15;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double standard_normal(Rng& rng) {
    // std::normal_distribution caches a second variate; a fresh one keeps
    // single draws independent of previous calls on other distributions
    std::normal_distribution<double> n01(0.0, 1.0);
    return n01(rng);
}

double uniform_open(Rng& rng) {
    // (0, 1): generate_canonical can return 0
    double u = 0.0;
    do {
        u = std::generate_canonical<double, 53>(rng);
    } while (u <= 0.0 || u >= 1.0);
    return u;
}

void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ValidationError("sampling horizon must be finite and > 0");
    }
}

template <typename Draw>
std::vector<double> fill_chunks(std::size_t n, std::uint64_t seed, unsigned threads,
                                std::vector<std::uint64_t>& proposals, Draw&& draw) {
    if (n == 0) {
        throw ValidationError("batch size must be positive");
    }
    std::vector<double> out(n);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    proposals.assign(chunks, 0);
    parallel_for(chunks, threads, [&](std::size_t c) {
        Rng rng = make_stream(seed, c);
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        std::uint64_t tries = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            out[i] = draw(rng, tries);
        }
        proposals[c] = tries;
    });
    return out;
}

std::uint64_t total(const std::vector<std::uint64_t>& v) {
    std::uint64_t s = 0;
    for (auto x : v) {
        s += x;
    }
    return s;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

std::string to_string(Process p) {
    switch (p) {
        case Process::stable_half: return "stable_half";
        case Process::tempered_subordinator: return "tempered_subordinator";
        case Process::drifted: return "drifted";
        case Process::reflected: return "reflected";
        case Process::inverse_stable_half: return "inverse_stable_half";
    }
    return "unknown";
}

double sample_stable_half(double t, Rng& rng) {
    require_time(t);
    double z = 0.0;
    do {
        z = standard_normal(rng);
    } while (z == 0.0);
    return t * t / (2.0 * z * z);
}

double sample_positive_stable(double alpha, double t, Rng& rng) {
    require_time(t);
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("stable index must lie in (0, 1)");
    }
    if (alpha == 0.5) {
        return sample_stable_half(t, rng);
    }
    const double u = std::numbers::pi * uniform_open(rng);
    const double e = -std::log(uniform_open(rng));
    const double a = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) *
                     std::sin((1.0 - alpha) * u) / std::pow(std::sin(u), 1.0 / (1.0 - alpha));
    return std::pow(t, 1.0 / alpha) * std::pow(a / e, (1.0 - alpha) / alpha);
}

TemperedDraw sample_tempered_subordinator(const TemperParams& p, double t, Rng& rng) {
    require_time(t);
    const double cost = t * std::pow(p.eta(), p.alpha());
    if (cost > 30.0) {
        throw ValidationError("rejection sampler would starve: t eta^alpha = " +
                              std::to_string(cost) + " > 30");
    }
    std::uint64_t proposals = 0;
    while (true) {
        ++proposals;
        const double s = sample_positive_stable(p.alpha(), t, rng);
        if (p.eta() == 0.0) {
            return {s, proposals};
        }
        if (uniform_open(rng) < std::exp(-p.eta() * s)) {
            return {s, proposals};
        }
    }
}

double sample_drifted_endpoint(const DriftSpec& d, double t, Rng& rng) {
    require_time(t);
    return d.x0() + d.mu() * t + std::sqrt(2.0 * t) * standard_normal(rng);
}

double sample_reflected_endpoint(const DriftSpec& d, double t, Rng& rng) {
    require_time(t);
    if (d.x0() < 0.0) {
        throw ValidationError("reflected process needs x0 >= 0");
    }
    return d.x0() + std::abs(std::sqrt(2.0 * t) * standard_normal(rng) + d.mu() * t);
}

double sample_inverse_stable_half(double t, Rng& rng) {
    require_time(t);
    return std::abs(std::sqrt(2.0 * t) * standard_normal(rng));
}

SampleBatch sample_stable_half_batch(double t, const BatchOptions& opt) {
    require_time(t);
    std::vector<std::uint64_t> props;
    auto s = fill_chunks(opt.n, opt.seed, opt.threads, props, [t](Rng& rng, std::uint64_t& k) {
        ++k;
        return sample_stable_half(t, rng);
    });
    return {Process::stable_half, TemperParams(0.5, 0.0), t, opt.seed, std::move(s), total(props)};
}

SampleBatch sample_tempered_batch(const TemperParams& p, double t, const BatchOptions& opt) {
    require_time(t);
    // check starvation once up front rather than per chunk
    if (t * std::pow(p.eta(), p.alpha()) > 30.0) {
        throw ValidationError("rejection sampler would starve: t eta^alpha > 30");
    }
    std::vector<std::uint64_t> props;
    auto s = fill_chunks(opt.n, opt.seed, opt.threads, props, [&](Rng& rng, std::uint64_t& k) {
        const TemperedDraw d = sample_tempered_subordinator(p, t, rng);
        k += d.proposals;
        return d.value;
    });
    return {Process::tempered_subordinator, p, t, opt.seed, std::move(s), total(props)};
}

SampleBatch sample_drifted_batch(const DriftSpec& d, double t, const BatchOptions& opt) {
    require_time(t);
    std::vector<std::uint64_t> props;
    auto s = fill_chunks(opt.n, opt.seed, opt.threads, props, [&](Rng& rng, std::uint64_t& k) {
        ++k;
        return sample_drifted_endpoint(d, t, rng);
    });
    return {Process::drifted, d, t, opt.seed, std::move(s), total(props)};
}

SampleBatch sample_reflected_batch(const DriftSpec& d, double t, const BatchOptions& opt) {
    require_time(t);
    if (d.x0() < 0.0) {
        throw ValidationError("reflected process needs x0 >= 0");
    }
    std::vector<std::uint64_t> props;
    auto s = fill_chunks(opt.n, opt.seed, opt.threads, props, [&](Rng& rng, std::uint64_t& k) {
        ++k;
        return sample_reflected_endpoint(d, t, rng);
    });
    return {Process::reflected, d, t, opt.seed, std::move(s), total(props)};
}

SampleBatch sample_inverse_stable_half_batch(double t, const BatchOptions& opt) {
    require_time(t);
    std::vector<std::uint64_t> props;
    auto s = fill_chunks(opt.n, opt.seed, opt.threads, props, [t](Rng& rng, std::uint64_t& k) {
        ++k;
        return sample_inverse_stable_half(t, rng);
    });
    return {Process::inverse_stable_half, TemperParams(0.5, 0.0), t, opt.seed, std::move(s),
            total(props)};
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 64) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

EstimateWithError empirical_mean(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) {
        throw ValidationError("an estimate with standard error needs at least 2 samples");
    }
    const double mean = pairwise_sum(samples) / static_cast<double>(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = samples[i] - mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

EstimateWithError empirical_laplace(const SampleBatch& batch, double lambda) {
    if (batch.samples.empty()) {
        throw ValidationError("empty batch");
    }
    if (!(lambda >= 0.0)) {
        throw ValidationError("lambda must be >= 0");
    }
    std::vector<double> v(batch.samples.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::exp(-lambda * batch.samples[i]);
    }
    return empirical_mean(v);
}

double ks_statistic(std::span<const double> samples, const RealFn& cdf) {
    if (samples.empty()) {
        throw ValidationError("empty batch");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    double prev = -1.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        if (!std::isfinite(f) || f < prev) {
            throw ValidationError("cdf is not monotone on the sample points");
        }
        prev = f;
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_statistic(const SampleBatch& batch, const RealFn& cdf) {
    return ks_statistic(batch.samples, cdf);
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace tfd

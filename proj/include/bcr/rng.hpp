#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bcr {

// splitmix64, used to derive well-separated child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: child = f(master, stream_tag, index).
// Identical on every platform, so parallel and serial schedules agree.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag,
                                 std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream_tag * 0x9e3779b97f4a7c15ULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (index * 0xc2b2ae3d27d4eb4fULL);
    return splitmix64(s);
}

// Deterministic random stream. mt19937_64 output is pinned by the standard;
// the uniform conversion is done by hand because std::uniform_real_distribution
// is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on [0,1)
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    // uniform on (0,1), safe for logs and inverse cdfs
    double uniform_pos() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_u64() { return gen_(); }

    int bernoulli(double p) { return uniform() < p ? 1 : 0; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Box-Muller; one fresh pair per call keeps the stream layout simple.
    double normal(double mean, double sd) {
        double u1 = uniform_pos();
        double u2 = uniform();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
        return mean + sd * z;
    }

    // Inverse-cdf scan; fine for the moderate rates used here.
    long poisson(double rate) {
        if (rate <= 0.0) return 0;
        double u = uniform();
        double p = std::exp(-rate);
        double cum = p;
        long k = 0;
        while (u >= cum && k < 100000) {
            ++k;
            p *= rate / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    // categories 1..K with the given (normalized) probabilities
    int categorical(const std::vector<double>& probs) {
        double u = uniform();
        double cum = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            cum += probs[k];
            if (u < cum) return static_cast<int>(k) + 1;
        }
        return static_cast<int>(probs.size());
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace bcr

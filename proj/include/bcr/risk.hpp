#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bcr {

// Finite weighted support of a scalar loss (larger = worse). The universal
// carrier for risk-measure evaluation: atoms are kept sorted ascending by
// value, equal values merged, weights normalized to sum one.
class DiscreteDist {
  public:
    struct Atom {
        double value;
        double weight;
    };

    // Caller supplies probabilities: the sum must be 1 within 1e-12, anything
    // further off is a construction error rather than float noise.
    static DiscreteDist from_probabilities(std::vector<Atom> atoms);

    // Caller supplies positive weights to be renormalized (used internally
    // where renormalization is the intended semantics, e.g. truncated supports).
    static DiscreteDist from_weights(std::vector<Atom> atoms);

    static DiscreteDist point_mass(double value);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double min_value() const { return atoms_.front().value; }
    double max_value() const { return atoms_.back().value; }
    double mean() const;

    // cumulative weight up to and including atom k
    const std::vector<double>& cum() const { return cum_; }

    DiscreteDist shifted(double c) const;
    DiscreteDist scaled(double lambda) const;

  private:
    DiscreteDist() = default;
    void finalize(std::vector<Atom> atoms);

    std::vector<Atom> atoms_;
    std::vector<double> cum_;
};

// Right-continuous step function on [0,1]: value values[i] on
// [breaks[i], breaks[i+1]) with breaks[0] = 0 and breaks.back() = 1.
// A valid risk spectrum is non-negative, non-decreasing and integrates to 1.
struct StepSpectrum {
    std::vector<double> breaks;
    std::vector<double> values;

    void validate() const; // throws std::invalid_argument on violation

    static StepSpectrum uniform();
    static StepSpectrum avar(double alpha);
    static StepSpectrum mean_avar_mix(double lambda, double alpha);
};

struct Expectation {};
struct VaR {
    double alpha; // [0,1); alpha = 0 is the essential supremum
};
struct AVaR {
    double alpha; // (0,1]
};
struct Spectral {
    StepSpectrum spectrum;
};
struct MeanAVaRMix {
    double lambda; // weight on the mean, [0,1]
    double alpha;  // (0,1]
};
struct Wang {
    double nu; // (0,1]
};
struct Gini {
    double s; // (0,1); coherent (hence monotone) only for s <= 1/2
};

class RiskSpec {
  public:
    using Kind = std::variant<Expectation, VaR, AVaR, Spectral, MeanAVaRMix, Wang, Gini>;

    // validating factories; all throw std::invalid_argument on bad parameters
    static RiskSpec expectation();
    static RiskSpec var(double alpha);
    static RiskSpec avar(double alpha);
    static RiskSpec spectral(StepSpectrum spectrum);
    static RiskSpec mean_avar_mix(double lambda, double alpha);
    static RiskSpec wang(double nu);
    static RiskSpec gini(double s);

    const Kind& kind() const { return kind_; }
    bool is_expectation() const { return std::holds_alternative<Expectation>(kind_); }
    std::string name() const;

  private:
    explicit RiskSpec(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

// Outer measure over posterior theta composed with an inner per-theta measure.
struct BcrSpec {
    RiskSpec outer;
    RiskSpec inner;
};

// Left quantile F^{<-}(t) = inf{x : F(x) >= t}; t = 0 returns the smallest atom.
double quantile(const DiscreteDist& dist, double t);

// F^{<-}(1 - alpha); alpha = 0 is the essential supremum.
double var(const DiscreteDist& dist, double alpha);

// (1/alpha) * integral_{1-alpha}^{1} F^{<-}(t) dt, exact over the step quantile.
double avar(const DiscreteDist& dist, double alpha);

// min_u { u + (1/alpha) E[(X-u)^+] }; the minimizer is attained at an atom.
double avar_ru(const DiscreteDist& dist, double alpha);
std::pair<double, double> avar_ru_with_minimizer(const DiscreteDist& dist, double alpha);

// integral_0^1 F^{<-}(t) sigma(t) dt, exact product of two step functions.
double spectral(const DiscreteDist& dist, const StepSpectrum& spectrum);

double evaluate(const DiscreteDist& dist, const RiskSpec& spec);

// Outer measure applied to a distribution whose atoms are precomputed inner
// risk values weighted by the posterior.
double composite(const RiskSpec& outer, const DiscreteDist& theta_dist);

// One-dimensional optimal transport of order p >= 1 (test oracle).
double wasserstein(const DiscreteDist& a, const DiscreteDist& b, double p);

// sup_u |F_a^{<-}(u) - F_b^{<-}(u)|, the order-infinity distance.
double wasserstein_inf(const DiscreteDist& a, const DiscreteDist& b);

} // namespace bcr

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bcr/risk.hpp"
#include "bcr/rng.hpp"

namespace bcr {

struct BetaBernoulli {};
struct GammaPoisson {};
struct NormalKnownVar {
    double sigma2; // known observation variance, > 0
};
struct GammaExponential {};
struct DirichletCategorical {
    int K; // number of categories, >= 2
};

using ConjugateFamily =
    std::variant<BetaBernoulli, GammaPoisson, NormalKnownVar, GammaExponential, DirichletCategorical>;

std::string family_name(const ConjugateFamily& family);
bool family_has_integer_support(const ConjugateFamily& family);

// Conjugate belief: family tag plus hyper-parameter vector h.
//  BetaBernoulli      h = (m, d)      theta ~ Beta(m, d), m counts xi = 1
//  GammaPoisson       h = (m, d)      theta ~ Gamma(shape m, rate d)
//  NormalKnownVar     h = (m, d^2)    theta ~ N(m, d^2)
//  GammaExponential   h = (m, d)      theta ~ Gamma(shape m, rate d)
//  DirichletCategorical h = (a_1..a_K)
//
// A belief may instead be a Dirac point mass at a fixed theta (the family tag
// then only fixes the likelihood p(xi|theta)); Bayes updates leave it
// unchanged, which is the reduction to a known-parameter model.
class Belief {
  public:
    Belief(ConjugateFamily family, std::vector<double> hyper);
    static Belief dirac(ConjugateFamily family, std::vector<double> theta);

    const ConjugateFamily& family() const { return family_; }
    const std::vector<double>& hyper() const { return hyper_; }
    bool is_dirac() const { return !dirac_theta_.empty(); }
    const std::vector<double>& dirac_theta() const { return dirac_theta_; }

    Belief with_hyper(std::vector<double> hyper) const;

  private:
    Belief() = default;
    ConjugateFamily family_;
    std::vector<double> hyper_;
    std::vector<double> dirac_theta_;
};

// throws std::invalid_argument when hyper is invalid for the family
void validate_hyper(const ConjugateFamily& family, const std::vector<double>& hyper);

// throws std::domain_error when obs is outside the family's support
void check_support(const ConjugateFamily& family, double obs);

// Hyper-parameter transition h -> h' for one observation. Additive
// h' = h + H(xi) for the conjugate exponential families; NormalKnownVar uses
// the exact (mean, variance) recursion, which is not additive.
std::vector<double> hyper_update(const ConjugateFamily& family, const std::vector<double>& hyper,
                                 double obs);

// Exact conjugate posterior after one observation (support-checked).
Belief update(const Belief& belief, double obs);

// Posterior predictive mass (discrete families) or density (continuous) at obs.
double predictive_weight(const Belief& belief, double obs);

// Likelihood p(obs | theta); theta is scalar except for DirichletCategorical.
double likelihood(const ConjugateFamily& family, const std::vector<double>& theta, double obs);

// One draw from p(. | theta).
double sample_obs(const ConjugateFamily& family, const std::vector<double>& theta, Rng& rng);

struct TruncationRule {
    double radius = -1.0;    // <= 0 means the family default
    double grid_step = 0.5;  // continuous families only
    double tail_bound = 1e-5; // target truncated tail for discrete defaults
};

struct PredictiveSupport {
    DiscreteDist dist; // atoms are observation values, weights renormalized
    double tail_mass;  // predictive mass lost to truncation, before renormalization
};

PredictiveSupport predictive_support(const Belief& belief, const TruncationRule& trunc = {});

// Observation atoms only (same truncation policy), shared by solvers that
// weight the atoms per theta instead of by the posterior predictive.
std::vector<double> support_atoms(const Belief& belief, const TruncationRule& trunc = {});

struct Moments {
    double mean;
    double variance;
};

// Exact closed-form posterior moments. For DirichletCategorical these are the
// moments of the first component of theta.
Moments posterior_moments(const Belief& belief);

// n independent posterior draws via inverse cdf on a seeded stream.
// Scalar-theta families only; see sample_theta_dirichlet.
std::vector<double> sample_theta(const Belief& belief, std::size_t n, Rng& rng);

std::vector<std::vector<double>> sample_theta_dirichlet(const Belief& belief, std::size_t n, Rng& rng);

// theta estimates from raw observations: Bernoulli/Poisson/Normal -> sample
// mean, Exponential -> 1/mean, Categorical -> empirical frequencies.
std::vector<double> mle(const ConjugateFamily& family, const std::vector<double>& observations);

struct ThetaAtom {
    std::vector<double> theta;
    double weight;
};

// Deterministic quadrature of the posterior: k_theta equal-probability
// quantile midpoints (a Dirac belief collapses to its single atom).
// Scalar-theta families only.
std::vector<ThetaAtom> theta_quadrature(const Belief& belief, int k_theta);

} // namespace bcr

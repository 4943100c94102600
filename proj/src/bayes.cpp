#include "bcr/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

namespace bcr {

namespace {

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double lgamma_(double x) { return std::lgamma(x); }

} // namespace

std::string family_name(const ConjugateFamily& family) {
    return std::visit(overloaded{[](const BetaBernoulli&) { return std::string("beta_bernoulli"); },
                                 [](const GammaPoisson&) { return std::string("gamma_poisson"); },
                                 [](const NormalKnownVar&) { return std::string("normal_known_var"); },
                                 [](const GammaExponential&) { return std::string("gamma_exponential"); },
                                 [](const DirichletCategorical&) { return std::string("dirichlet_categorical"); }},
                      family);
}

bool family_has_integer_support(const ConjugateFamily& family) {
    return std::visit(overloaded{[](const BetaBernoulli&) { return true; },
                                 [](const GammaPoisson&) { return true; },
                                 [](const NormalKnownVar&) { return false; },
                                 [](const GammaExponential&) { return false; },
                                 [](const DirichletCategorical&) { return true; }},
                      family);
}

void validate_hyper(const ConjugateFamily& family, const std::vector<double>& hyper) {
    auto need = [&](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(std::string("belief hyper: ") + msg);
    };
    std::visit(overloaded{[&](const BetaBernoulli&) {
                              need(hyper.size() == 2, "BetaBernoulli needs (m,d)");
                              need(hyper[0] > 0 && hyper[1] > 0, "Beta components must be > 0");
                          },
                          [&](const GammaPoisson&) {
                              need(hyper.size() == 2, "GammaPoisson needs (m,d)");
                              need(hyper[0] > 0 && hyper[1] > 0, "Gamma components must be > 0");
                          },
                          [&](const NormalKnownVar& f) {
                              need(f.sigma2 > 0, "sigma2 must be > 0");
                              need(hyper.size() == 2, "NormalKnownVar needs (m,d2)");
                              need(hyper[1] > 0, "posterior variance must be > 0");
                          },
                          [&](const GammaExponential&) {
                              need(hyper.size() == 2, "GammaExponential needs (m,d)");
                              need(hyper[0] > 0 && hyper[1] > 0, "Gamma components must be > 0");
                          },
                          [&](const DirichletCategorical& f) {
                              need(f.K >= 2, "K must be >= 2");
                              need(static_cast<int>(hyper.size()) == f.K, "Dirichlet needs K components");
                              for (double a : hyper) need(a > 0, "Dirichlet components must be > 0");
                          }},
               family);
}

Belief::Belief(ConjugateFamily family, std::vector<double> hyper) {
    validate_hyper(family, hyper);
    family_ = family;
    hyper_ = std::move(hyper);
}

Belief Belief::dirac(ConjugateFamily family, std::vector<double> theta) {
    if (theta.empty()) throw std::invalid_argument("dirac belief: empty theta");
    Belief b;
    b.family_ = family;
    b.dirac_theta_ = std::move(theta);
    // placeholder hyper so grid code sees a fixed zero-dimension-like point
    b.hyper_ = std::vector<double>(b.dirac_theta_.size(), 0.0);
    return b;
}

Belief Belief::with_hyper(std::vector<double> hyper) const {
    if (is_dirac()) return *this;
    return Belief(family_, std::move(hyper));
}

void check_support(const ConjugateFamily& family, double obs) {
    auto fail = [&](const char* msg) {
        throw std::domain_error(std::string("observation outside support: ") + msg);
    };
    std::visit(overloaded{[&](const BetaBernoulli&) {
                              if (obs != 0.0 && obs != 1.0) fail("Bernoulli needs {0,1}");
                          },
                          [&](const GammaPoisson&) {
                              if (!is_integer(obs) || obs < 0) fail("Poisson needs a non-negative integer");
                          },
                          [&](const NormalKnownVar&) {
                              if (!std::isfinite(obs)) fail("Normal needs a finite real");
                          },
                          [&](const GammaExponential&) {
                              if (!(obs > 0) || !std::isfinite(obs)) fail("Exponential needs a positive real");
                          },
                          [&](const DirichletCategorical& f) {
                              if (!is_integer(obs) || obs < 1 || obs > f.K) fail("Categorical needs 1..K");
                          }},
               family);
}

std::vector<double> hyper_update(const ConjugateFamily& family, const std::vector<double>& hyper,
                                 double obs) {
    std::vector<double> h = hyper;
    std::visit(overloaded{[&](const BetaBernoulli&) {
                              h[0] += (obs == 1.0) ? 1.0 : 0.0;
                              h[1] += (obs == 0.0) ? 1.0 : 0.0;
                          },
                          [&](const GammaPoisson&) {
                              h[0] += obs;
                              h[1] += 1.0;
                          },
                          [&](const NormalKnownVar& f) {
                              const double d2 = hyper[1];
                              const double lam = f.sigma2 / (d2 + f.sigma2); // weight on the prior mean
                              h[0] = lam * hyper[0] + (1.0 - lam) * obs;
                              h[1] = d2 * f.sigma2 / (d2 + f.sigma2);
                          },
                          [&](const GammaExponential&) {
                              h[0] += 1.0;
                              h[1] += obs;
                          },
                          [&](const DirichletCategorical&) { h[static_cast<int>(obs) - 1] += 1.0; }},
               family);
    return h;
}

Belief update(const Belief& belief, double obs) {
    check_support(belief.family(), obs);
    if (belief.is_dirac()) return belief; // delta stays delta under Bayes updates
    return belief.with_hyper(hyper_update(belief.family(), belief.hyper(), obs));
}

double likelihood(const ConjugateFamily& family, const std::vector<double>& theta, double obs) {
    return std::visit(
        overloaded{[&](const BetaBernoulli&) { return obs == 1.0 ? theta[0] : 1.0 - theta[0]; },
                   [&](const GammaPoisson&) {
                       double th = theta[0];
                       if (th <= 0.0) return obs == 0.0 ? 1.0 : 0.0;
                       return std::exp(-th + obs * std::log(th) - lgamma_(obs + 1.0));
                   },
                   [&](const NormalKnownVar& f) {
                       double z = obs - theta[0];
                       return std::exp(-0.5 * z * z / f.sigma2) / std::sqrt(6.283185307179586 * f.sigma2);
                   },
                   [&](const GammaExponential&) { return theta[0] * std::exp(-theta[0] * obs); },
                   [&](const DirichletCategorical&) { return theta[static_cast<int>(obs) - 1]; }},
        family);
}

double sample_obs(const ConjugateFamily& family, const std::vector<double>& theta, Rng& rng) {
    return std::visit(
        overloaded{[&](const BetaBernoulli&) { return static_cast<double>(rng.bernoulli(theta[0])); },
                   [&](const GammaPoisson&) { return static_cast<double>(rng.poisson(theta[0])); },
                   [&](const NormalKnownVar& f) { return rng.normal(theta[0], std::sqrt(f.sigma2)); },
                   [&](const GammaExponential&) { return rng.exponential(theta[0]); },
                   [&](const DirichletCategorical&) { return static_cast<double>(rng.categorical(theta)); }},
        family);
}

double predictive_weight(const Belief& belief, double obs) {
    check_support(belief.family(), obs);
    if (belief.is_dirac()) return likelihood(belief.family(), belief.dirac_theta(), obs);
    const auto& h = belief.hyper();
    return std::visit(
        overloaded{[&](const BetaBernoulli&) {
                       double p1 = h[0] / (h[0] + h[1]);
                       return obs == 1.0 ? p1 : 1.0 - p1;
                   },
                   [&](const GammaPoisson&) {
                       // negative binomial pmf with r = m, success prob d/(d+1)
                       double m = h[0], d = h[1];
                       double lp = lgamma_(m + obs) - lgamma_(m) - lgamma_(obs + 1.0) +
                                   m * std::log(d / (d + 1.0)) - obs * std::log(d + 1.0);
                       return std::exp(lp);
                   },
                   [&](const NormalKnownVar& f) {
                       double v = h[1] + f.sigma2;
                       double z = obs - h[0];
                       return std::exp(-0.5 * z * z / v) / std::sqrt(6.283185307179586 * v);
                   },
                   [&](const GammaExponential&) {
                       // Lomax density m d^m / (d + x)^(m+1)
                       double m = h[0], d = h[1];
                       return std::exp(std::log(m) + m * std::log(d) - (m + 1.0) * std::log(d + obs));
                   },
                   [&](const DirichletCategorical&) {
                       double sum = 0.0;
                       for (double a : h) sum += a;
                       return h[static_cast<int>(obs) - 1] / sum;
                   }},
        belief.family());
}

namespace {

Moments predictive_moments(const Belief& belief) {
    if (belief.is_dirac()) {
        const auto& th = belief.dirac_theta();
        return std::visit(
            overloaded{[&](const BetaBernoulli&) { return Moments{th[0], th[0] * (1 - th[0])}; },
                       [&](const GammaPoisson&) { return Moments{th[0], th[0]}; },
                       [&](const NormalKnownVar& f) { return Moments{th[0], f.sigma2}; },
                       [&](const GammaExponential&) {
                           return Moments{1.0 / th[0], 1.0 / (th[0] * th[0])};
                       },
                       [&](const DirichletCategorical&) { return Moments{0.0, 0.0}; }},
            belief.family());
    }
    const auto& h = belief.hyper();
    return std::visit(
        overloaded{[&](const BetaBernoulli&) {
                       double p = h[0] / (h[0] + h[1]);
                       return Moments{p, p * (1 - p)};
                   },
                   [&](const GammaPoisson&) {
                       // negative binomial mean/variance
                       double mean = h[0] / h[1];
                       return Moments{mean, mean * (1.0 + 1.0 / h[1])};
                   },
                   [&](const NormalKnownVar& f) { return Moments{h[0], h[1] + f.sigma2}; },
                   [&](const GammaExponential&) {
                       double m = h[0], d = h[1];
                       double mean = (m > 1) ? d / (m - 1) : std::numeric_limits<double>::infinity();
                       double var = (m > 2) ? d * d * m / ((m - 1) * (m - 1) * (m - 2))
                                            : std::numeric_limits<double>::infinity();
                       return Moments{mean, var};
                   },
                   [&](const DirichletCategorical&) { return Moments{0.0, 0.0}; }},
        belief.family());
}

} // namespace

std::vector<double> support_atoms(const Belief& belief, const TruncationRule& trunc) {
    const auto& fam = belief.family();
    std::vector<double> atoms;
    if (std::holds_alternative<BetaBernoulli>(fam)) {
        atoms = {0.0, 1.0};
    } else if (std::holds_alternative<DirichletCategorical>(fam)) {
        int K = std::get<DirichletCategorical>(fam).K;
        for (int k = 1; k <= K; ++k) atoms.push_back(k);
    } else if (std::holds_alternative<GammaPoisson>(fam)) {
        long R;
        if (trunc.radius > 0) {
            R = static_cast<long>(std::floor(trunc.radius));
        } else {
            // smallest R with predictive (or Dirac-likelihood) tail below bound
            double cum = 0.0;
            R = 0;
            while (R < 100000) {
                cum += predictive_weight(belief, static_cast<double>(R));
                if (1.0 - cum < trunc.tail_bound) break;
                ++R;
            }
        }
        for (long k = 0; k <= R; ++k) atoms.push_back(static_cast<double>(k));
    } else if (std::holds_alternative<NormalKnownVar>(fam)) {
        Moments pm = predictive_moments(belief);
        double R = trunc.radius > 0 ? trunc.radius : 6.0 * std::sqrt(pm.variance);
        double step = trunc.grid_step;
        long n = std::max<long>(1, static_cast<long>(std::floor(2.0 * R / step)));
        double lo = pm.mean - 0.5 * n * step;
        for (long i = 0; i < n; ++i) atoms.push_back(lo + (i + 0.5) * step);
    } else { // GammaExponential, positive support
        double R;
        if (trunc.radius > 0) {
            R = trunc.radius;
        } else {
            Moments pm = predictive_moments(belief);
            if (std::isfinite(pm.variance)) {
                R = pm.mean + 6.0 * std::sqrt(pm.variance);
            } else if (belief.is_dirac()) {
                R = -std::log(trunc.tail_bound) / belief.dirac_theta()[0];
            } else {
                // Lomax quantile at 1 - 1e-3 when the variance does not exist
                double m = belief.hyper()[0], d = belief.hyper()[1];
                R = d * (std::pow(1e-3, -1.0 / m) - 1.0);
            }
        }
        double step = trunc.grid_step;
        long n = std::max<long>(1, static_cast<long>(std::floor(R / step)));
        for (long i = 0; i < n; ++i) atoms.push_back((i + 0.5) * step);
    }
    return atoms;
}

PredictiveSupport predictive_support(const Belief& belief, const TruncationRule& trunc) {
    std::vector<double> atoms = support_atoms(belief, trunc);
    if (atoms.empty()) throw std::runtime_error("predictive_support: empty support after truncation");
    const bool continuous = !family_has_integer_support(belief.family());
    std::vector<DiscreteDist::Atom> wa;
    double mass = 0.0;
    for (double x : atoms) {
        double w = predictive_weight(belief, x);
        mass += continuous ? w * trunc.grid_step : w;
        if (w > 0.0) wa.push_back({x, w});
    }
    if (wa.empty()) throw std::runtime_error("predictive_support: zero predictive mass on support");
    PredictiveSupport out{DiscreteDist::from_weights(std::move(wa)), std::max(0.0, 1.0 - mass)};
    return out;
}

Moments posterior_moments(const Belief& belief) {
    if (belief.is_dirac()) return Moments{belief.dirac_theta()[0], 0.0};
    const auto& h = belief.hyper();
    return std::visit(
        overloaded{[&](const BetaBernoulli&) {
                       double s = h[0] + h[1];
                       return Moments{h[0] / s, h[0] * h[1] / (s * s * (s + 1.0))};
                   },
                   [&](const GammaPoisson&) { return Moments{h[0] / h[1], h[0] / (h[1] * h[1])}; },
                   [&](const NormalKnownVar&) { return Moments{h[0], h[1]}; },
                   [&](const GammaExponential&) { return Moments{h[0] / h[1], h[0] / (h[1] * h[1])}; },
                   [&](const DirichletCategorical&) {
                       double s = 0.0;
                       for (double a : h) s += a;
                       double p = h[0] / s;
                       return Moments{p, p * (1.0 - p) / (s + 1.0)};
                   }},
        belief.family());
}

namespace {

double posterior_quantile(const Belief& belief, double u) {
    const auto& h = belief.hyper();
    return std::visit(
        overloaded{[&](const BetaBernoulli&) {
                       boost::math::beta_distribution<double> d(h[0], h[1]);
                       return boost::math::quantile(d, u);
                   },
                   [&](const GammaPoisson&) {
                       boost::math::gamma_distribution<double> d(h[0], 1.0 / h[1]);
                       return boost::math::quantile(d, u);
                   },
                   [&](const NormalKnownVar&) {
                       boost::math::normal_distribution<double> d(h[0], std::sqrt(h[1]));
                       return boost::math::quantile(d, u);
                   },
                   [&](const GammaExponential&) {
                       boost::math::gamma_distribution<double> d(h[0], 1.0 / h[1]);
                       return boost::math::quantile(d, u);
                   },
                   [&](const DirichletCategorical&) -> double {
                       throw std::invalid_argument("posterior_quantile: theta is vector-valued "
                                                   "for DirichletCategorical");
                   }},
        belief.family());
}

} // namespace

std::vector<double> sample_theta(const Belief& belief, std::size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_theta: n >= 1 required");
    if (std::holds_alternative<DirichletCategorical>(belief.family()) && !belief.is_dirac())
        throw std::invalid_argument("sample_theta: use sample_theta_dirichlet for vector theta");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (belief.is_dirac())
            out[i] = belief.dirac_theta()[0];
        else
            out[i] = posterior_quantile(belief, rng.uniform_pos());
    }
    return out;
}

std::vector<std::vector<double>> sample_theta_dirichlet(const Belief& belief, std::size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_theta_dirichlet: n >= 1 required");
    const auto* fam = std::get_if<DirichletCategorical>(&belief.family());
    if (!fam) throw std::invalid_argument("sample_theta_dirichlet: Dirichlet beliefs only");
    std::vector<std::vector<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (belief.is_dirac()) {
            out[i] = belief.dirac_theta();
            continue;
        }
        std::vector<double> g(fam->K);
        double sum = 0.0;
        for (int k = 0; k < fam->K; ++k) {
            boost::math::gamma_distribution<double> d(belief.hyper()[k], 1.0);
            g[k] = boost::math::quantile(d, rng.uniform_pos());
            sum += g[k];
        }
        for (double& x : g) x /= sum;
        out[i] = std::move(g);
    }
    return out;
}

std::vector<double> mle(const ConjugateFamily& family, const std::vector<double>& observations) {
    if (observations.empty()) throw std::invalid_argument("mle: need at least one observation");
    for (double x : observations) check_support(family, x);
    double mean = 0.0;
    for (double x : observations) mean += x;
    mean /= static_cast<double>(observations.size());
    return std::visit(
        overloaded{[&](const BetaBernoulli&) { return std::vector<double>{mean}; },
                   [&](const GammaPoisson&) { return std::vector<double>{mean}; },
                   [&](const NormalKnownVar&) { return std::vector<double>{mean}; },
                   [&](const GammaExponential&) {
                       if (mean == 0.0) throw std::domain_error("mle: degenerate data, zero mean");
                       return std::vector<double>{1.0 / mean};
                   },
                   [&](const DirichletCategorical& f) {
                       std::vector<double> freq(f.K, 0.0);
                       for (double x : observations) freq[static_cast<int>(x) - 1] += 1.0;
                       for (double& p : freq) p /= static_cast<double>(observations.size());
                       return freq;
                   }},
        family);
}

std::vector<ThetaAtom> theta_quadrature(const Belief& belief, int k_theta) {
    if (k_theta < 1) throw std::invalid_argument("theta_quadrature: k_theta >= 1");
    if (belief.is_dirac()) return {ThetaAtom{belief.dirac_theta(), 1.0}};
    if (std::holds_alternative<DirichletCategorical>(belief.family()))
        throw std::invalid_argument("theta_quadrature: vector-valued theta (Dirichlet) unsupported");
    std::vector<ThetaAtom> atoms;
    atoms.reserve(k_theta);
    const double w = 1.0 / k_theta;
    for (int j = 0; j < k_theta; ++j) {
        double u = (j + 0.5) / k_theta;
        atoms.push_back(ThetaAtom{{posterior_quantile(belief, u)}, w});
    }
    return atoms;
}

} // namespace bcr

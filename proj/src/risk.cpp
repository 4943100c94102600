#include "bcr/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcr {

namespace {

constexpr double kWeightSumTol = 1e-12;

void check_finite_atoms(const std::vector<DiscreteDist::Atom>& atoms) {
    if (atoms.empty()) throw std::invalid_argument("DiscreteDist: no atoms");
    for (const auto& a : atoms) {
        if (!std::isfinite(a.value)) throw std::invalid_argument("DiscreteDist: non-finite value");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("DiscreteDist: weights must be positive and finite");
    }
}

} // namespace

void DiscreteDist::finalize(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.value < y.value; });
    atoms_.clear();
    for (const auto& a : atoms) {
        if (!atoms_.empty() && atoms_.back().value == a.value)
            atoms_.back().weight += a.weight;
        else
            atoms_.push_back(a);
    }
    double sum = 0.0;
    for (const auto& a : atoms_) sum += a.weight;
    cum_.resize(atoms_.size());
    double c = 0.0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        atoms_[k].weight /= sum;
        c += atoms_[k].weight;
        cum_[k] = c;
    }
    cum_.back() = 1.0;
}

DiscreteDist DiscreteDist::from_probabilities(std::vector<Atom> atoms) {
    check_finite_atoms(atoms);
    double sum = 0.0;
    for (const auto& a : atoms) sum += a.weight;
    if (std::fabs(sum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("DiscreteDist: probabilities sum to " + std::to_string(sum));
    DiscreteDist d;
    d.finalize(std::move(atoms));
    return d;
}

DiscreteDist DiscreteDist::from_weights(std::vector<Atom> atoms) {
    check_finite_atoms(atoms);
    DiscreteDist d;
    d.finalize(std::move(atoms));
    return d;
}

DiscreteDist DiscreteDist::point_mass(double value) {
    return from_probabilities({{value, 1.0}});
}

double DiscreteDist::mean() const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.value * a.weight;
    return m;
}

DiscreteDist DiscreteDist::shifted(double c) const {
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) a.value += c;
    return from_weights(std::move(atoms));
}

DiscreteDist DiscreteDist::scaled(double lambda) const {
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) a.value *= lambda;
    return from_weights(std::move(atoms));
}

void StepSpectrum::validate() const {
    if (breaks.size() < 2 || values.size() + 1 != breaks.size())
        throw std::invalid_argument("StepSpectrum: need breaks = values + 1, at least one segment");
    if (breaks.front() != 0.0 || breaks.back() != 1.0)
        throw std::invalid_argument("StepSpectrum: breaks must span [0,1]");
    double integral = 0.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (breaks[i + 1] <= breaks[i])
            throw std::invalid_argument("StepSpectrum: breaks must increase");
        if (values[i] < 0.0) throw std::invalid_argument("StepSpectrum: sigma must be non-negative");
        if (values[i] < prev) throw std::invalid_argument("StepSpectrum: sigma must be non-decreasing");
        prev = values[i];
        integral += values[i] * (breaks[i + 1] - breaks[i]);
    }
    if (std::fabs(integral - 1.0) > 1e-9)
        throw std::invalid_argument("StepSpectrum: sigma must integrate to 1, got " +
                                    std::to_string(integral));
}

StepSpectrum StepSpectrum::uniform() { return StepSpectrum{{0.0, 1.0}, {1.0}}; }

StepSpectrum StepSpectrum::avar(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("avar spectrum: alpha in (0,1]");
    if (alpha == 1.0) return uniform();
    return StepSpectrum{{0.0, 1.0 - alpha, 1.0}, {0.0, 1.0 / alpha}};
}

StepSpectrum StepSpectrum::mean_avar_mix(double lambda, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("mix spectrum: alpha in (0,1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("mix spectrum: lambda in [0,1]");
    if (alpha == 1.0) return uniform();
    return StepSpectrum{{0.0, 1.0 - alpha, 1.0}, {lambda, lambda + (1.0 - lambda) / alpha}};
}

RiskSpec RiskSpec::expectation() { return RiskSpec(Expectation{}); }

RiskSpec RiskSpec::var(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("VaR: alpha in [0,1)");
    return RiskSpec(VaR{alpha});
}

RiskSpec RiskSpec::avar(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("AVaR: alpha in (0,1]");
    return RiskSpec(AVaR{alpha});
}

RiskSpec RiskSpec::spectral(StepSpectrum spectrum) {
    spectrum.validate();
    return RiskSpec(Spectral{std::move(spectrum)});
}

RiskSpec RiskSpec::mean_avar_mix(double lambda, double alpha) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("MeanAVaRMix: lambda in [0,1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("MeanAVaRMix: alpha in (0,1]");
    return RiskSpec(MeanAVaRMix{lambda, alpha});
}

RiskSpec RiskSpec::wang(double nu) {
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("Wang: nu in (0,1]");
    return RiskSpec(Wang{nu});
}

RiskSpec RiskSpec::gini(double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("Gini: s in (0,1)");
    return RiskSpec(Gini{s});
}

std::string RiskSpec::name() const {
    struct Namer {
        std::string operator()(const Expectation&) const { return "expectation"; }
        std::string operator()(const VaR& v) const { return "var(" + std::to_string(v.alpha) + ")"; }
        std::string operator()(const AVaR& v) const { return "avar(" + std::to_string(v.alpha) + ")"; }
        std::string operator()(const Spectral&) const { return "spectral"; }
        std::string operator()(const MeanAVaRMix& v) const {
            return "mean_avar_mix(" + std::to_string(v.lambda) + "," + std::to_string(v.alpha) + ")";
        }
        std::string operator()(const Wang& v) const { return "wang(" + std::to_string(v.nu) + ")"; }
        std::string operator()(const Gini& v) const { return "gini(" + std::to_string(v.s) + ")"; }
    };
    return std::visit(Namer{}, kind_);
}

double quantile(const DiscreteDist& dist, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("quantile: t in [0,1]");
    if (t == 0.0) return dist.min_value();
    const auto& cum = dist.cum();
    for (std::size_t k = 0; k < cum.size(); ++k) {
        if (cum[k] >= t) return dist.atoms()[k].value;
    }
    return dist.max_value();
}

double var(const DiscreteDist& dist, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("var: alpha in [0,1)");
    if (alpha == 0.0) return dist.max_value();
    return quantile(dist, 1.0 - alpha);
}

double avar(const DiscreteDist& dist, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("avar: alpha in (0,1]");
    if (alpha == 1.0) return dist.mean();
    const double lo = 1.0 - alpha;
    double acc = 0.0;
    double prev = 0.0;
    const auto& cum = dist.cum();
    for (std::size_t k = 0; k < dist.size(); ++k) {
        double hi_k = cum[k];
        double seg = std::max(0.0, hi_k - std::max(prev, lo));
        if (seg > 0.0) acc += dist.atoms()[k].value * seg;
        prev = hi_k;
    }
    return acc / alpha;
}

std::pair<double, double> avar_ru_with_minimizer(const DiscreteDist& dist, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("avar_ru: alpha in (0,1]");
    double best = std::numeric_limits<double>::infinity();
    double best_u = dist.min_value();
    for (const auto& cand : dist.atoms()) {
        double u = cand.value;
        double tail = 0.0;
        for (const auto& a : dist.atoms())
            if (a.value > u) tail += a.weight * (a.value - u);
        double obj = u + tail / alpha;
        if (obj < best) {
            best = obj;
            best_u = u;
        }
    }
    return {best, best_u};
}

double avar_ru(const DiscreteDist& dist, double alpha) {
    return avar_ru_with_minimizer(dist, alpha).first;
}

double spectral(const DiscreteDist& dist, const StepSpectrum& spectrum) {
    spectrum.validate();
    double acc = 0.0;
    const auto& cum = dist.cum();
    double lo = 0.0;
    std::size_t seg = 0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        double hi = cum[k];
        // integrate sigma over (lo, hi]
        double t = lo;
        while (t < hi) {
            while (seg + 1 < spectrum.values.size() && spectrum.breaks[seg + 1] <= t) ++seg;
            double seg_end = std::min(hi, spectrum.breaks[seg + 1]);
            acc += dist.atoms()[k].value * spectrum.values[seg] * (seg_end - t);
            t = seg_end;
        }
        lo = hi;
    }
    return acc;
}

namespace {

// Wang via the quantile-form spectrum: sum_k x_k [(1-c_{k-1})^nu - (1-c_k)^nu].
// Total (handles negative atoms); identical to the survival integral on
// non-negative support.
double wang_quantile_form(const DiscreteDist& dist, double nu) {
    double acc = 0.0;
    double prev = 0.0;
    const auto& cum = dist.cum();
    for (std::size_t k = 0; k < dist.size(); ++k) {
        double lo = std::pow(1.0 - prev, nu);
        double hi = std::pow(std::max(0.0, 1.0 - cum[k]), nu);
        acc += dist.atoms()[k].value * (lo - hi);
        prev = cum[k];
    }
    return acc;
}

// integral_0^inf (1 - F(t))^nu dt; valid for non-negative support only.
double wang_survival_form(const DiscreteDist& dist, double nu) {
    double acc = dist.min_value(); // survival = 1 on [0, x_min)
    const auto& cum = dist.cum();
    for (std::size_t k = 0; k + 1 < dist.size(); ++k) {
        double surv = std::pow(1.0 - cum[k], nu);
        acc += surv * (dist.atoms()[k + 1].value - dist.atoms()[k].value);
    }
    return acc;
}

// Gini_s(X) = E[X] + s E|X - X'|; closed form against the linear spectrum
// sigma(t) = (1-2s) + 4st, integrated exactly over the step quantile.
double gini_value(const DiscreteDist& dist, double s) {
    double acc = 0.0;
    double prev = 0.0;
    const auto& cum = dist.cum();
    for (std::size_t k = 0; k < dist.size(); ++k) {
        double c = cum[k];
        acc += dist.atoms()[k].value * ((1.0 - 2.0 * s) * (c - prev) + 2.0 * s * (c * c - prev * prev));
        prev = c;
    }
    return acc;
}

} // namespace

double evaluate(const DiscreteDist& dist, const RiskSpec& spec) {
    struct Eval {
        const DiscreteDist& d;
        double operator()(const Expectation&) const { return d.mean(); }
        double operator()(const VaR& v) const { return var(d, v.alpha); }
        double operator()(const AVaR& v) const { return avar(d, v.alpha); }
        double operator()(const Spectral& v) const { return spectral(d, v.spectrum); }
        double operator()(const MeanAVaRMix& v) const {
            return v.lambda * d.mean() + (1.0 - v.lambda) * avar(d, v.alpha);
        }
        double operator()(const Wang& v) const {
            if (d.min_value() >= 0.0) return wang_survival_form(d, v.nu);
            return wang_quantile_form(d, v.nu);
        }
        double operator()(const Gini& v) const { return gini_value(d, v.s); }
    };
    return std::visit(Eval{dist}, spec.kind());
}

double composite(const RiskSpec& outer, const DiscreteDist& theta_dist) {
    return evaluate(theta_dist, outer);
}

namespace {

// Walk the merged cumulative partitions of two step quantile functions and
// apply `f(xa, xb, seg_len)` on each piece.
template <typename F>
void for_each_quantile_segment(const DiscreteDist& a, const DiscreteDist& b, F&& f) {
    std::size_t i = 0, j = 0;
    double t = 0.0;
    const auto& ca = a.cum();
    const auto& cb = b.cum();
    while (t < 1.0) {
        double next = std::min(ca[i], cb[j]);
        if (next > t) f(a.atoms()[i].value, b.atoms()[j].value, next - t);
        t = next;
        if (ca[i] <= t && i + 1 < a.size()) ++i;
        if (cb[j] <= t && j + 1 < b.size()) ++j;
        if (ca[i] >= 1.0 && cb[j] >= 1.0 && next >= 1.0) break;
    }
}

} // namespace

double wasserstein(const DiscreteDist& a, const DiscreteDist& b, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("wasserstein: order p >= 1");
    double acc = 0.0;
    for_each_quantile_segment(a, b, [&](double xa, double xb, double len) {
        acc += std::pow(std::fabs(xa - xb), p) * len;
    });
    return std::pow(acc, 1.0 / p);
}

double wasserstein_inf(const DiscreteDist& a, const DiscreteDist& b) {
    double worst = 0.0;
    for_each_quantile_segment(a, b, [&](double xa, double xb, double) {
        worst = std::max(worst, std::fabs(xa - xb));
    });
    return worst;
}

} // namespace bcr

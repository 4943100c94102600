#include "bcr/hypergrid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "bcr/csv.hpp"

namespace bcr {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<double> eps_net(double radius, double eps, bool integer_support) {
    if (!(radius > 0.0)) throw std::invalid_argument("eps_net: radius > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("eps_net: eps > 0");
    std::vector<double> pts;
    if (integer_support) {
        if (eps < 1.0) throw std::invalid_argument("eps_net: integer support needs eps >= 1");
        long k = static_cast<long>(std::floor(eps));
        long R = static_cast<long>(std::floor(radius));
        for (long x = 0; x <= R; x += k) pts.push_back(static_cast<double>(x));
        if (pts.back() != static_cast<double>(R)) pts.push_back(static_cast<double>(R));
    } else {
        long n = std::max<long>(1, static_cast<long>(std::ceil(2.0 * radius / (2.0 * eps))));
        double step = 2.0 * radius / static_cast<double>(n);
        for (long i = 0; i <= n; ++i) pts.push_back(-radius + step * static_cast<double>(i));
    }
    return pts;
}

namespace {

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

GridNode merge_nodes(const GridNode& a, const GridNode& b) {
    GridNode out;
    double w = a.weight + b.weight;
    out.hyper.resize(a.hyper.size());
    for (std::size_t i = 0; i < a.hyper.size(); ++i)
        out.hyper[i] = (a.hyper[i] * a.weight + b.hyper[i] * b.weight) / w;
    out.weight = w;
    return out;
}

// merge exactly equal hyper vectors, summing weights
std::vector<GridNode> dedupe(std::vector<GridNode> nodes) {
    std::sort(nodes.begin(), nodes.end(),
              [](const GridNode& x, const GridNode& y) { return lex_less(x.hyper, y.hyper); });
    std::vector<GridNode> out;
    for (auto& n : nodes) {
        if (!out.empty() && out.back().hyper == n.hyper)
            out.back().weight += n.weight;
        else
            out.push_back(std::move(n));
    }
    return out;
}

// Collinearity detection; the conjugate families here add a constant component
// per stage, so stage candidate sets usually live on a line.
struct LineFit {
    bool collinear = false;
    std::vector<double> origin;
    std::vector<double> dir; // unit, first nonzero component positive
};

LineFit fit_line(const std::vector<GridNode>& nodes) {
    LineFit fit;
    if (nodes.empty()) return fit;
    fit.origin = nodes.front().hyper;
    std::size_t j = 1;
    while (j < nodes.size() && nodes[j].hyper == fit.origin) ++j;
    if (j == nodes.size()) { // all identical
        fit.collinear = true;
        fit.dir.assign(fit.origin.size(), 0.0);
        if (!fit.dir.empty()) fit.dir[0] = 1.0;
        return fit;
    }
    std::vector<double> d(fit.origin.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = nodes[j].hyper[i] - fit.origin[i];
        norm += d[i] * d[i];
    }
    norm = std::sqrt(norm);
    for (double& x : d) x /= norm;
    for (double x : d) {
        if (x != 0.0) {
            if (x < 0.0)
                for (double& y : d) y = -y;
            break;
        }
    }
    for (const auto& n : nodes) {
        double proj = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            double v = n.hyper[i] - fit.origin[i];
            proj += v * d[i];
            sq += v * v;
        }
        double resid2 = sq - proj * proj;
        if (resid2 > 1e-18 * (1.0 + sq)) return fit; // not collinear
    }
    fit.collinear = true;
    fit.dir = std::move(d);
    return fit;
}

// 1-D greedy closest-pair merging via a doubly linked list over sorted
// positions and a lazy heap of adjacent gaps.
std::vector<GridNode> cluster_1d(std::vector<GridNode> nodes, std::size_t m_max, const LineFit& fit) {
    struct Item {
        double s;
        GridNode node;
        long prev, next;
        bool alive;
        std::uint64_t version;
    };
    std::vector<Item> items;
    items.reserve(nodes.size());
    for (auto& n : nodes) {
        double s = 0.0;
        for (std::size_t i = 0; i < n.hyper.size(); ++i)
            s += (n.hyper[i] - fit.origin[i]) * fit.dir[i];
        items.push_back(Item{s, std::move(n), -1, -1, true, 0});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.s < b.s; });
    for (long i = 0; i < static_cast<long>(items.size()); ++i) {
        items[i].prev = i - 1;
        items[i].next = (i + 1 < static_cast<long>(items.size())) ? i + 1 : -1;
    }
    struct HeapEntry {
        double gap;
        double s_left; // deterministic tie-break: leftmost pair first
        long left;
        std::uint64_t vl, vr;
    };
    auto cmp = [](const HeapEntry& a, const HeapEntry& b) {
        if (a.gap != b.gap) return a.gap > b.gap;
        return a.s_left > b.s_left;
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(cmp)> heap(cmp);
    auto push_gap = [&](long i) {
        long j = items[i].next;
        if (j < 0) return;
        heap.push(HeapEntry{items[j].s - items[i].s, items[i].s, i, items[i].version, items[j].version});
    };
    for (long i = 0; i < static_cast<long>(items.size()); ++i) push_gap(i);

    std::size_t alive = items.size();
    auto merge_step = [&](bool only_zero) {
        while (!heap.empty()) {
            HeapEntry e = heap.top();
            long i = e.left;
            long j = items[i].alive ? items[i].next : -1;
            if (!items[i].alive || j < 0 || items[i].version != e.vl || items[j].version != e.vr) {
                heap.pop();
                continue;
            }
            if (only_zero && e.gap > 0.0) return false;
            heap.pop();
            GridNode merged = merge_nodes(items[i].node, items[j].node);
            double s = (items[i].s * items[i].node.weight + items[j].s * items[j].node.weight) /
                       merged.weight;
            items[j].alive = false;
            items[i].node = std::move(merged);
            items[i].s = s;
            items[i].version++;
            items[i].next = items[j].next;
            if (items[i].next >= 0) items[items[i].next].prev = i;
            --alive;
            if (items[i].prev >= 0) push_gap(items[i].prev);
            push_gap(i);
            return true;
        }
        return false;
    };

    while (alive > 1 && merge_step(true)) {} // duplicates always collapse
    while (alive > m_max && merge_step(false)) {}

    std::vector<GridNode> out;
    for (auto& it : items)
        if (it.alive) out.push_back(std::move(it.node));
    return out;
}

// generic k-d greedy merging with a lazy pair heap
std::vector<GridNode> cluster_general(std::vector<GridNode> nodes, std::size_t m_max) {
    nodes = dedupe(std::move(nodes));
    if (nodes.size() <= m_max) return nodes;
    struct Entry {
        double dist;
        std::size_t i, j;
        std::uint64_t vi, vj;
    };
    auto lex_key_less = [&](const Entry& a, const Entry& b) {
        // deterministic tie-break on the lexicographic order of the pair
        if (lex_less(nodes[a.i].hyper, nodes[b.i].hyper)) return true;
        if (lex_less(nodes[b.i].hyper, nodes[a.i].hyper)) return false;
        return lex_less(nodes[a.j].hyper, nodes[b.j].hyper);
    };
    auto cmp = [&](const Entry& a, const Entry& b) {
        if (a.dist != b.dist) return a.dist > b.dist;
        return !lex_key_less(a, b) && (lex_key_less(b, a) || false);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    std::vector<bool> alive(nodes.size(), true);
    std::vector<std::uint64_t> version(nodes.size(), 0);
    auto push_pair = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        std::size_t a = i, b = j;
        if (lex_less(nodes[b].hyper, nodes[a].hyper)) std::swap(a, b);
        heap.push(Entry{distance(nodes[a].hyper, nodes[b].hyper), a, b, version[a], version[b]});
    };
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) push_pair(i, j);
    std::size_t count = nodes.size();
    while (count > m_max && !heap.empty()) {
        Entry e = heap.top();
        heap.pop();
        if (!alive[e.i] || !alive[e.j] || version[e.i] != e.vi || version[e.j] != e.vj) continue;
        nodes[e.i] = merge_nodes(nodes[e.i], nodes[e.j]);
        alive[e.j] = false;
        version[e.i]++;
        --count;
        for (std::size_t k = 0; k < nodes.size(); ++k)
            if (alive[k] && k != e.i) push_pair(e.i, k);
    }
    std::vector<GridNode> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (alive[i]) out.push_back(std::move(nodes[i]));
    return dedupe(std::move(out));
}

} // namespace

std::vector<GridNode> cluster(std::vector<GridNode> candidates, std::size_t m_max) {
    std::vector<GridNode> kept;
    kept.reserve(candidates.size());
    for (auto& c : candidates)
        if (c.weight > 0.0) kept.push_back(std::move(c));
    if (kept.empty()) throw std::invalid_argument("cluster: no positive-weight candidates");
    if (m_max < 1) m_max = 1;
    LineFit fit = fit_line(kept);
    if (fit.collinear) return cluster_1d(std::move(kept), m_max, fit);
    return cluster_general(std::move(kept), m_max);
}

std::vector<GridNode> expand(const GridLevel& level, const Belief& prior,
                             const std::vector<double>& net) {
    std::vector<GridNode> out;
    out.reserve(level.nodes.size() * net.size());
    for (const auto& node : level.nodes) {
        Belief at = prior.with_hyper(node.hyper);
        for (double xi : net) {
            double w = node.weight * predictive_weight(at, xi);
            if (!(w > 0.0)) continue;
            std::vector<double> h =
                prior.is_dirac() ? node.hyper : hyper_update(prior.family(), node.hyper, xi);
            out.push_back(GridNode{std::move(h), w});
        }
    }
    if (out.empty()) throw std::runtime_error("expand: all candidates have zero weight");
    return out;
}

GridLevel project_guarantee(const std::vector<GridNode>& exact_candidates,
                            std::vector<GridNode> clustered, int stage, const GridParams& params) {
    if (clustered.empty()) throw std::invalid_argument("project_guarantee: empty clustered set");
    const int max_passes = 16;
    for (int pass = 0; pass < max_passes; ++pass) {
        std::vector<GridNode> violators;
        for (const auto& e : exact_candidates) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& n : clustered) best = std::min(best, distance(e.hyper, n.hyper));
            if (best > params.eps) violators.push_back(e);
        }
        if (violators.empty()) break;
        // descending weight, then lexicographic, and merge duplicates
        std::sort(violators.begin(), violators.end(), [](const GridNode& a, const GridNode& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            return lex_less(a.hyper, b.hyper);
        });
        violators = dedupe(std::move(violators));
        for (auto& v : violators) clustered.push_back(std::move(v));
        clustered = dedupe(std::move(clustered));
        if (clustered.size() > params.m_max && pass + 1 < max_passes) {
            clustered = cluster(std::move(clustered), params.m_max);
            continue; // re-merge may have broken coverage; re-check
        }
        break; // coverage holds (violators just inserted verbatim)
    }
    GridLevel lvl;
    lvl.stage = stage;
    lvl.params = params;
    lvl.nodes = std::move(clustered);
    std::sort(lvl.nodes.begin(), lvl.nodes.end(),
              [](const GridNode& a, const GridNode& b) { return lex_less(a.hyper, b.hyper); });
    return lvl;
}

std::size_t rep(const GridLevel& level, const std::vector<double>& hyper) {
    if (level.nodes.empty()) throw std::invalid_argument("rep: empty level");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < level.nodes.size(); ++i) {
        double d = distance(level.nodes[i].hyper, hyper);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

double projection_error(const std::vector<double>& hyper_exact, const GridLevel& level) {
    return distance(hyper_exact, level.nodes[rep(level, hyper_exact)].hyper);
}

namespace {

std::vector<double> family_net(const ConjugateFamily& family, const GridParams& params) {
    if (std::holds_alternative<BetaBernoulli>(family)) return {0.0, 1.0};
    if (const auto* d = std::get_if<DirichletCategorical>(&family)) {
        std::vector<double> out;
        for (int k = 1; k <= d->K; ++k) out.push_back(k);
        return out;
    }
    if (std::holds_alternative<GammaPoisson>(family))
        return eps_net(params.radius, params.eps, true);
    std::vector<double> pts = eps_net(params.radius, params.eps, false);
    if (std::holds_alternative<GammaExponential>(family)) {
        std::vector<double> pos;
        for (double x : pts)
            if (x > 0.0) pos.push_back(x);
        if (pos.empty()) pos.push_back(params.eps);
        return pos;
    }
    return pts;
}

void renormalize(GridLevel& level) {
    double sum = 0.0;
    for (const auto& n : level.nodes) sum += n.weight;
    if (sum > 0.0)
        for (auto& n : level.nodes) n.weight /= sum;
}

} // namespace

std::vector<GridLevel> build_grids(const Belief& prior, int stages, const GridParams& params) {
    if (stages < 1) throw std::invalid_argument("build_grids: stages >= 1");
    std::vector<GridLevel> levels;
    GridLevel first;
    first.stage = 1;
    first.params = params;
    first.nodes = {GridNode{prior.hyper(), 1.0}};
    levels.push_back(std::move(first));
    std::vector<double> net = family_net(prior.family(), params);
    for (int tau = 2; tau <= stages; ++tau) {
        std::vector<GridNode> candidates = expand(levels.back(), prior, net);
        std::vector<GridNode> clustered = cluster(candidates, params.m_max);
        GridLevel lvl = project_guarantee(candidates, std::move(clustered), tau, params);
        renormalize(lvl);
        levels.push_back(std::move(lvl));
    }
    return levels;
}

GridLevel union_level(const std::vector<GridLevel>& levels, std::size_t m_cap) {
    if (levels.empty()) throw std::invalid_argument("union_level: no levels");
    std::vector<GridNode> all;
    for (const auto& lvl : levels)
        for (const auto& n : lvl.nodes)
            all.push_back(GridNode{n.hyper, n.weight / static_cast<double>(levels.size())});
    GridLevel out;
    out.stage = levels.back().stage;
    out.params = levels.back().params;
    std::vector<GridNode> deduped;
    {
        // dedupe without clustering unless the cap forces it
        std::sort(all.begin(), all.end(),
                  [](const GridNode& a, const GridNode& b) { return lex_less(a.hyper, b.hyper); });
        for (auto& n : all) {
            if (!deduped.empty() && deduped.back().hyper == n.hyper)
                deduped.back().weight += n.weight;
            else
                deduped.push_back(std::move(n));
        }
    }
    out.nodes = (deduped.size() > m_cap) ? cluster(std::move(deduped), m_cap) : std::move(deduped);
    renormalize(out);
    return out;
}

std::string serialize_levels(const std::vector<GridLevel>& levels) {
    std::ostringstream os;
    for (const auto& lvl : levels) {
        for (std::size_t i = 0; i < lvl.nodes.size(); ++i) {
            os << lvl.stage << ',' << i;
            for (double h : lvl.nodes[i].hyper) os << ',' << fmt_g12(h);
            os << ',' << fmt_g12(lvl.nodes[i].weight) << '\n';
        }
    }
    return os.str();
}

} // namespace bcr

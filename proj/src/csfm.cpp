#include "crs/csfm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crs/parallel.hpp"
#include "crs/random.hpp"
#include "crs/sampler.hpp"
#include "crs/stats.hpp"

namespace crs {

FunctionKind parse_function_kind(const std::string& name) {
    if (name == "modular") return FunctionKind::Modular;
    if (name == "coverage") return FunctionKind::Coverage;
    if (name == "cut") return FunctionKind::Cut;
    throw InputError("unknown function kind '" + name + "'");
}

std::string function_kind_name(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::Modular: return "modular";
        case FunctionKind::Coverage: return "coverage";
        case FunctionKind::Cut: return "cut";
    }
    return "?";
}

SubmodularOracle SubmodularOracle::modular(std::vector<double> weights) {
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("modular weights must be finite and nonnegative");
    }
    SubmodularOracle f;
    f.kind_ = FunctionKind::Modular;
    f.ground_size_ = static_cast<int>(weights.size());
    f.weights_ = std::move(weights);
    return f;
}

SubmodularOracle SubmodularOracle::coverage(std::vector<std::vector<int>> covers, std::vector<double> item_weights) {
    for (double w : item_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("item weights must be finite and nonnegative");
    }
    for (const auto& c : covers) {
        for (int item : c) {
            if (item < 0 || item >= static_cast<int>(item_weights.size())) throw InputError("unknown item id");
        }
    }
    SubmodularOracle f;
    f.kind_ = FunctionKind::Coverage;
    f.ground_size_ = static_cast<int>(covers.size());
    f.covers_ = std::move(covers);
    f.item_weights_ = std::move(item_weights);
    return f;
}

SubmodularOracle SubmodularOracle::cut(int ground_size, std::vector<WeightedPair> pairs) {
    if (ground_size < 0) throw InputError("negative ground size");
    for (const auto& p : pairs) {
        if (p.i < 0 || p.j < 0 || p.i >= ground_size || p.j >= ground_size || p.i == p.j) {
            throw InputError("cut pairs need two distinct ground elements");
        }
        if (!(p.w >= 0.0) || !std::isfinite(p.w)) throw InputError("cut weights must be finite and nonnegative");
    }
    SubmodularOracle f;
    f.kind_ = FunctionKind::Cut;
    f.ground_size_ = ground_size;
    f.pairs_ = std::move(pairs);
    return f;
}

SubmodularOracle SubmodularOracle::random(FunctionKind kind, int ground_size, std::uint64_t seed) {
    if (ground_size < 0) throw InputError("negative ground size");
    RngStream r(seed, 0x7375626dULL);
    switch (kind) {
        case FunctionKind::Modular: {
            std::vector<double> w(ground_size);
            for (double& v : w) v = r.uniform_open();
            return modular(std::move(w));
        }
        case FunctionKind::Coverage: {
            const int items = std::max(1, 2 * ground_size);
            std::vector<std::vector<int>> covers(ground_size);
            for (auto& c : covers) {
                for (int k = 0; k < 3; ++k) c.push_back(static_cast<int>(r.below(items)));
                std::sort(c.begin(), c.end());
                c.erase(std::unique(c.begin(), c.end()), c.end());
            }
            std::vector<double> w(items);
            for (double& v : w) v = r.uniform_open();
            return coverage(std::move(covers), std::move(w));
        }
        case FunctionKind::Cut: {
            std::vector<WeightedPair> pairs;
            for (int i = 0; i < ground_size; ++i) {
                for (int j = i + 1; j < ground_size; ++j) {
                    if (r.uniform() < 0.5) pairs.push_back({i, j, r.uniform_open()});
                }
            }
            return cut(ground_size, std::move(pairs));
        }
    }
    throw InputError("unknown function kind");
}

double SubmodularOracle::evaluate_mask(const std::vector<char>& in) const {
    if (static_cast<int>(in.size()) != ground_size_) throw InputError("membership vector has wrong length");
    double total = 0.0;
    switch (kind_) {
        case FunctionKind::Modular:
            for (int e = 0; e < ground_size_; ++e) {
                if (in[e]) total += weights_[e];
            }
            return total;
        case FunctionKind::Coverage: {
            std::vector<char> hit(item_weights_.size(), 0);
            for (int e = 0; e < ground_size_; ++e) {
                if (!in[e]) continue;
                for (int item : covers_[e]) {
                    if (!hit[item]) {
                        hit[item] = 1;
                        total += item_weights_[item];
                    }
                }
            }
            return total;
        }
        case FunctionKind::Cut:
            for (const auto& p : pairs_) {
                if (in[p.i] != in[p.j]) total += p.w;
            }
            return total;
    }
    return total;
}

double SubmodularOracle::evaluate(const EdgeSet& s) const {
    std::vector<char> in(ground_size_, 0);
    for (EdgeId e : s) {
        if (e < 0 || e >= ground_size_) throw InputError("element outside the ground set");
        in[e] = 1;
    }
    return evaluate_mask(in);
}

SubmodularityCheck check_submodular(const SubmodularOracle& f) {
    const int n = f.ground_size();
    if (n > 10) throw CapabilityError("exhaustive submodularity check is limited to 10 elements");
    constexpr double tol = 1e-9;
    const std::uint32_t total = std::uint32_t{1} << n;
    std::vector<double> value(total);
    for (std::uint32_t s = 0; s < total; ++s) {
        std::vector<char> in(n);
        for (int i = 0; i < n; ++i) in[i] = (s >> i) & 1;
        value[s] = f.evaluate_mask(in);
    }
    SubmodularityCheck res;
    for (std::uint32_t t = 0; t < total; ++t) {
        for (int e = 0; e < n; ++e) {
            if (t >> e & 1) continue;
            const double gain_t = value[t | 1u << e] - value[t];
            if (gain_t < -tol) res.monotone = false;
            for (std::uint32_t s = t;; s = (s - 1) & t) {
                ++res.checked;
                if (value[s | 1u << e] - value[s] < gain_t - tol) res.submodular = false;
                if (s == 0) break;
            }
        }
    }
    return res;
}

MultilinearEstimate multilinear_estimate(const SubmodularOracle& f, const FractionalPoint& x, std::int64_t samples,
                                         std::uint64_t seed, int jobs) {
    if (samples < 1) throw InputError("samples must be positive");
    if (static_cast<int>(x.size()) != f.ground_size()) throw InputError("point and ground set differ in size");
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) throw InputError("point entry outside [0, 1]");
    }
    std::vector<MeanAccumulator> per_block(block_count(samples));
    for_each_block(samples, jobs, [&](std::int64_t block, std::int64_t first, std::int64_t last) {
        MeanAccumulator acc;
        std::vector<char> in(x.size());
        for (std::int64_t t = first; t < last; ++t) {
            RngStream r = trial_stream(seed, t, 0);
            for (std::size_t e = 0; e < x.size(); ++e) in[e] = r.uniform() < x[e];
            acc.add(f.evaluate_mask(in));
        }
        per_block[block] = acc;
    });
    MeanAccumulator total;
    for (const auto& a : per_block) total.merge(a);
    return {total.mean(), total.stderr_of_mean(), samples};
}

double multilinear_exact(const SubmodularOracle& f, const FractionalPoint& x) {
    const int n = f.ground_size();
    if (static_cast<int>(x.size()) != n) throw InputError("point and ground set differ in size");
    if (n > 20) throw CapabilityError("exact multilinear extension is limited to 20 elements");
    double sum = 0.0;
    std::vector<char> in(n);
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << n); ++s) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            in[i] = (s >> i) & 1;
            w *= in[i] ? x[i] : 1.0 - x[i];
        }
        if (w > 0.0) sum += w * f.evaluate_mask(in);
    }
    return sum;
}

namespace {

// Maximum-weight assignment on an n x n matrix (Hungarian method, potentials).
std::vector<int> assignment(const std::vector<std::vector<double>>& gain) {
    const int n = static_cast<int>(gain.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = -gain[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j]) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

Matching bipartite_max_weight(const Multigraph& g, const std::vector<double>& w, const std::vector<int>& side) {
    std::vector<int> index(g.vertex_count());
    int left = 0, right = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) index[v] = side[v] == 0 ? left++ : right++;
    const int n = std::max(left, right);
    if (n == 0) return {};
    std::vector<std::vector<double>> gain(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<EdgeId>> best(n, std::vector<EdgeId>(n, -1));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (!(w[e] > 0.0)) continue;
        VertexId a = g.edge(e).u, b = g.edge(e).v;
        if (side[a] != 0) std::swap(a, b);
        const int i = index[a], j = index[b];
        if (best[i][j] == -1 || w[e] > gain[i][j]) {
            gain[i][j] = w[e];
            best[i][j] = e;
        }
    }
    std::vector<int> match = assignment(gain);
    Matching out;
    for (int i = 0; i < n; ++i) {
        const int j = match[i];
        if (j >= 0 && best[i][j] != -1) out.push_back(best[i][j]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void brute_force(const Multigraph& g, const std::vector<double>& w, EdgeId next, std::vector<char>& used,
                 Matching& cur, double value, Matching& best, double& best_value) {
    if (value > best_value) {
        best_value = value;
        best = cur;
    }
    for (EdgeId e = next; e < g.edge_count(); ++e) {
        if (!(w[e] > 0.0)) continue;
        const auto [u, v] = g.edge(e);
        if (used[u] || used[v]) continue;
        used[u] = used[v] = 1;
        cur.push_back(e);
        brute_force(g, w, e + 1, used, cur, value + w[e], best, best_value);
        cur.pop_back();
        used[u] = used[v] = 0;
    }
}

}  // namespace

Matching max_weight_matching(const Multigraph& g, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != g.edge_count()) throw InputError("weight vector has wrong length");
    for (double v : w) {
        if (std::isnan(v)) throw InputError("weights must not be NaN");
    }
    if (auto side = g.two_coloring()) return bipartite_max_weight(g, w, *side);
    if (g.edge_count() > kBruteForceMatchingEdges) {
        throw CapabilityError("max-weight matching on non-bipartite graphs is limited to 16 edges");
    }
    std::vector<char> used(g.vertex_count(), 0);
    Matching cur, best;
    double best_value = 0.0;
    brute_force(g, w, 0, used, cur, 0.0, best, best_value);
    return best;
}

FractionalPoint continuous_greedy(const SubmodularOracle& f, const Multigraph& g, double b, int steps,
                                  std::int64_t samples, std::uint64_t seed) {
    if (!f.monotone()) throw CapabilityError("continuous greedy supports monotone functions only");
    if (f.ground_size() != g.edge_count()) throw InputError("function ground set must be the edge set");
    if (!(b > 0.0 && b <= 1.0)) throw ParameterError("b must lie in (0, 1]");
    if (steps < 10) throw ParameterError("continuous greedy needs at least 10 steps");
    if (samples < 1) throw InputError("samples must be positive");
    const int m = g.edge_count();
    const double delta = b / steps;
    FractionalPoint x(m, 0.0);
    std::vector<char> in(m);
    for (int step = 0; step < steps; ++step) {
        // Common random sets across edges for the gain estimates.
        std::vector<double> gain(m, 0.0);
        for (std::int64_t s = 0; s < samples; ++s) {
            RngStream r = trial_stream(seed, static_cast<std::uint64_t>(step) * samples + s, 0);
            for (int e = 0; e < m; ++e) in[e] = r.uniform() < x[e];
            for (int e = 0; e < m; ++e) {
                const char was = in[e];
                in[e] = 1;
                const double with = f.evaluate_mask(in);
                in[e] = 0;
                const double without = f.evaluate_mask(in);
                in[e] = was;
                gain[e] += with - without;
            }
        }
        for (double& v : gain) v /= static_cast<double>(samples);
        for (EdgeId e : max_weight_matching(g, gain)) x[e] = std::min(1.0, x[e] + delta);
    }
    return x;
}

RoundingResult round_and_evaluate(const SubmodularOracle& f, const Multigraph& g, const FractionalPoint& x,
                                  SchemeKind kind, std::int64_t trials, std::uint64_t seed, int jobs) {
    if (trials < 1) throw InputError("trials must be positive");
    if (f.ground_size() != g.edge_count()) throw InputError("function ground set must be the edge set");
    check_scheme_input(kind, g, x, {});
    std::vector<MeanAccumulator> per_block(block_count(trials));
    for_each_block(trials, jobs, [&](std::int64_t block, std::int64_t first, std::int64_t last) {
        MeanAccumulator acc;
        for (std::int64_t t = first; t < last; ++t) {
            RngStream r = trial_stream(seed, t, 0);
            EdgeSet a = independent_round(x, r);
            acc.add(f.evaluate(resolve(kind, g, x, a, r)));
        }
        per_block[block] = acc;
    });
    MeanAccumulator total;
    for (const auto& a : per_block) total.merge(a);
    return {total.mean(), total.stderr_of_mean(), trials};
}

}  // namespace crs

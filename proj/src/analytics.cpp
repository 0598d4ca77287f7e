#include "crs/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crs/instance_io.hpp"
#include "crs/parallel.hpp"
#include "crs/pmf.hpp"
#include "crs/random.hpp"
#include "crs/stats.hpp"

namespace crs {

namespace {

void check_b(double b) {
    if (!(b >= 0.0 && b <= 1.0)) throw ParameterError("b must lie in [0, 1]");
}

}  // namespace

double beta(double b) {
    check_b(b);
    if (b == 0.0) return 1.0;
    std::vector<double> p = poisson_pmf(b, 1e-16);
    double sum = 0.0, prev = 0.0, cdf = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        cdf += p[k];
        double sq = cdf * cdf;
        sum += (sq - prev) / (1.0 + k);
        prev = sq;
    }
    // Remaining mass sits at k >= p.size(), each term weighted by at most 1/(1+K).
    sum += (1.0 - prev) / (1.0 + p.size());
    return sum;
}

double gamma(double b) {
    check_b(b);
    if (b == 0.0) return 1.0;
    return -std::expm1(-2.0 * b) / (2.0 * b);
}

double gamma_series(double b) {
    check_b(b);
    std::vector<double> p = poisson_pmf(2.0 * b, 1e-17);
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) sum += p[k] / (1.0 + k);
    return sum;
}

// ---------------------------------------------------------------------------
// Instance specs

namespace {

std::vector<std::string> split_params(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

double parse_real(const std::string& s, const std::string& what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw InputError("bad " + what + ": '" + s + "'");
    }
    return v;
}

template <class Int>
Int parse_int(const std::string& s, const std::string& what) {
    Int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError("bad " + what + ": '" + s + "'");
    return v;
}

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void expect_count(const std::vector<std::string>& p, std::size_t n, const std::string& kind) {
    if (p.size() != n) throw InputError(kind + " expects " + std::to_string(n) + " parameters");
}

}  // namespace

InstanceSpec parse_instance_spec(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw InputError("instance spec needs the form kind:params, got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    if (kind == "file") {
        if (rest.empty()) throw InputError("file: needs a path");
        return FileSpec{rest};
    }
    auto p = split_params(rest);
    if (kind == "knn") {
        expect_count(p, 2, kind);
        return KnnSpec{parse_int<int>(p[0], "n"), parse_real(p[1], "b")};
    }
    if (kind == "fig5") {
        expect_count(p, 2, kind);
        return HeavyStarSpec{parse_real(p[0], "eps"), parse_int<int>(p[1], "k")};
    }
    if (kind == "path3") {
        expect_count(p, 1, kind);
        return Path3Spec{parse_real(p[0], "eps")};
    }
    if (kind == "randbip" || kind == "randgen") {
        expect_count(p, 4, kind);
        int n = parse_int<int>(p[0], "n");
        double d = parse_real(p[1], "density");
        double b = parse_real(p[2], "b");
        auto seed = parse_int<std::uint64_t>(p[3], "seed");
        if (kind == "randbip") return RandomBipartiteSpec{n, d, b, seed};
        return RandomGeneralSpec{n, d, b, seed};
    }
    throw InputError("unknown instance kind '" + kind + "'");
}

std::string instance_spec_string(const InstanceSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, KnnSpec>) {
                return "knn:" + std::to_string(s.n) + "," + fmt(s.b);
            } else if constexpr (std::is_same_v<T, HeavyStarSpec>) {
                return "fig5:" + fmt(s.eps) + "," + std::to_string(s.k);
            } else if constexpr (std::is_same_v<T, Path3Spec>) {
                return "path3:" + fmt(s.eps);
            } else if constexpr (std::is_same_v<T, RandomBipartiteSpec>) {
                return "randbip:" + std::to_string(s.n) + "," + fmt(s.density) + "," + fmt(s.b) + "," +
                       std::to_string(s.seed);
            } else if constexpr (std::is_same_v<T, RandomGeneralSpec>) {
                return "randgen:" + std::to_string(s.n) + "," + fmt(s.density) + "," + fmt(s.b) + "," +
                       std::to_string(s.seed);
            } else {
                return "file:" + s.path;
            }
        },
        spec);
}

namespace {

Instance finish(int n, std::vector<Edge> edges, RationalVector exact, std::string name, EdgeId focus) {
    Instance inst;
    inst.graph = Multigraph(n, std::move(edges));
    inst.x.reserve(exact.size());
    for (const Rational& v : exact) inst.x.push_back(to_double(v));
    inst.exact_x = std::move(exact);
    inst.bipartition = inst.graph.two_coloring();
    inst.name = std::move(name);
    inst.focus = focus;
    return inst;
}

Instance knn(const KnnSpec& s) {
    if (s.n < 1 || s.n > 2000) throw InputError("knn needs 1 <= n <= 2000");
    check_b(s.b);
    if (s.b == 0.0) throw InputError("knn needs b > 0");
    std::vector<Edge> edges;
    for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) edges.push_back({i, s.n + j});
    }
    RationalVector x(edges.size(), decimal_rational(s.b) / s.n);
    return finish(2 * s.n, std::move(edges), std::move(x), instance_spec_string(s), -1);
}

// u = 0, v = 1, the neighbour of u is 2, the k neighbours of v follow.
Instance heavy_star(const HeavyStarSpec& s) {
    if (!(s.eps > 0.0 && s.eps < 1.0)) throw InputError("fig5 needs 0 < eps < 1");
    if (s.k < 1 || s.k > 100000) throw InputError("fig5 needs 1 <= k <= 100000");
    const Rational eps = decimal_rational(s.eps);
    std::vector<Edge> edges{{0, 1}, {0, 2}};
    RationalVector x{eps, 1 - eps};
    for (int i = 0; i < s.k; ++i) {
        edges.push_back({1, 3 + i});
        x.push_back((1 - eps) / s.k);
    }
    return finish(s.k + 3, std::move(edges), std::move(x), instance_spec_string(s), 0);
}

Instance path3(const Path3Spec& s) {
    if (!(s.eps > 0.0 && s.eps < 1.0)) throw InputError("path3 needs 0 < eps < 1");
    const Rational eps = decimal_rational(s.eps);
    return finish(4, {{0, 1}, {1, 2}, {2, 3}}, {1 - eps, eps, 1 - eps}, instance_spec_string(s), 1);
}

void check_random_params(int n, double density, double b) {
    if (n < 1 || n > 1000) throw InputError("random instances need 1 <= n <= 1000");
    if (!(density >= 0.0 && density <= 1.0)) throw InputError("density must lie in [0, 1]");
    check_b(b);
}

// Uniform weights scaled so the heaviest vertex carries load b.
FractionalPoint scaled_weights(const Multigraph& g, double b, RngStream& r) {
    FractionalPoint x(g.edge_count());
    for (double& v : x) v = r.uniform_open();
    double top = 0.0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) top = std::max(top, degree_load(g, x, v));
    for (double& v : x) v = top > 0 ? std::min(1.0, v * b / top) : 0.0;
    return x;
}

Instance random_bipartite(const RandomBipartiteSpec& s) {
    check_random_params(s.n, s.density, s.b);
    RngStream r(s.seed, 0x72616e64626970ULL);
    std::vector<Edge> edges;
    for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
            if (r.uniform() < s.density) edges.push_back({i, s.n + j});
        }
    }
    Instance inst;
    inst.graph = Multigraph(2 * s.n, std::move(edges));
    inst.x = scaled_weights(inst.graph, s.b, r);
    std::vector<int> sides(2 * s.n, 0);
    std::fill(sides.begin() + s.n, sides.end(), 1);
    inst.bipartition = sides;
    inst.name = instance_spec_string(s);
    return inst;
}

Instance random_general(const RandomGeneralSpec& s) {
    check_random_params(s.n, s.density, s.b);
    RngStream r(s.seed, 0x72616e6467656eULL);
    std::vector<Edge> edges;
    for (int i = 0; i < s.n; ++i) {
        for (int j = i + 1; j < s.n; ++j) {
            if (r.uniform() < s.density) edges.push_back({i, j});
        }
    }
    Instance inst;
    inst.graph = Multigraph(s.n, std::move(edges));
    inst.x = scaled_weights(inst.graph, s.b, r);
    // Degree loads <= b; the 2/3 factor restores odd-set feasibility when needed.
    if (s.n > kOddSetVertexCap || !in_matching_polytope_exact(inst.graph, inst.x, s.b)) {
        for (double& v : inst.x) v *= 2.0 / 3.0;
    }
    inst.bipartition = inst.graph.two_coloring();
    inst.name = instance_spec_string(s);
    return inst;
}

}  // namespace

Instance generate_instance(const InstanceSpec& spec) {
    return std::visit(
        [](const auto& s) -> Instance {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, KnnSpec>) {
                return knn(s);
            } else if constexpr (std::is_same_v<T, HeavyStarSpec>) {
                return heavy_star(s);
            } else if constexpr (std::is_same_v<T, Path3Spec>) {
                return path3(s);
            } else if constexpr (std::is_same_v<T, RandomBipartiteSpec>) {
                return random_bipartite(s);
            } else if constexpr (std::is_same_v<T, RandomGeneralSpec>) {
                return random_general(s);
            } else {
                Instance inst = load_instance(s.path);
                inst.name = "file:" + s.path;
                return inst;
            }
        },
        spec);
}

// ---------------------------------------------------------------------------
// Monte Carlo balancedness

namespace {

// Inversion samplers with the per-edge constants hoisted out of the trial loop.
struct EdgeLaw {
    double x = 0.0;
    double keep = 0.0;
    double p0 = 1.0;      // e^{-x}
    double p1_geq = 1.0;  // Pr[PoissonGeq1(x) = 1]

    explicit EdgeLaw(double xv) : x(xv) {
        if (x > 0.0) {
            keep = subsample_keep_probability(x);
            p0 = std::exp(-x);
            p1_geq = x / std::expm1(x);
        }
    }

    int poisson(RngStream& r) const {
        double prob = p0, cdf = p0;
        const double u = r.uniform();
        int k = 0;
        while (u >= cdf && k < 200) {
            ++k;
            prob *= x / k;
            cdf += prob;
        }
        return k;
    }

    int poisson_geq1(RngStream& r) const {
        double prob = p1_geq, cdf = p1_geq;
        const double u = r.uniform();
        int k = 1;
        while (u >= cdf && k < 200) {
            ++k;
            prob *= x / k;
            cdf += prob;
        }
        return k;
    }
};

// Union-find over vertices with parity, tracking whether each component of the
// active edges is bipartite.
class ParityForest {
public:
    explicit ParityForest(int n) : parent_(n), parity_(n, 0), bip_(n, 1) {}

    void reset() {
        std::iota(parent_.begin(), parent_.end(), 0);
        std::fill(parity_.begin(), parity_.end(), 0);
        std::fill(bip_.begin(), bip_.end(), 1);
    }

    std::pair<int, int> find(int v) {
        int p = 0;
        int root = v;
        while (parent_[root] != root) {
            p ^= parity_[root];
            root = parent_[root];
        }
        // Path compression with parity fix-up.
        int cur = v, cur_p = p;
        while (parent_[cur] != root) {
            int next = parent_[cur];
            int next_p = cur_p ^ parity_[cur];
            parent_[cur] = root;
            parity_[cur] = static_cast<char>(cur_p);
            cur = next;
            cur_p = next_p;
        }
        return {root, p};
    }

    void unite(int u, int v) {
        auto [ru, pu] = find(u);
        auto [rv, pv] = find(v);
        if (ru == rv) {
            if (pu == pv) bip_[ru] = 0;
            return;
        }
        parent_[rv] = ru;
        parity_[rv] = static_cast<char>(pu ^ pv ^ 1);
        bip_[ru] = bip_[ru] && bip_[rv];
    }

    // Bipartiteness of the component that would contain edge {u, v}.
    bool bipartite_with(int u, int v) {
        auto [ru, pu] = find(u);
        auto [rv, pv] = find(v);
        if (ru == rv) return bip_[ru] && pu != pv;
        return bip_[ru] && bip_[rv];
    }

private:
    std::vector<int> parent_;
    std::vector<char> parity_;
    std::vector<char> bip_;
};

struct TrialState {
    std::vector<char> in_r, kept, coin, cross;
    std::vector<int> qg1, qbase;
    std::vector<long long> at, pair;
    std::vector<char> side;
    ParityForest forest;

    TrialState(const Multigraph& g)
        : in_r(g.edge_count()), kept(g.edge_count()), coin(g.edge_count()), cross(g.edge_count(), 1),
          qg1(g.edge_count()), qbase(g.edge_count()), at(g.vertex_count()), pair(g.pair_class_count()),
          side(g.vertex_count()), forest(g.vertex_count()) {}
};

}  // namespace

BalancednessReport estimate_balancedness(SchemeKind kind, const Instance& inst, const EstimateOptions& opt) {
    const Multigraph& g = inst.graph;
    const FractionalPoint& x = inst.x;
    check_scheme_input(kind, g, x, {});
    if (opt.trials < kMinEstimateTrials) throw InputError("estimate_balancedness needs at least 1000 trials");
    EdgeSet report_edges;
    if (opt.edges.empty()) {
        report_edges = support(x);
    } else {
        report_edges = normalize_edge_set(opt.edges);
        check_edge_set(g, report_edges);
        report_edges.erase(std::remove_if(report_edges.begin(), report_edges.end(),
                                          [&](EdgeId e) { return x[e] == 0.0; }),
                           report_edges.end());
    }
    const EdgeSet supp = support(x);
    std::vector<EdgeLaw> law;
    law.reserve(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) law.emplace_back(x[e]);

    const SchemeKind base = base_kind(kind);
    const bool merged = is_merged(kind);
    const auto formula = intensity_formula(kind);
    const bool bipartition = kind == SchemeKind::RefBipartition;
    const double scale = kind == SchemeKind::RefScaledTwoThirds ? 2.0 / 3.0 : 1.0;
    const std::uint64_t vertex_slot = static_cast<std::uint64_t>(g.edge_count());

    const std::int64_t blocks = block_count(opt.trials);
    std::vector<std::vector<MeanAccumulator>> per_block(blocks);

    for_each_block(opt.trials, opt.jobs, [&](std::int64_t block, std::int64_t first, std::int64_t last) {
        std::vector<MeanAccumulator> acc(report_edges.size());
        TrialState st(g);
        for (std::int64_t t = first; t < last; ++t) {
            for (EdgeId h : supp) {
                RngStream r = trial_stream(opt.seed, t, h);
                const EdgeLaw& l = law[h];
                st.in_r[h] = r.uniform() < l.x;
                if (base == SchemeKind::RefIsolated) {
                    st.coin[h] = static_cast<char>(r.next_u64() >> 63);
                } else if (formula) {
                    st.kept[h] = r.uniform() < l.keep;
                    st.qg1[h] = l.poisson_geq1(r);
                    st.qbase[h] = merged ? l.poisson(r) : (st.in_r[h] && st.kept[h] ? st.qg1[h] : 0);
                }
            }
            if (bipartition) {
                for (VertexId v = 0; v < g.vertex_count(); ++v) {
                    st.side[v] = static_cast<char>(trial_stream(opt.seed, t, vertex_slot + v).next_u64() >> 63);
                }
                for (EdgeId h : supp) {
                    st.cross[h] = st.side[g.edge(h).u] != st.side[g.edge(h).v];
                    if (!st.cross[h]) st.qbase[h] = 0;
                }
            }
            std::fill(st.at.begin(), st.at.end(), 0);
            std::fill(st.pair.begin(), st.pair.end(), 0);
            for (EdgeId h : supp) {
                long long w;
                if (formula) {
                    w = st.qbase[h];
                } else if (base == SchemeKind::RefIsolated) {
                    w = st.in_r[h] && st.coin[h];
                } else {
                    w = st.in_r[h];
                }
                if (w == 0) continue;
                st.at[g.edge(h).u] += w;
                st.at[g.edge(h).v] += w;
                st.pair[g.pair_class(h)] += w;
            }
            if (formula == Formula::Mixed) {
                st.forest.reset();
                for (EdgeId h : supp) {
                    if (st.qbase[h] > 0) st.forest.unite(g.edge(h).u, g.edge(h).v);
                }
            }
            for (std::size_t i = 0; i < report_edges.size(); ++i) {
                const EdgeId e = report_edges[i];
                const auto [u, v] = g.edge(e);
                const int c = g.pair_class(e);
                double y = 0.0;
                if (formula) {
                    const long long qe = st.kept[e] && st.cross[e] ? st.qg1[e] : 0;
                    if (qe > 0) {
                        const long long su = st.at[u] - st.qbase[e] + qe;
                        const long long sv = st.at[v] - st.qbase[e] + qe;
                        const long long sp = st.pair[c] - st.qbase[e] + qe;
                        bool use_max = *formula == Formula::Max;
                        if (*formula == Formula::Mixed) use_max = st.forest.bipartite_with(u, v);
                        y = scale * double(qe) / double(use_max ? std::max(su, sv) : su + sv - sp);
                    }
                } else if (base == SchemeKind::RefIsolated) {
                    if (st.coin[e]) {
                        const long long a = st.in_r[e] ? 1 : 0;
                        const long long others = (st.at[u] - a) + (st.at[v] - a) - (st.pair[c] - a);
                        y = others == 0 ? 1.0 : 0.0;
                    }
                } else {
                    const long long a = st.in_r[e] ? 1 : 0;
                    const long long du = st.at[u] - a + 1;
                    const long long dv = st.at[v] - a + 1;
                    if (base == SchemeKind::BipSimple) {
                        y = 1.0 / double(std::max(du, dv));
                    } else {
                        y = 1.0 / double(du + dv - (st.pair[c] - a + 1));
                    }
                }
                acc[i].add(y);
            }
        }
        per_block[block] = std::move(acc);
    });

    std::vector<MeanAccumulator> total(report_edges.size());
    for (const auto& blk : per_block) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(blk[i]);
    }
    BalancednessReport rep;
    rep.mode = BalancednessReport::Mode::MonteCarlo;
    rep.edges = report_edges;
    rep.trials = opt.trials;
    for (const auto& a : total) {
        rep.value.push_back(a.mean());
        rep.std_error.push_back(a.stderr_of_mean());
    }
    rep.finish();
    return rep;
}

// ---------------------------------------------------------------------------
// Optimality limit

double optimality_limit_exact(int n, double b) {
    if (n < 2) throw InputError("optimality limit needs n >= 2");
    check_b(b);
    if (b == 0.0) return 1.0;
    std::vector<double> p = binomial_pmf(n - 1, b / n);
    double sum = 0.0, prev = 0.0, cdf = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        cdf += p[k];
        double sq = cdf * cdf;
        sum += (sq - prev) / (1.0 + k);
        prev = sq;
    }
    return sum;
}

LimitResult optimality_limit(int n, double b, std::int64_t trials, std::uint64_t seed, int jobs) {
    if (n < 2) throw InputError("optimality limit needs n >= 2");
    check_b(b);
    if (n <= 12 || b == 0.0) return {optimality_limit_exact(n, b), 0.0, true, 0};
    if (trials < 1) throw InputError("trials must be positive");
    const int m = n - 1;
    const double p = b / n;
    const double p0 = std::exp(m * std::log1p(-p));
    const double ratio = p / (1.0 - p);
    auto binomial = [&](RngStream& r) {
        double prob = p0, cdf = p0;
        const double u = r.uniform();
        int k = 0;
        while (u >= cdf && k < m) {
            prob *= ratio * (m - k) / (k + 1);
            ++k;
            cdf += prob;
        }
        return k;
    };
    std::vector<MeanAccumulator> per_block(block_count(trials));
    for_each_block(trials, jobs, [&](std::int64_t block, std::int64_t first, std::int64_t last) {
        MeanAccumulator acc;
        for (std::int64_t t = first; t < last; ++t) {
            RngStream r = trial_stream(seed, t, 0);
            int a = binomial(r);
            int c = binomial(r);
            acc.add(1.0 / (1.0 + std::max(a, c)));
        }
        per_block[block] = acc;
    });
    MeanAccumulator total;
    for (const auto& a : per_block) total.merge(a);
    return {total.mean(), total.stderr_of_mean(), false, trials};
}

}  // namespace crs

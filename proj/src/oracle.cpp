#include "crs/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "crs/parallel.hpp"
#include "crs/pmf.hpp"
#include "crs/random.hpp"
#include "crs/stats.hpp"

namespace crs {

namespace {

using Mask = std::uint64_t;

constexpr double kMonotonicityTolerance = 1e-9;

Mask to_mask(const EdgeSet& s) {
    Mask m = 0;
    for (EdgeId e : s) m |= Mask{1} << e;
    return m;
}

EdgeSet from_mask(Mask m) {
    EdgeSet s;
    for (; m; m &= m - 1) s.push_back(std::countr_zero(m));
    return s;
}

void require_mask_width(const Multigraph& g) {
    if (g.edge_count() > 64) throw CapabilityError("exact oracles are limited to graphs with at most 64 edges");
}

// Expected marginals of the intensity-based schemes. Given the survivor set S,
// the value at e depends only on independent sums of conditioned Poisson
// variables, so E[y_e | S] is a short convolution; results are memoized by S.
class IntensityOracle {
public:
    IntensityOracle(const Multigraph& g, const FractionalPoint& x, Formula f, double scale)
        : g_(g), formula_(f), scale_(scale), keep_(g.edge_count(), 0.0), pmf_(g.edge_count()) {
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            if (x[e] > 0) {
                keep_[e] = subsample_keep_probability(x[e]);
                pmf_[e] = poisson_geq1_pmf(x[e], kTruncationTail);
            }
        }
    }

    const MarginalVector& given_survivors(Mask s) {
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
        MarginalVector y(g_.edge_count(), 0.0);
        std::vector<char> active(g_.edge_count(), 0);
        for (Mask m = s; m; m &= m - 1) active[std::countr_zero(m)] = 1;
        std::vector<char> bip;
        if (formula_ == Formula::Mixed) bip = bipartite_component_flags(g_, active);
        for (Mask m = s; m; m &= m - 1) {
            EdgeId e = std::countr_zero(m);
            auto [u, v] = g_.edge(e);
            std::vector<double> at_u{1.0}, at_v{1.0}, same{1.0};
            for (EdgeId h : g_.incident(u)) {
                if (h == e || !active[h]) continue;
                if (g_.pair_class(h) == g_.pair_class(e)) {
                    same = convolve(same, pmf_[h]);
                } else {
                    at_u = convolve(at_u, pmf_[h]);
                }
            }
            for (EdgeId h : g_.incident(v)) {
                if (h == e || !active[h] || g_.pair_class(h) == g_.pair_class(e)) continue;
                at_v = convolve(at_v, pmf_[h]);
            }
            const bool use_max = formula_ == Formula::Max || (formula_ == Formula::Mixed && bip[e]);
            std::vector<double> rest = convolve(same, use_max ? max_of(at_u, at_v) : convolve(at_u, at_v));
            double acc = 0.0;
            const std::vector<double>& own = pmf_[e];
            for (std::size_t a = 1; a < own.size(); ++a) {
                for (std::size_t w = 0; w < rest.size(); ++w) acc += own[a] * rest[w] * a / double(a + w);
            }
            y[e] = scale_ * acc;
        }
        return memo_.emplace(s, std::move(y)).first->second;
    }

    // E[y^a]: survivors of the subsampling step, each kept independently.
    MarginalVector expected(Mask a) {
        MarginalVector out(g_.edge_count(), 0.0);
        for (Mask s = a;; s = (s - 1) & a) {
            double w = 1.0;
            for (Mask m = a; m; m &= m - 1) {
                EdgeId e = std::countr_zero(m);
                w *= (s >> e & 1) ? keep_[e] : 1.0 - keep_[e];
            }
            if (w > 0) {
                const MarginalVector& y = given_survivors(s);
                for (Mask m = s; m; m &= m - 1) {
                    EdgeId e = std::countr_zero(m);
                    out[e] += w * y[e];
                }
            }
            if (s == 0) break;
        }
        return out;
    }

private:
    const Multigraph& g_;
    Formula formula_;
    double scale_;
    std::vector<double> keep_;
    std::vector<std::vector<double>> pmf_;
    std::unordered_map<Mask, MarginalVector> memo_;
};

template <class Num>
std::vector<Num> isolated_exact(const Multigraph& g, Mask a) {
    std::vector<Num> y(g.edge_count(), Num(0));
    const EdgeSet edges = from_mask(a);
    const int n = static_cast<int>(edges.size());
    const Num weight = Num(1) / Num(std::uint64_t{1} << n);
    for (std::uint32_t t = 0; t < (std::uint32_t{1} << n); ++t) {
        for (int i = 0; i < n; ++i) {
            if (!(t >> i & 1)) continue;
            bool alone = true;
            for (int j = 0; j < n && alone; ++j) {
                if (j != i && (t >> j & 1) && g.share_endpoint(edges[i], edges[j])) alone = false;
            }
            if (alone) y[edges[i]] += weight;
        }
    }
    return y;
}

// Marginal oracle for one (kind, graph, point), memoized across calls.
class KindOracle {
public:
    KindOracle(SchemeKind kind, const Multigraph& g, const FractionalPoint& x) : kind_(base_kind(kind)), g_(g) {
        require_mask_width(g);
        if (auto f = intensity_formula(kind)) {
            double scale = kind_ == SchemeKind::RefScaledTwoThirds ? 2.0 / 3.0 : 1.0;
            intensity_ = std::make_unique<IntensityOracle>(g, x, *f, scale);
        }
    }

    MarginalVector expected(Mask a) {
        switch (kind_) {
            case SchemeKind::BipSimple:
            case SchemeKind::GenRandomOrder:
            case SchemeKind::RefIsolated: {
                RationalVector r = rational(a);
                MarginalVector y(r.size());
                for (std::size_t e = 0; e < r.size(); ++e) y[e] = to_double(r[e]);
                return y;
            }
            case SchemeKind::RefBipartition: return bipartition(a);
            default: return cached(a);
        }
    }

    RationalVector rational(Mask a) const {
        switch (kind_) {
            case SchemeKind::BipSimple: return bip_simple_marginals_exact(g_, from_mask(a));
            case SchemeKind::GenRandomOrder: return gen_random_order_marginals_exact(g_, from_mask(a));
            case SchemeKind::RefIsolated: return isolated_exact<Rational>(g_, a);
            default: throw CapabilityError("exact rational marginals exist only for ex1.4, ex2.2 and ex4.1");
        }
    }

private:
    const MarginalVector& cached(Mask a) {
        auto it = expected_memo_.find(a);
        if (it != expected_memo_.end()) return it->second;
        return expected_memo_.emplace(a, intensity_->expected(a)).first->second;
    }

    // Uniform side assignment of the vertices touched by a; the others do not
    // affect which edges of a cross.
    MarginalVector bipartition(Mask a) {
        std::vector<VertexId> touched;
        for (Mask m = a; m; m &= m - 1) {
            EdgeId e = std::countr_zero(m);
            touched.push_back(g_.edge(e).u);
            touched.push_back(g_.edge(e).v);
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        if (touched.size() > 20) throw CapabilityError("random-bipartition oracle is limited to 20 vertices");
        std::vector<int> pos(g_.vertex_count(), -1);
        for (std::size_t i = 0; i < touched.size(); ++i) pos[touched[i]] = static_cast<int>(i);
        MarginalVector out(g_.edge_count(), 0.0);
        const std::uint32_t sides = std::uint32_t{1} << touched.size();
        const double w = 1.0 / sides;
        for (std::uint32_t s = 0; s < sides; ++s) {
            Mask cross = 0;
            for (Mask m = a; m; m &= m - 1) {
                EdgeId e = std::countr_zero(m);
                if ((s >> pos[g_.edge(e).u] & 1) != (s >> pos[g_.edge(e).v] & 1)) cross |= Mask{1} << e;
            }
            const MarginalVector& y = cached(cross);
            for (Mask m = cross; m; m &= m - 1) {
                EdgeId e = std::countr_zero(m);
                out[e] += w * y[e];
            }
        }
        return out;
    }

    SchemeKind kind_;
    const Multigraph& g_;
    std::unique_ptr<IntensityOracle> intensity_;
    std::unordered_map<Mask, MarginalVector> expected_memo_;
};

void check_exact_input(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a) {
    check_scheme_input(kind, g, x, a);
    require_mask_width(g);
}

double truncation_bound(SchemeKind kind, const Multigraph& g) {
    return intensity_formula(kind) ? g.edge_count() * 1e-12 : 0.0;
}

}  // namespace

double BalancednessReport::at(EdgeId e) const {
    auto it = std::find(edges.begin(), edges.end(), e);
    if (it == edges.end()) throw InputError("edge " + std::to_string(e) + " is not in the report");
    return value[it - edges.begin()];
}

double BalancednessReport::std_error_at(EdgeId e) const {
    auto it = std::find(edges.begin(), edges.end(), e);
    if (it == edges.end()) throw InputError("edge " + std::to_string(e) + " is not in the report");
    return std_error[it - edges.begin()];
}

void BalancednessReport::finish() {
    minimum = 1.0;
    argmin = -1;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (argmin == -1 || value[i] < minimum) {
            minimum = value[i];
            argmin = edges[i];
        }
    }
    if (std_error.size() != edges.size()) std_error.assign(edges.size(), 0.0);
    half_width.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) half_width[i] = kZ99 * std_error[i];
}

MarginalVector exact_expected_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x,
                                        const EdgeSet& a) {
    check_exact_input(kind, g, x, a);
    EdgeSet set = normalize_edge_set(a);
    if (static_cast<int>(set.size()) > kExactSetCap) {
        throw CapabilityError("exact expected marginals are limited to input sets of 12 edges");
    }
    KindOracle oracle(kind, g, x);
    return oracle.expected(to_mask(set));
}

RationalVector exact_expected_marginals_rational(SchemeKind kind, const Multigraph& g, const EdgeSet& a) {
    check_edge_set(g, a);
    require_mask_width(g);
    if (requires_bipartite(kind) && !g.is_bipartite()) throw CapabilityError(scheme_name(kind) + " needs a bipartite graph");
    EdgeSet set = normalize_edge_set(a);
    if (static_cast<int>(set.size()) > kExactSetCap) {
        throw CapabilityError("exact expected marginals are limited to input sets of 12 edges");
    }
    KindOracle oracle(kind, g, FractionalPoint(g.edge_count(), 1.0));
    return oracle.rational(to_mask(set));
}

BalancednessReport exact_balancedness(SchemeKind kind, const Multigraph& g, const FractionalPoint& x) {
    check_exact_input(kind, g, x, {});
    const EdgeSet supp = support(x);
    if (static_cast<int>(supp.size()) > kExactSetCap) {
        throw CapabilityError("exact balancedness is limited to 12 support edges");
    }
    KindOracle oracle(kind, g, x);
    const int n = static_cast<int>(supp.size());
    std::vector<double> total(g.edge_count(), 0.0);
    for (std::uint32_t t = 0; t < (std::uint32_t{1} << n); ++t) {
        double w = 1.0;
        Mask a = 0;
        for (int i = 0; i < n; ++i) {
            if (t >> i & 1) {
                w *= x[supp[i]];
                a |= Mask{1} << supp[i];
            } else {
                w *= 1.0 - x[supp[i]];
            }
        }
        if (w == 0.0) continue;
        MarginalVector y = oracle.expected(a);
        for (EdgeId e : supp) total[e] += w * y[e];
    }
    BalancednessReport rep;
    rep.mode = BalancednessReport::Mode::Exact;
    rep.edges = supp;
    for (EdgeId e : supp) rep.value.push_back(total[e] / x[e]);
    rep.error_bound = truncation_bound(kind, g);
    rep.finish();
    return rep;
}

RationalVector exact_balancedness_rational(SchemeKind kind, const Multigraph& g, const RationalVector& x) {
    if (static_cast<int>(x.size()) != g.edge_count()) throw InputError("point has wrong length");
    for (const Rational& v : x) {
        if (v < 0 || v > 1) throw InputError("point entry outside [0,1]");
    }
    EdgeSet supp;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (x[e] > 0) supp.push_back(e);
    }
    if (static_cast<int>(supp.size()) > kExactSetCap) {
        throw CapabilityError("exact balancedness is limited to 12 support edges");
    }
    require_mask_width(g);
    if (!is_deterministic(kind) && kind != SchemeKind::RefIsolated) {
        throw CapabilityError("rational mode covers ex1.4, ex2.2 and ex4.1 only");
    }
    if (requires_bipartite(kind) && !g.is_bipartite()) throw CapabilityError(scheme_name(kind) + " needs a bipartite graph");
    KindOracle oracle(kind, g, FractionalPoint(g.edge_count(), 1.0));
    const int n = static_cast<int>(supp.size());
    RationalVector total(g.edge_count(), Rational(0));
    for (std::uint32_t t = 0; t < (std::uint32_t{1} << n); ++t) {
        Rational w = 1;
        Mask a = 0;
        for (int i = 0; i < n; ++i) {
            if (t >> i & 1) {
                w *= x[supp[i]];
                a |= Mask{1} << supp[i];
            } else {
                w *= 1 - x[supp[i]];
            }
        }
        if (w == 0) continue;
        RationalVector y = oracle.rational(a);
        for (EdgeId e : supp) total[e] += w * y[e];
    }
    for (EdgeId e : supp) total[e] /= x[e];
    return total;
}

MonotonicityResult verify_monotonicity(const MarginalOracle& oracle, const EdgeSet& ground_in, CheckMode mode,
                                       std::int64_t samples, std::uint64_t seed) {
    const EdgeSet ground = normalize_edge_set(ground_in);
    const int n = static_cast<int>(ground.size());
    auto subset = [&](std::uint32_t m) {
        EdgeSet s;
        for (int i = 0; i < n; ++i) {
            if (m >> i & 1) s.push_back(ground[i]);
        }
        return s;
    };
    MonotonicityResult res;
    auto compare = [&](std::uint32_t small, std::uint32_t large, const MarginalVector& ys, const MarginalVector& yl) {
        for (int i = 0; i < n; ++i) {
            if (!(small >> i & 1)) continue;
            EdgeId e = ground[i];
            ++res.checked;
            if (ys[e] < yl[e] - kMonotonicityTolerance) {
                res.pass = false;
                res.witness = MonotonicityWitness{subset(small), subset(large), e, ys[e], yl[e]};
                return false;
            }
        }
        return true;
    };
    if (mode == CheckMode::Exhaustive) {
        if (n > kMonotonicityCap) throw CapabilityError("exhaustive monotonicity is limited to 10 support edges");
        const std::uint32_t total = std::uint32_t{1} << n;
        std::vector<MarginalVector> m(total);
        for (std::uint32_t s = 0; s < total; ++s) m[s] = oracle(subset(s));
        for (std::uint32_t large = 1; large < total; ++large) {
            for (std::uint32_t small = (large - 1) & large;; small = (small - 1) & large) {
                if (small != 0 && !compare(small, large, m[small], m[large])) return res;
                if (small == 0) break;
            }
        }
        return res;
    }
    if (n > 31) throw CapabilityError("sampled monotonicity is limited to 31 support edges");
    RngStream r(seed, 0x6d6f6e6fULL);
    for (std::int64_t k = 0; k < samples; ++k) {
        std::uint32_t large = 0, small = 0;
        for (int i = 0; i < n; ++i) {
            if (r.next_u64() >> 63) {
                large |= 1u << i;
                if (r.next_u64() >> 63) small |= 1u << i;
            }
        }
        if (small == 0 || small == large) continue;
        if (!compare(small, large, oracle(subset(small)), oracle(subset(large)))) return res;
    }
    return res;
}

MonotonicityResult verify_monotonicity(SchemeKind kind, const Multigraph& g, const FractionalPoint& x,
                                       CheckMode mode, std::int64_t samples, std::uint64_t seed) {
    check_exact_input(kind, g, x, {});
    auto oracle = std::make_shared<KindOracle>(kind, g, x);
    MarginalOracle fn = [oracle](const EdgeSet& a) { return oracle->expected(to_mask(a)); };
    return verify_monotonicity(fn, support(x), mode, samples, seed);
}

TruncatedDistribution truncated_poisson(double lambda, int k_max) {
    if (k_max < 0) throw InputError("negative truncation point");
    double beyond = 0.0;
    std::vector<double> full = poisson_pmf(lambda, 1e-17, &beyond);
    TruncatedDistribution d;
    d.p.assign(k_max + 1, 0.0);
    for (int k = 0; k <= k_max && k < static_cast<int>(full.size()); ++k) d.p[k] = full[k];
    for (std::size_t k = k_max + 1; k < full.size(); ++k) beyond += full[k];
    d.tail = beyond;
    return d;
}

TruncatedDistribution point_mass(int value, int k_max) {
    if (value < 0 || value > k_max) throw InputError("point mass outside the truncated support");
    TruncatedDistribution d;
    d.p.assign(k_max + 1, 0.0);
    d.p[value] = 1.0;
    return d;
}

DominanceResult check_stochastic_dominance(const TruncatedDistribution& p, const TruncatedDistribution& q,
                                           const TruncatedDistribution& xyz, DominanceDirection direction) {
    if (p.p.size() != q.p.size() || p.p.size() != xyz.p.size()) {
        throw InputError("distributions must share one truncation point");
    }
    for (const auto* d : {&p, &q, &xyz}) {
        for (double v : d->p) {
            if (!(v >= 0.0)) throw InputError("negative probability mass");
        }
    }
    const std::vector<double> dominating = max_of(convolve(xyz.p, p.p), convolve(xyz.p, q.p));
    const std::vector<double> dominated = convolve(xyz.p, max_of(p.p, q.p));
    const std::size_t n = std::max(dominating.size(), dominated.size());
    // Truncated masses can make either side short by at most the neglected tails.
    const double tolerance = 1e-12 + 2.0 * xyz.tail + p.tail + q.tail;
    DominanceResult res;
    res.worst_margin = std::numeric_limits<double>::infinity();
    double tail_a = 0.0, tail_b = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        tail_a += k < dominating.size() ? dominating[k] : 0.0;
        tail_b += k < dominated.size() ? dominated[k] : 0.0;
        double margin = direction == DominanceDirection::Forward ? tail_a - tail_b : tail_b - tail_a;
        if (margin < res.worst_margin) {
            res.worst_margin = margin;
            res.worst_k = static_cast<int>(k);
        }
    }
    res.pass = res.worst_margin >= -tolerance;
    return res;
}

namespace {

template <class T>
SplitResult<T> split_impl(const Multigraph& g, const std::vector<T>& x, EdgeId e, int k) {
    g.check_edge(e);
    if (k < 1) throw InputError("split count must be positive");
    if (static_cast<int>(x.size()) != g.edge_count()) throw InputError("point has wrong length");
    std::vector<Edge> edges = g.edges();
    std::vector<T> y = x;
    SplitResult<T> out;
    out.siblings.push_back(e);
    const T share = x[e] / T(k);
    y[e] = share;
    for (int i = 1; i < k; ++i) {
        out.siblings.push_back(static_cast<EdgeId>(edges.size()));
        edges.push_back(g.edge(e));
        y.push_back(share);
    }
    out.graph = Multigraph(g.vertex_count(), std::move(edges));
    out.x = std::move(y);
    return out;
}

}  // namespace

SplitResult<double> split_edge(const Multigraph& g, const FractionalPoint& x, EdgeId e, int k) {
    return split_impl(g, x, e, k);
}

SplitResult<Rational> split_edge(const Multigraph& g, const RationalVector& x, EdgeId e, int k) {
    return split_impl(g, x, e, k);
}

std::vector<SiblingPattern> sibling_lift_law(const Rational& x_e, int k) {
    if (!(x_e > 0) || x_e > 1) throw ParameterError("sibling lift needs 0 < x_e <= 1");
    if (k < 1 || k > 20) throw InputError("sibling count must lie in [1, 20]");
    const Rational p = x_e / k;
    std::vector<SiblingPattern> law;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << k); ++mask) {
        int j = std::popcount(mask);
        Rational prob = 1 / x_e;
        for (int i = 0; i < j; ++i) prob *= p;
        for (int i = j; i < k; ++i) prob *= 1 - p;
        law.push_back({mask, prob});
    }
    return law;
}

EdgeSet sibling_lift(const EdgeSet& a, const std::vector<EdgeId>& siblings, double x_e, RngStream& r) {
    if (!(x_e > 0.0 && x_e <= 1.0)) throw ParameterError("sibling lift needs 0 < x_e <= 1");
    if (siblings.empty()) throw InputError("sibling list is empty");
    const EdgeId e = siblings.front();
    if (std::find(a.begin(), a.end(), e) == a.end()) throw InputError("input set does not contain the split edge");
    const int k = static_cast<int>(siblings.size());
    const double p = x_e / k;
    EdgeSet out;
    for (EdgeId h : a) {
        if (h != e) out.push_back(h);
    }
    // Independent Bernoulli(p) per sibling, conditioned on at least one.
    bool any = false;
    for (int i = 0; i < k; ++i) {
        double prob = any ? p : p / -std::expm1((k - i) * std::log1p(-p));
        if (p >= 1.0) prob = 1.0;
        if (r.uniform() < prob) {
            any = true;
            out.push_back(siblings[i]);
        }
    }
    return normalize_edge_set(out);
}

Partition greedy_partition(const Multigraph& g, const FractionalPoint& x, EdgeId e) {
    validate_point(g, x);
    g.check_edge(e);
    constexpr double slack = 1e-12;
    const auto [u, v] = g.edge(e);
    double between = 0.0;
    for (EdgeId h : g.edges_between(u, v)) between += x[h];
    const double out_u = degree_load(g, x, u) - between;
    const double out_v = degree_load(g, x, v) - between;
    if (out_u < 0.99 - slack) throw InputError("hypothesis x(delta(u) - E_uv) >= 0.99 fails");
    if (out_v < 0.99 - slack) throw InputError("hypothesis x(delta(v) - E_uv) >= 0.99 fails");
    if (between > 0.01 + slack) throw InputError("hypothesis x(E_uv) <= 0.01 fails");

    std::vector<double> to_u(g.vertex_count(), 0.0), to_v(g.vertex_count(), 0.0);
    for (EdgeId h : g.incident(u)) to_u[g.other_end(h, u)] += x[h];
    for (EdgeId h : g.incident(v)) to_v[g.other_end(h, v)] += x[h];
    std::vector<VertexId> order;
    for (VertexId w = 0; w < g.vertex_count(); ++w) {
        if (w != u && w != v) order.push_back(w);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](VertexId a, VertexId b) { return to_u[a] + to_v[a] > to_u[b] + to_v[b]; });
    Partition part;
    double load_u = 0.0, load_v = 0.0;
    int rest = 0;  // 0 undecided, 1 rest to u's side, 2 rest to v's side
    for (VertexId w : order) {
        bool near_u = rest == 1 || (rest == 0 && to_u[w] >= to_v[w]);
        if (near_u) {
            part.near_u.push_back(w);
            load_u += to_u[w];
        } else {
            part.near_v.push_back(w);
            load_v += to_v[w];
        }
        if (rest == 0) {
            if (load_u >= 0.33 - slack) {
                rest = 2;
            } else if (load_v >= 0.33 - slack) {
                rest = 1;
            }
        }
    }
    std::sort(part.near_u.begin(), part.near_u.end());
    std::sort(part.near_v.begin(), part.near_v.end());
    if (load_u < 0.33 - slack || load_v < 0.33 - slack) {
        throw InputError("greedy partition could not reach load 0.33 on both sides");
    }
    return part;
}

double PathEventEstimate::std_error_path() const {
    double f = frequency_path();
    return trials ? std::sqrt(f * (1 - f) / trials) : 0.0;
}

double PathEventEstimate::std_error_strong() const {
    double f = frequency_strong();
    return trials ? std::sqrt(f * (1 - f) / trials) : 0.0;
}

PathEventEstimate path_event_probability(const Multigraph& g, const FractionalPoint& x, EdgeId e,
                                         std::int64_t trials, std::uint64_t seed, int jobs) {
    if (trials < 1) throw InputError("trials must be positive");
    const Partition part = greedy_partition(g, x, e);
    const auto [u, v] = g.edge(e);
    std::vector<int> group(g.vertex_count(), 0);  // 1: near u, 2: near v
    for (VertexId w : part.near_u) group[w] = 1;
    for (VertexId w : part.near_v) group[w] = 2;
    enum Cat { kOther, kParallel, kUNear, kVNear, kCross };
    std::vector<int> cat(g.edge_count(), kOther);
    for (EdgeId h = 0; h < g.edge_count(); ++h) {
        if (h == e) continue;
        auto [a, b] = g.edge(h);
        if (g.pair_class(h) == g.pair_class(e)) {
            cat[h] = kParallel;
        } else if (a == u || b == u) {
            cat[h] = group[g.other_end(h, u)] == 1 ? kUNear : kCross;
        } else if (a == v || b == v) {
            cat[h] = group[g.other_end(h, v)] == 2 ? kVNear : kCross;
        }
    }
    const double keep = subsample_keep_probability(x[e]);
    const std::int64_t blocks = block_count(trials);
    std::vector<std::int64_t> path_counts(blocks, 0), strong_counts(blocks, 0);
    for_each_block(trials, jobs, [&](std::int64_t block, std::int64_t first, std::int64_t last) {
        std::vector<int> q(g.edge_count(), 0);
        std::int64_t c_path = 0, c_strong = 0;
        for (std::int64_t t = first; t < last; ++t) {
            for (EdgeId h = 0; h < g.edge_count(); ++h) {
                RngStream r = trial_stream(seed, t, h);
                if (h == e) {
                    q[h] = r.uniform() < keep ? draw_poisson_geq1(x[h], r) : 0;
                } else {
                    q[h] = x[h] > 0 ? draw_poisson(x[h], r) : 0;
                }
            }
            if (q[e] != 1) continue;
            auto live_degree = [&](VertexId w) {
                int d = 0;
                for (EdgeId h : g.incident(w)) d += q[h] > 0;
                return d;
            };
            // Event C.
            if (live_degree(u) == 2 && live_degree(v) == 2) {
                EdgeId gu = -1, gv = -1;
                for (EdgeId h : g.incident(u)) {
                    if (h != e && q[h] > 0) gu = h;
                }
                for (EdgeId h : g.incident(v)) {
                    if (h != e && q[h] > 0) gv = h;
                }
                VertexId pu = g.other_end(gu, u), pv = g.other_end(gv, v);
                if (pu != v && pv != u && pu != pv && q[gu] == 1 && q[gv] == 1 && live_degree(pu) == 1 &&
                    live_degree(pv) == 1) {
                    ++c_path;
                }
            }
            // Event D.
            int sum[5] = {0, 0, 0, 0, 0};
            EdgeId eu = -1, ev = -1;
            for (EdgeId h = 0; h < g.edge_count(); ++h) {
                if (h == e || q[h] == 0) continue;
                sum[cat[h]] += q[h];
                if (cat[h] == kUNear) eu = h;
                if (cat[h] == kVNear) ev = h;
            }
            if (sum[kParallel] != 0 || sum[kUNear] != 1 || sum[kVNear] != 1 || sum[kCross] != 0) continue;
            VertexId pu = g.other_end(eu, u), pv = g.other_end(ev, v);
            int extra = 0;
            for (EdgeId h : g.incident(pu)) extra += h != eu ? q[h] : 0;
            for (EdgeId h : g.incident(pv)) extra += h != ev ? q[h] : 0;
            if (extra == 0) ++c_strong;
        }
        path_counts[block] = c_path;
        strong_counts[block] = c_strong;
    });
    PathEventEstimate est;
    est.trials = trials;
    est.count_path = std::accumulate(path_counts.begin(), path_counts.end(), std::int64_t{0});
    est.count_strong = std::accumulate(strong_counts.begin(), strong_counts.end(), std::int64_t{0});
    return est;
}

}  // namespace crs

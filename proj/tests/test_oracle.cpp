#include <algorithm>
#include <cmath>

#include "crs/oracle.hpp"
#include "crs/sampler.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace crs;

namespace {

double pois(double lambda, int k) { return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0)); }

// Middle edge of a three-edge path with outer weights a and middle weight eps,
// by direct summation: the middle survives subsampling with probability
// (1 - e^{-eps}) / eps and then carries PoissonGeq1(eps); the outer edges carry
// Poisson(a).
double path_middle_direct(double a, double eps, bool sum_formula) {
    const double keep = -std::expm1(-eps) / eps;
    double total = 0.0;
    for (int m = 1; m < 40; ++m) {
        const double pm = pois(eps, m) / -std::expm1(-eps);
        for (int l = 0; l < 40; ++l) {
            for (int r = 0; r < 40; ++r) {
                const double denom = sum_formula ? m + l + r : m + std::max(l, r);
                total += pm * pois(a, l) * pois(a, r) * m / denom;
            }
        }
    }
    return keep * total;
}

}  // namespace

TEST_CASE("single edge balancedness for every scheme") {
    Multigraph g(2, {{0, 1}});
    for (double x : {0.05, 0.5, 1.0}) {
        const double poisson = -std::expm1(-x) / x;
        for (SchemeKind kind : all_schemes()) {
            BalancednessReport rep = exact_balancedness(kind, g, {x});
            double expected = poisson;
            switch (kind) {
                case SchemeKind::RefIsolated: expected = 0.5; break;
                case SchemeKind::BipSimple:
                case SchemeKind::GenRandomOrder: expected = 1.0; break;
                case SchemeKind::RefBipartition: expected = poisson / 2; break;
                case SchemeKind::RefScaledTwoThirds: expected = poisson * 2 / 3; break;
                default: break;
            }
            INFO(scheme_name(kind), " x=", x);
            CHECK(rep.at(0) == doctest::Approx(expected).epsilon(1e-11));
            CHECK(rep.minimum == rep.at(0));
            CHECK(rep.argmin == 0);
        }
    }
}

TEST_CASE("random order on the three-edge path is exactly 37/100") {
    Multigraph p = fixtures::path(3);
    RationalVector x{Rational(9, 10), Rational(1, 10), Rational(9, 10)};
    RationalVector c = exact_balancedness_rational(SchemeKind::GenRandomOrder, p, x);
    CHECK(c[1] == Rational(37, 100));
    // Outer edges: alone, or against the middle one.
    CHECK(c[0] == Rational(9, 10) + Rational(1, 10) / 2);
    BalancednessReport rep = exact_balancedness(SchemeKind::GenRandomOrder, p, {0.9, 0.1, 0.9});
    CHECK(rep.at(1) == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("intensity schemes on the three-edge path against direct summation") {
    Multigraph p = fixtures::path(3);
    for (double eps : {0.001, 0.1, 0.4}) {
        const double a = 1 - eps;
        const double max_value = path_middle_direct(a, eps, false);
        const double sum_value = path_middle_direct(a, eps, true);
        for (SchemeKind kind : all_schemes()) {
            auto f = intensity_formula(kind);
            if (!f || kind == SchemeKind::RefBipartition || kind == SchemeKind::RefScaledTwoThirds) continue;
            BalancednessReport rep = exact_balancedness(kind, p, {a, eps, a});
            INFO(scheme_name(kind), " eps=", eps);
            const double expected = *f == Formula::Sum ? sum_value : max_value;
            CHECK(std::abs(rep.at(1) - expected) <= 1e-10 + rep.error_bound);
        }
    }
    // Near-integral outer edges drive the max formula to the first constant
    // and the sum formula to the second.
    CHECK(path_middle_direct(0.999, 0.001, false) == doctest::Approx(0.4762).epsilon(2e-3));
    CHECK(path_middle_direct(0.999, 0.001, true) == doctest::Approx(0.4323).epsilon(2e-3));
}

TEST_CASE("simple bipartite scheme on K22 by enumeration") {
    Multigraph k = fixtures::complete_bipartite(2, 2);
    RationalVector x(4, Rational(1, 2));
    RationalVector c = exact_balancedness_rational(SchemeKind::BipSimple, k, x);
    // Direct enumeration of the 16 rounding outcomes.
    std::vector<Rational> expect(4, 0);
    for (int mask = 0; mask < 16; ++mask) {
        for (EdgeId e = 0; e < 4; ++e) {
            if (!(mask >> e & 1)) continue;
            int du = 0, dv = 0;
            for (EdgeId h = 0; h < 4; ++h) {
                if (!(mask >> h & 1)) continue;
                du += k.edge(h).u == k.edge(e).u;
                dv += k.edge(h).v == k.edge(e).v;
            }
            expect[e] += Rational(1, 16) / std::max(du, dv);
        }
    }
    for (EdgeId e = 0; e < 4; ++e) CHECK(c[e] == expect[e] * 2);
    // Conditioned on e: y_e = 1 when both neighbours are absent, else 1/2.
    CHECK(c[0] == Rational(5, 8));
}

TEST_CASE("exact expected marginals of deterministic kinds match their formulas") {
    Multigraph g = fixtures::marginal_bip_graph();
    EdgeSet a = fixtures::marginal_bip_set();
    CHECK(exact_expected_marginals_rational(SchemeKind::BipSimple, g, a) == bip_simple_marginals_exact(g, a));
    Multigraph h = fixtures::marginal_gen_graph();
    EdgeSet b = fixtures::marginal_gen_set();
    RationalVector y = exact_expected_marginals_rational(SchemeKind::GenRandomOrder, h, b);
    const RationalVector drawn{0, Rational(1, 3), Rational(1, 4), Rational(1, 4), Rational(1, 5), Rational(1, 5),
                               Rational(1, 5), 0, Rational(1, 5), Rational(1, 5), Rational(1, 5)};
    CHECK(y == drawn);
}

TEST_CASE("isolated reference scheme expected marginals") {
    // Star with three leaves: an edge survives the coin and its two neighbours
    // must not, so E[y_e] = 1/8.
    Multigraph s = fixtures::star(3);
    RationalVector y = exact_expected_marginals_rational(SchemeKind::RefIsolated, s, {0, 1, 2});
    for (const Rational& v : y) CHECK(v == Rational(1, 8));
}

TEST_CASE("exact oracle caps") {
    Multigraph p = fixtures::path(13);
    FractionalPoint x(13, 0.5);
    CHECK_THROWS_AS(exact_balancedness(SchemeKind::BipPoisson, p, x), CapabilityError);
    EdgeSet all(13);
    for (int i = 0; i < 13; ++i) all[i] = i;
    CHECK_THROWS_AS(exact_expected_marginals(SchemeKind::BipPoisson, p, x, all), CapabilityError);
}

TEST_CASE("monotonicity of the schemes on small graphs") {
    const Multigraph bip = fixtures::complete_bipartite(2, 3);
    const Multigraph gen(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {1, 3}});
    for (SchemeKind kind : all_schemes()) {
        const Multigraph& g = requires_bipartite(kind) ? bip : gen;
        FractionalPoint x(g.edge_count(), 0.3);
        MonotonicityResult res = verify_monotonicity(kind, g, x, CheckMode::Exhaustive);
        INFO(scheme_name(kind));
        CHECK(res.pass);
        CHECK(res.checked > 0);
    }
}

TEST_CASE("monotonicity check finds a witness for an increasing oracle") {
    // y_e = |A| / 10 grows with A.
    MarginalOracle bad = [](const EdgeSet& a) {
        MarginalVector y(4, 0.0);
        for (EdgeId e : a) y[e] = a.size() / 10.0;
        return y;
    };
    MonotonicityResult res = verify_monotonicity(bad, {0, 1, 2, 3}, CheckMode::Exhaustive);
    CHECK_FALSE(res.pass);
    REQUIRE(res.witness);
    const auto& w = *res.witness;
    CHECK(std::includes(w.larger.begin(), w.larger.end(), w.smaller.begin(), w.smaller.end()));
    CHECK(std::find(w.smaller.begin(), w.smaller.end(), w.edge) != w.smaller.end());
    CHECK(w.smaller_value < w.larger_value);
    MonotonicityResult sampled = verify_monotonicity(bad, {0, 1, 2, 3}, CheckMode::Sampled, 200, 4);
    CHECK_FALSE(sampled.pass);
    EdgeSet eleven(11);
    for (int i = 0; i < 11; ++i) eleven[i] = i;
    CHECK_THROWS_AS(verify_monotonicity(bad, eleven, CheckMode::Exhaustive), CapabilityError);
}

TEST_CASE("stochastic dominance") {
    const TruncatedDistribution pois = truncated_poisson(1.0, 20);
    CHECK(pois.tail < 1e-15);
    const TruncatedDistribution zero = point_mass(0, 20);
    // max(Y, Z) dominates X.
    DominanceResult fwd = check_stochastic_dominance(zero, zero, pois);
    CHECK(fwd.pass);
    CHECK(fwd.worst_margin >= -1e-12);
    CHECK_FALSE(check_stochastic_dominance(zero, zero, pois, DominanceDirection::Reversed).pass);
    // Point masses: max(Y + 2, Z + 1) >= X + 2.
    const TruncatedDistribution two = point_mass(2, 20), one = point_mass(1, 20);
    CHECK(check_stochastic_dominance(two, one, pois).pass);
    for (int a = 0; a <= 3; ++a) {
        for (int b = 0; b <= 3; ++b) {
            CHECK(check_stochastic_dominance(point_mass(a, 20), point_mass(b, 20), pois).pass);
        }
    }
    CHECK(check_stochastic_dominance(truncated_poisson(0.7, 20), truncated_poisson(2.0, 20), pois).pass);
    CHECK_THROWS_AS(check_stochastic_dominance(point_mass(0, 10), zero, pois), InputError);
}

TEST_CASE("splitting an edge into parallel copies") {
    Multigraph p = fixtures::path(2);
    RationalVector x{Rational(3, 5), Rational(1, 5)};
    SplitResult<Rational> s = split_edge(p, x, 0, 3);
    CHECK(s.graph.edge_count() == 4);
    REQUIRE(s.siblings.size() == 3);
    CHECK(s.siblings[0] == 0);
    Rational total = 0;
    for (EdgeId h : s.siblings) {
        CHECK(s.x[h] == Rational(1, 5));
        CHECK(s.graph.pair_class(h) == s.graph.pair_class(0));
        total += s.x[h];
    }
    CHECK(total == Rational(3, 5));
    CHECK(s.x[1] == Rational(1, 5));
    CHECK(degree_load(s.graph, s.x, 1) == degree_load(p, x, 1));
    SplitResult<double> d = split_edge(p, FractionalPoint{0.6, 0.2}, 1, 2);
    CHECK(d.x[1] == doctest::Approx(0.1));
    CHECK_THROWS_AS(split_edge(p, x, 0, 0), InputError);
}

TEST_CASE("sibling lift law") {
    auto one = sibling_lift_law(Rational(3, 5), 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].probability == 1);
    auto three = sibling_lift_law(Rational(3, 5), 3);
    CHECK(three.size() == 7);
    Rational mass = 0;
    for (const auto& p : three) mass += p.probability;
    // (1 - (1 - 1/5)^3) / (3/5)
    CHECK(mass == Rational(61, 75));
    CHECK_THROWS_AS(sibling_lift_law(Rational(1, 2), 0), InputError);
    CHECK_THROWS_AS(sibling_lift_law(Rational(1, 2), 21), InputError);
}

TEST_CASE("sibling lift draws follow the renormalized law") {
    const double xe = 0.6;
    const int k = 3;
    const std::vector<EdgeId> siblings{0, 3, 4};
    std::vector<double> hist(8, 0.0);
    const int n = 300000;
    RngStream r(12, 0);
    for (int t = 0; t < n; ++t) {
        EdgeSet lifted = sibling_lift({0, 1}, siblings, xe, r);
        CHECK(std::find(lifted.begin(), lifted.end(), 1) != lifted.end());
        int mask = 0;
        for (int i = 0; i < k; ++i) {
            if (std::find(lifted.begin(), lifted.end(), siblings[i]) != lifted.end()) mask |= 1 << i;
        }
        CHECK(mask != 0);
        hist[mask] += 1;
    }
    auto law = sibling_lift_law(decimal_rational(xe), k);
    Rational mass = 0;
    for (const auto& p : law) mass += p.probability;
    for (const auto& p : law) {
        const double q = to_double(p.probability / mass);
        CHECK(fixtures::within_sigma(hist[p.mask] / n, q, q * (1 - q), n, 4.0));
    }
    CHECK_THROWS_AS(sibling_lift({1, 2}, siblings, xe, r), InputError);
}

TEST_CASE("greedy partition") {
    // u = 0, v = 1, ten pendants of 0.099 on each side.
    std::vector<Edge> edges{{0, 1}};
    FractionalPoint x{0.01};
    for (int i = 0; i < 10; ++i) {
        edges.push_back({0, 2 + i});
        x.push_back(0.099);
        edges.push_back({1, 12 + i});
        x.push_back(0.099);
    }
    Multigraph g(22, edges);
    Partition p = greedy_partition(g, x, 0);
    CHECK(p.near_u.size() + p.near_v.size() == 20);
    double load_u = 0.0, load_v = 0.0;
    for (VertexId w : p.near_u) {
        for (EdgeId h : g.edges_between(0, w)) load_u += x[h];
    }
    for (VertexId w : p.near_v) {
        for (EdgeId h : g.edges_between(1, w)) load_v += x[h];
    }
    CHECK(load_u >= 0.33 - 1e-12);
    CHECK(load_v >= 0.33 - 1e-12);

    FractionalPoint heavy = x;
    heavy[0] = 0.5;
    CHECK_THROWS_WITH_AS(greedy_partition(g, heavy, 0), doctest::Contains("x(E_uv) <= 0.01"), InputError);
    FractionalPoint light = x;
    light[1] = 0.0;
    CHECK_THROWS_WITH_AS(greedy_partition(g, light, 0), doctest::Contains("x(delta(u) - E_uv) >= 0.99"), InputError);
}

TEST_CASE("path events on a tight instance") {
    // e = uv with two triangles hanging off it, all loads tight.
    // u=0 v=1 w=2 a=3 b=4 c=5 d=6 z=7 f=8
    Multigraph g(9, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {3, 4}, {1, 5}, {1, 6}, {5, 6}, {2, 7}, {3, 8}, {4, 8}});
    FractionalPoint x{0.01, 0.33, 0.33, 0.33, 0.33, 0.3, 0.33, 0.33, 0.3, 0.34, 0.3, 0.3};
    PathEventEstimate est = path_event_probability(g, x, 0, 200000, 3);
    CHECK(est.count_strong <= est.count_path);
    CHECK(est.count_strong > 0);
    PathEventEstimate again = path_event_probability(g, x, 0, 200000, 3, 2);
    CHECK(again.count_path == est.count_path);
    CHECK(again.count_strong == est.count_strong);
}

TEST_CASE("Monte Carlo balancedness agrees with the exact oracle") {
    Multigraph g(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}});
    FractionalPoint x{0.3, 0.3, 0.3, 0.6, 0.4};
    for (SchemeKind kind : {SchemeKind::GenPoisson, SchemeKind::Mixed, SchemeKind::GenRandomOrder}) {
        BalancednessReport exact = exact_balancedness(kind, g, x);
        CHECK(exact.mode == BalancednessReport::Mode::Exact);
        MarginalVector sum(g.edge_count(), 0.0);
        const int n = 100000;
        for (int t = 0; t < n; ++t) {
            RngStream r = trial_stream(21, t, 0);
            MarginalVector y = rounded_marginals(kind, g, x, r);
            for (EdgeId e = 0; e < g.edge_count(); ++e) sum[e] += y[e];
        }
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            INFO(scheme_name(kind), " edge ", e);
            const double c = sum[e] / n / x[e];
            // Var(y_e / x_e) <= 1 / x_e.
            CHECK(std::abs(c - exact.at(e)) <= 4.0 / std::sqrt(x[e] * n));
        }
    }
}

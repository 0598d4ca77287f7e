#include <algorithm>
#include <cmath>
#include <limits>

#include "crs/oracle.hpp"
#include "crs/sampler.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace crs;

namespace {

void check_combination(const Multigraph& g, const RationalVector& y, const ConvexCombination& c) {
    CHECK(c.total_weight() == 1);
    CHECK(c.reconstruct(g.edge_count()) == y);
    int supp = 0;
    for (const Rational& v : y) supp += v > 0;
    CHECK(static_cast<int>(c.terms.size()) <= supp + 1);
    for (const auto& t : c.terms) {
        CHECK(t.weight > 0);
        CHECK(is_matching(g, t.matching));
        for (EdgeId e : t.matching) CHECK(y[e] > 0);
    }
}

std::vector<double> frequencies(const Multigraph& g, int n, const std::function<Matching(RngStream&)>& draw) {
    std::vector<double> f(g.edge_count(), 0.0);
    for (int t = 0; t < n; ++t) {
        RngStream r = trial_stream(99, t, 0);
        for (EdgeId e : draw(r)) f[e] += 1.0;
    }
    for (double& v : f) v /= n;
    return f;
}

}  // namespace

TEST_CASE("decomposing an integral point") {
    Multigraph p = fixtures::path(3);
    RationalVector y{1, 0, 1};
    ConvexCombination c = birkhoff_decompose(p, y);
    REQUIRE(c.terms.size() == 1);
    CHECK(c.terms[0].weight == 1);
    CHECK(c.terms[0].matching == Matching{0, 2});
}

TEST_CASE("decomposing half-half on a path") {
    Multigraph p = fixtures::path(2);
    RationalVector y{Rational(1, 2), Rational(1, 2)};
    ConvexCombination c = birkhoff_decompose(p, y);
    check_combination(p, y, c);
    CHECK(c.terms.size() == 2);
    for (const auto& t : c.terms) {
        CHECK(t.weight == Rational(1, 2));
        CHECK(t.matching.size() == 1);
    }
}

TEST_CASE("decomposing the bipartite illustration") {
    Multigraph g = fixtures::marginal_bip_graph();
    RationalVector y = bip_simple_marginals_exact(g, fixtures::marginal_bip_set());
    // The drawn decomposition into three matchings of weight 1/3.
    ConvexCombination drawn;
    drawn.terms = {{Rational(1, 3), {1, 7, 9}}, {Rational(1, 3), {2, 4, 6, 9}}, {Rational(1, 3), {0, 5, 9}}};
    check_combination(g, y, drawn);
    ConvexCombination c = birkhoff_decompose(g, y);
    check_combination(g, y, c);
}

TEST_CASE("decomposition of random bipartite points") {
    RngStream r(17, 0);
    for (int rep = 0; rep < 200; ++rep) {
        Multigraph g = fixtures::complete_bipartite(1 + static_cast<int>(r.below(4)), 1 + static_cast<int>(r.below(4)));
        RationalVector y(g.edge_count());
        for (Rational& v : y) v = Rational(static_cast<long long>(r.below(5)), 12);
        Rational worst = 0;
        for (VertexId v = 0; v < g.vertex_count(); ++v) worst = std::max(worst, degree_load(g, y, v));
        if (worst > 1) {
            for (Rational& v : y) v /= worst;
        }
        check_combination(g, y, birkhoff_decompose(g, y));
    }
}

TEST_CASE("decomposition input checks") {
    Multigraph s = fixtures::star(2);
    CHECK_THROWS_AS(birkhoff_decompose(s, RationalVector{Rational(3, 4), Rational(1, 2)}), InputError);
    CHECK_THROWS_AS(birkhoff_decompose(s, RationalVector{Rational(-1, 4), Rational(1, 2)}), InputError);
    CHECK_THROWS_AS(birkhoff_decompose(fixtures::triangle(), RationalVector(3, Rational(1, 3))), InputError);
    // Floating input within tolerance above the polytope is rescaled.
    ConvexCombination c = birkhoff_decompose(s, MarginalVector{0.5 + 1e-10, 0.5});
    CHECK(c.total_weight() == 1);
    CHECK_THROWS_AS(birkhoff_decompose(s, MarginalVector{0.6, 0.5}), InputError);
}

TEST_CASE("general small decomposition") {
    Multigraph t = fixtures::triangle();
    RationalVector y(3, Rational(1, 3));
    check_combination(t, y, matching_polytope_decompose(t, y));
    Multigraph k4 = fixtures::complete(4);
    RationalVector z(6, Rational(1, 3));
    check_combination(k4, z, matching_polytope_decompose(k4, z));
    CHECK_THROWS_AS(matching_polytope_decompose(t, RationalVector(3, Rational(1, 2))), InputError);
}

TEST_CASE("pick follows cumulative weights") {
    ConvexCombination c;
    c.terms = {{Rational(1, 4), {0}}, {Rational(3, 4), {1}}};
    CHECK(pick(c, 0.0) == Matching{0});
    CHECK(pick(c, 0.2499) == Matching{0});
    CHECK(pick(c, 0.25) == Matching{1});
    CHECK(pick(c, 0.9999) == Matching{1});
}

TEST_CASE("clock matching ties and infinities") {
    Multigraph t = fixtures::triangle();
    CHECK(clock_matching(t, {1.0, 1.0, 1.0}) == Matching{0});
    CHECK(clock_matching(t, {2.0, 1.0, 1.0}) == Matching{1});
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(clock_matching(t, {inf, inf, inf}).empty());
    Multigraph p = fixtures::path(3);
    CHECK(clock_matching(p, {1.0, 2.0, 1.0}) == Matching{0, 2});
}

TEST_CASE("exponential clocks") {
    Multigraph t = fixtures::triangle();
    RngStream r(1, 1);
    CHECK(exp_clock_matching(t, {0.0, 2.0, 0.0}, r) == Matching{1});
    CHECK(exp_clock_matching(t, {0.0, 0.0, 0.0}, r).empty());
    const int n = 300000;
    auto f = frequencies(t, n, [&](RngStream& s) { return exp_clock_matching(t, {1.0, 1.0, 1.0}, s); });
    for (double v : f) CHECK(fixtures::within_sigma(v, 1.0 / 3, 2.0 / 9, n));
}

TEST_CASE("exponential clock marginals equal w_e over the closed neighbourhood") {
    Multigraph g(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {1, 3}, {0, 1}});
    const std::vector<double> w{1, 2, 3, 1, 2, 1, 2};
    const int n = 1000000;
    auto f = frequencies(g, n, [&](RngStream& s) { return exp_clock_matching(g, w, s); });
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        double total = 0.0;
        for (EdgeId h = 0; h < g.edge_count(); ++h) {
            if (h == e || g.share_endpoint(e, h)) total += w[h];
        }
        const double z = w[e] / total;
        CHECK(fixtures::within_sigma(f[e], z, z * (1 - z), n));
    }
}

TEST_CASE("random order matching") {
    Multigraph g = fixtures::marginal_gen_graph();
    RngStream r(2, 2);
    CHECK(random_order_matching(g, {}, r).empty());
    CHECK(random_order_matching(g, {4}, r) == Matching{4});
    const int n = 300000;
    const EdgeSet a = fixtures::marginal_gen_set();
    auto f = frequencies(g, n, [&](RngStream& s) { return random_order_matching(g, a, s); });
    RationalVector y = gen_random_order_marginals_exact(g, a);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const double p = to_double(y[e]);
        CHECK(fixtures::within_sigma(f[e], p, p * (1 - p), n));
    }
}

TEST_CASE("resolve returns matchings inside the input set") {
    const Multigraph bip = fixtures::complete_bipartite(2, 3);
    const Multigraph gen(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}, {0, 1}});
    for (SchemeKind kind : all_schemes()) {
        const Multigraph& g = requires_bipartite(kind) ? bip : gen;
        FractionalPoint x(g.edge_count(), 0.2);
        for (int t = 0; t < 300; ++t) {
            RngStream r(t, 1);
            EdgeSet a = independent_round(x, r);
            Matching m = resolve(kind, g, x, a, r);
            CHECK(is_matching(g, m));
            CHECK(std::includes(a.begin(), a.end(), m.begin(), m.end()));
        }
    }
}

TEST_CASE("resolve with an integral marginal vector") {
    Multigraph p = fixtures::path(3);
    FractionalPoint x{0.5, 0.5, 0.5};
    RngStream r(3, 3);
    for (int t = 0; t < 50; ++t) CHECK(resolve(SchemeKind::BipSimple, p, x, {0, 2}, r) == Matching{0, 2});
}

TEST_CASE("resolve frequencies match exact expected marginals") {
    const Multigraph bip(6, {{0, 3}, {0, 4}, {1, 3}, {1, 4}, {2, 4}, {2, 5}, {0, 3}});
    const Multigraph gen(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {1, 3}});
    const int n = 100000;
    for (SchemeKind kind : all_schemes()) {
        const Multigraph& g = requires_bipartite(kind) ? bip : gen;
        FractionalPoint x(g.edge_count());
        for (EdgeId e = 0; e < g.edge_count(); ++e) x[e] = 0.15 + 0.05 * (e % 3);
        EdgeSet a(g.edge_count());
        for (EdgeId e = 0; e < g.edge_count(); ++e) a[e] = e;
        MarginalVector exact = exact_expected_marginals(kind, g, x, a);
        auto f = frequencies(g, n, [&](RngStream& s) { return resolve(kind, g, x, a, s); });
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            INFO(scheme_name(kind), " edge ", e);
            CHECK(fixtures::within_sigma(f[e], exact[e], exact[e] * (1 - exact[e]), n, 3.5));
        }
    }
}

TEST_CASE("scheme intersection") {
    Multigraph g = fixtures::complete_bipartite(2, 2);
    FractionalPoint x(4, 0.4);
    std::vector<SchemeContext> one{{SchemeKind::BipPoisson, &g}};
    std::vector<SchemeContext> two{{SchemeKind::BipPoisson, &g}, {SchemeKind::BipPoisson, &g}};
    for (int t = 0; t < 200; ++t) {
        RngStream r1(t, 0), r2(t, 0);
        EdgeSet a = independent_round(x, r1);
        r2 = r1;
        CHECK(intersect_schemes(one, x, a, r1, true) == intersect_schemes(two, x, a, r2, true));
    }
    std::vector<SchemeContext> mixed{{SchemeKind::BipPoisson, &g}, {SchemeKind::GenRandomOrder, &g}};
    for (int t = 0; t < 200; ++t) {
        RngStream r(t, 5);
        EdgeSet a = independent_round(x, r);
        RngStream probe = r;
        const std::uint64_t base = probe.next_u64();
        Matching both = intersect_schemes(mixed, x, a, r);
        RngStream s1(r.seed(), stream_key(base, 1)), s2(r.seed(), stream_key(base, 2));
        Matching m1 = resolve(SchemeKind::BipPoisson, g, x, a, s1);
        Matching m2 = resolve(SchemeKind::GenRandomOrder, g, x, a, s2);
        CHECK(std::includes(m1.begin(), m1.end(), both.begin(), both.end()));
        CHECK(std::includes(m2.begin(), m2.end(), both.begin(), both.end()));
    }
    RngStream r(1, 1);
    CHECK_THROWS_AS(intersect_schemes({}, x, {}, r), InputError);
}

TEST_CASE("intersection balancedness multiplies on a product instance") {
    // Two disjoint single edges; each scheme is a fair coin on its own edge, so
    // the product structure makes the retention rates multiply.
    Multigraph g(2, {{0, 1}});
    FractionalPoint x{1.0};
    std::vector<SchemeContext> pair{{SchemeKind::RefIsolated, &g}, {SchemeKind::RefIsolated, &g}};
    const int n = 200000;
    int kept = 0;
    for (int t = 0; t < n; ++t) {
        RngStream r = trial_stream(8, t, 0);
        kept += !intersect_schemes(pair, x, {0}, r).empty();
    }
    CHECK(fixtures::within_sigma(kept / double(n), 0.25, 0.25 * 0.75, n));
}

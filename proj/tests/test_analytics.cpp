#include <cmath>

#include "crs/analytics.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace crs;

namespace {

double pois(double lambda, int k) { return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0)); }

// Plain double sum for the max constant.
double beta_direct(double b) {
    double total = 0.0;
    for (int i = 0; i < 60; ++i) {
        for (int j = 0; j < 60; ++j) total += pois(b, i) * pois(b, j) / (1.0 + std::max(i, j));
    }
    return total;
}

}  // namespace

TEST_CASE("balancedness constants") {
    CHECK(beta(1.0) == doctest::Approx(0.4762223882).epsilon(1e-9));
    CHECK(beta(0.5) == doctest::Approx(0.65266).epsilon(1e-5));
    CHECK(crs::gamma(1.0) == doctest::Approx(0.4323323584).epsilon(1e-9));
    CHECK(crs::gamma(0.0) == 1.0);
    CHECK(beta(0.0) == 1.0);
    for (double b : {0.1, 0.3, 0.7, 1.0}) {
        CHECK(beta(b) == doctest::Approx(beta_direct(b)).epsilon(1e-12));
        CHECK(gamma_series(b) == doctest::Approx(crs::gamma(b)).epsilon(1e-12));
        CHECK(beta(b) > crs::gamma(b));
    }
    CHECK(beta(1.0) > 1 - 1.5 / std::exp(1.0));
    CHECK_THROWS_AS(beta(1.5), ParameterError);
    CHECK_THROWS_AS(crs::gamma(-0.1), ParameterError);
}

TEST_CASE("instance spec grammar") {
    CHECK(std::holds_alternative<KnnSpec>(parse_instance_spec("knn:20,1")));
    auto f = std::get<HeavyStarSpec>(parse_instance_spec("fig5:0.01,100"));
    CHECK(f.eps == 0.01);
    CHECK(f.k == 100);
    auto r = std::get<RandomGeneralSpec>(parse_instance_spec("randgen:8,0.5,1,7"));
    CHECK(r.seed == 7);
    CHECK(std::get<FileSpec>(parse_instance_spec("file:a/b.json")).path == "a/b.json");
    for (const char* text : {"knn:20,1", "fig5:0.01,100", "path3:0.001", "randbip:5,0.5,1,3", "randgen:6,0.4,0.5,2"}) {
        CHECK(instance_spec_string(parse_instance_spec(text)) == text);
    }
    for (const char* bad : {"knn", "knn:20", "knn:a,1", "zzz:1", "fig5:0.01,1,2", "path3:", "file:"}) {
        CHECK_THROWS_AS(parse_instance_spec(bad), InputError);
    }
}

TEST_CASE("generated instances") {
    Instance k = generate_instance(KnnSpec{3, 1.0});
    CHECK(k.graph.edge_count() == 9);
    CHECK(k.graph.is_bipartite());
    for (VertexId v = 0; v < 6; ++v) CHECK(degree_load(k.graph, k.x, v) == doctest::Approx(1.0));
    REQUIRE(k.exact_x);
    CHECK((*k.exact_x)[0] == Rational(1, 3));

    Instance f = generate_instance(HeavyStarSpec{0.01, 100});
    CHECK(f.focus == 0);
    CHECK(f.graph.edge_count() == 102);
    CHECK(degree_load(f.graph, f.x, 0) == doctest::Approx(1.0));
    CHECK(degree_load(f.graph, f.x, 1) == doctest::Approx(1.0));
    CHECK(degree_load(f.graph, *f.exact_x, 1) == 1);

    Instance p = generate_instance(Path3Spec{0.001});
    CHECK(p.focus == 1);
    CHECK(p.x[1] == 0.001);
    CHECK((*p.exact_x)[0] == Rational(999, 1000));

    for (std::uint64_t seed : {1, 2, 3}) {
        Instance b = generate_instance(RandomBipartiteSpec{6, 0.5, 1.0, seed});
        CHECK(b.graph.is_bipartite());
        CHECK(in_degree_polytope(b.graph, b.x, 1.0 + 1e-12));
        Instance g = generate_instance(RandomGeneralSpec{7, 0.6, 1.0, seed});
        CHECK(in_degree_polytope(g.graph, g.x, 1.0 + 1e-12));
        CHECK(in_matching_polytope_exact(g.graph, g.x, 1.0 + 1e-9));
        Instance again = generate_instance(RandomGeneralSpec{7, 0.6, 1.0, seed});
        CHECK(again.x == g.x);
    }
    CHECK_THROWS_AS(generate_instance(KnnSpec{0, 1.0}), InputError);
    CHECK_THROWS_AS(generate_instance(Path3Spec{1.5}), InputError);
}

TEST_CASE("estimates agree with the exact oracle") {
    Instance inst = generate_instance(Path3Spec{0.1});
    EstimateOptions opt;
    opt.trials = 200000;
    opt.seed = 5;
    for (SchemeKind kind : all_schemes()) {
        BalancednessReport exact = exact_balancedness(kind, inst.graph, inst.x);
        BalancednessReport mc = estimate_balancedness(kind, inst, opt);
        CHECK(mc.mode == BalancednessReport::Mode::MonteCarlo);
        CHECK(mc.trials == opt.trials);
        for (EdgeId e : mc.edges) {
            INFO(scheme_name(kind), " edge ", e);
            CHECK(std::abs(mc.at(e) - exact.at(e)) <= 4 * mc.std_error_at(e) + 1e-9 + exact.error_bound);
            CHECK(mc.std_error_at(e) > 0.0);
        }
    }
}

TEST_CASE("estimates on a general graph and an odd cycle") {
    Multigraph g(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {1, 3}});
    Instance inst{g, {0.3, 0.3, 0.3, 0.3, 0.5, 0.3}, std::nullopt, std::nullopt, "small", -1};
    EstimateOptions opt;
    opt.trials = 100000;
    for (SchemeKind kind : {SchemeKind::GenPoisson, SchemeKind::GenPoissonMerged, SchemeKind::Mixed,
                            SchemeKind::MixedMerged, SchemeKind::GenRandomOrder, SchemeKind::RefScaledTwoThirds,
                            SchemeKind::RefIsolated}) {
        BalancednessReport exact = exact_balancedness(kind, inst.graph, inst.x);
        BalancednessReport mc = estimate_balancedness(kind, inst, opt);
        for (EdgeId e : mc.edges) {
            INFO(scheme_name(kind), " edge ", e);
            CHECK(std::abs(mc.at(e) - exact.at(e)) <= 4 * mc.std_error_at(e) + 1e-9 + exact.error_bound);
        }
    }
}

TEST_CASE("estimates do not depend on the thread count") {
    Instance inst = generate_instance(KnnSpec{4, 1.0});
    EstimateOptions one;
    one.trials = 20000;
    one.seed = 9;
    EstimateOptions many = one;
    many.jobs = 3;
    BalancednessReport a = estimate_balancedness(SchemeKind::BipPoisson, inst, one);
    BalancednessReport b = estimate_balancedness(SchemeKind::BipPoisson, inst, many);
    CHECK(a.value == b.value);
    CHECK(a.minimum == b.minimum);
    EstimateOptions other = one;
    other.seed = 10;
    CHECK(estimate_balancedness(SchemeKind::BipPoisson, inst, other).value != a.value);
}

TEST_CASE("estimate options") {
    Instance inst = generate_instance(Path3Spec{0.1});
    EstimateOptions opt;
    opt.trials = 999;
    CHECK_THROWS_AS(estimate_balancedness(SchemeKind::BipPoisson, inst, opt), InputError);
    opt.trials = 1000;
    opt.edges = {1};
    BalancednessReport rep = estimate_balancedness(SchemeKind::BipPoisson, inst, opt);
    CHECK(rep.edges == std::vector<EdgeId>{1});
    CHECK(rep.argmin == 1);
    CHECK(rep.half_width[0] == doctest::Approx(2.5758 * rep.std_error[0]).epsilon(1e-3));
    Instance odd{fixtures::triangle(), {0.3, 0.3, 0.3}, std::nullopt, std::nullopt, "tri", -1};
    opt.edges.clear();
    CHECK_THROWS_AS(estimate_balancedness(SchemeKind::BipPoisson, odd, opt), CapabilityError);
}

TEST_CASE("optimality limit") {
    // B1, B2 ~ Binomial(1, 1/2): 1/4 * 1 + 3/4 * 1/2.
    CHECK(optimality_limit_exact(2, 1.0) == doctest::Approx(0.625).epsilon(1e-15));
    LimitResult small = optimality_limit(2, 1.0, 1000, 1);
    CHECK(small.exact);
    CHECK(small.value == doctest::Approx(0.625));
    // The limit decreases towards the Poisson constant.
    CHECK(optimality_limit_exact(12, 1.0) > beta(1.0));
    CHECK(optimality_limit_exact(12, 1.0) < optimality_limit_exact(6, 1.0));
    LimitResult mc = optimality_limit(13, 1.0, 400000, 3);
    CHECK_FALSE(mc.exact);
    CHECK(std::abs(mc.value - optimality_limit_exact(13, 1.0)) <= 4 * mc.std_error);
    CHECK_THROWS_AS(optimality_limit_exact(1, 1.0), InputError);
}

#include "crs/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crs/oracle.hpp"
#include "crs/random.hpp"
#include "crs/sampler.hpp"

namespace crs {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

bool applies(SchemeKind kind, const Instance& inst, bool in_matching) {
    if (requires_bipartite(kind) && !inst.graph.is_bipartite()) return false;
    if (kind == SchemeKind::RefIsolated) return in_degree_polytope(inst.graph, inst.x, 1.0);
    return in_matching;
}

}  // namespace

std::vector<CheckRecord> verify_instance(const Instance& inst, const VerifyOptions& opt) {
    const Multigraph& g = inst.graph;
    const FractionalPoint& x = inst.x;
    validate_point(g, x);
    std::vector<CheckRecord> out;
    const bool small = g.vertex_count() <= kOddSetVertexCap;
    const bool in_degree = in_degree_polytope(g, x, 1.0);
    bool in_matching = in_degree;
    if (small) {
        in_matching = in_matching_polytope_exact(g, x, 1.0);
        out.push_back({"matching_implies_degree", "", !in_matching || in_degree, ""});
        if (g.is_bipartite()) {
            out.push_back({"bipartite_predicates_agree", "", in_matching == in_degree, ""});
        }
        FractionalPoint scaled = x;
        for (double& v : scaled) v *= 2.0 / 3.0;
        out.push_back({"two_thirds_scaling", "", !in_degree || in_matching_polytope_exact(g, scaled, 1.0), ""});
    }
    out.push_back({"point_in_polytope", "", in_matching,
                   small ? "degree and odd-set constraints" : "degree constraints only"});

    const EdgeSet supp = support(x);
    const int n_supp = static_cast<int>(supp.size());
    for (SchemeKind kind : all_schemes()) {
        const std::string name = scheme_name(kind);
        if (!applies(kind, inst, in_matching)) continue;

        // Per-draw contracts.
        bool cr1_cr2 = true, matching_ok = true;
        std::string why;
        for (std::int64_t t = 0; t < opt.draws; ++t) {
            RngStream r = trial_stream(opt.seed, t, 0);
            EdgeSet a = independent_round(x, r);
            MarginalVector y = scheme_marginals(kind, g, x, a, r);
            std::vector<char> in_a = edge_mask(g, a);
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                if (y[e] != 0.0 && !in_a[e]) cr1_cr2 = false;
            }
            bool feasible = requires_bipartite(kind) || !small ? in_degree_polytope(g, y, 1.0)
                                                               : in_matching_polytope_exact(g, y, 1.0);
            if (!feasible) cr1_cr2 = false;
            Matching m = resolve(kind, g, x, a, r);
            if (!is_matching(g, m) || !std::includes(a.begin(), a.end(), m.begin(), m.end())) matching_ok = false;
        }
        out.push_back({"marginal_contract", name, cr1_cr2, std::to_string(opt.draws) + " draws"});
        out.push_back({"resolve_contract", name, matching_ok, std::to_string(opt.draws) + " draws"});

        if (n_supp <= std::min(opt.max_edges, kExactSetCap)) {
            BalancednessReport exact = exact_balancedness(kind, g, x);
            EstimateOptions eo;
            eo.trials = opt.trials;
            eo.seed = opt.seed;
            eo.jobs = opt.jobs;
            BalancednessReport mc = estimate_balancedness(kind, inst, eo);
            bool agree = true;
            double worst = 0.0;
            for (std::size_t i = 0; i < exact.edges.size(); ++i) {
                const double sigma = mc.std_error_at(exact.edges[i]);
                const double diff = std::abs(exact.value[i] - mc.at(exact.edges[i]));
                const double allowed = std::max(3.0 * sigma, 1e-9) + exact.error_bound;
                worst = std::max(worst, diff / allowed);
                if (diff > allowed) agree = false;
            }
            out.push_back({"exact_vs_monte_carlo", name, agree, "worst |diff|/allowed = " + num(worst)});
            out.push_back({"exact_minimum", name, true, num(exact.minimum)});
            if (kind == SchemeKind::BipSimple) {
                out.push_back({"jensen_floor_one_third", name, exact.minimum >= 1.0 / 3.0 - 1e-12, num(exact.minimum)});
            }
            if (kind == SchemeKind::RefIsolated) {
                out.push_back({"isolated_floor_one_eighth", name, exact.minimum >= 0.125 - 1e-12, num(exact.minimum)});
            }
        }
        if (n_supp <= kMonotonicityCap && n_supp <= kExactSetCap) {
            MonotonicityResult mono = verify_monotonicity(kind, g, x, CheckMode::Exhaustive);
            std::string detail = std::to_string(mono.checked) + " comparisons";
            if (mono.witness) detail = "edge " + std::to_string(mono.witness->edge) + " rises";
            out.push_back({"monotonicity", name, mono.pass, detail});
        }
    }
    return out;
}

}  // namespace crs

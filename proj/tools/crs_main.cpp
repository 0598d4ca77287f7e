#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "crs/analytics.hpp"
#include "crs/csfm.hpp"
#include "crs/instance_io.hpp"
#include "crs/oracle.hpp"
#include "crs/sampler.hpp"
#include "crs/verify.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitCapability = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CRS_DEFAULT_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) return v;
        throw crs::InputError("CRS_DEFAULT_SEED must be a nonnegative integer");
    }
    return 1;
}

// Writes to the named file, or stdout when the name is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw crs::InputError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string command_echo(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) s += ' ';
        s += argv[i];
    }
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contention resolution schemes for matching polytopes"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string scheme_text, instance_text, out_path, format = "json", graph_path, marginals_path;
    std::string function_text = "coverage";
    std::int64_t trials = 100000, samples = 200;
    std::optional<std::uint64_t> seed;
    int jobs = 1, max_edges = 8, n = 0, steps = 20;
    double b = 1.0;
    bool exact = false, series = false;
    std::vector<int> edge_filter;

    auto* estimate = app.add_subcommand("estimate", "Balancedness of a scheme on an instance");
    estimate->add_option("--scheme", scheme_text, "ex1.4 ex2.2 alg1 alg2 ex4.1 alg3 alg4 alg5 alg6 ref-bipartition ref-2of3")
        ->required();
    estimate->add_option("--instance", instance_text, "knn:n,b fig5:eps,k path3:eps randbip:n,d,b,seed randgen:n,d,b,seed file:PATH")
        ->required();
    estimate->add_option("--trials", trials, "Monte Carlo trials (>= 1000)");
    estimate->add_option("--seed", seed, "Seed (default: CRS_DEFAULT_SEED or 1)");
    estimate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    estimate->add_option("--edge", edge_filter, "Report only these edges");
    estimate->add_flag("--exact", exact, "Exact enumeration instead of Monte Carlo");
    estimate->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    estimate->add_option("--out", out_path, "Output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Invariant battery on one instance");
    verify->add_option("--graph", graph_path, "Instance JSON file");
    verify->add_option("--instance", instance_text, "Instance spec (alternative to --graph)");
    verify->add_option("--max-edges", max_edges, "Largest support for exact comparisons");
    verify->add_option("--trials", trials, "Monte Carlo trials per comparison");
    verify->add_option("--seed", seed, "Seed");
    verify->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--out", out_path, "CSV output file (default stdout)");

    auto* beta_cmd = app.add_subcommand("beta", "Bipartite constant beta(b)");
    beta_cmd->add_option("--b", b, "b in [0, 1]")->required();
    auto* gamma_cmd = app.add_subcommand("gamma", "General constant gamma(b)");
    gamma_cmd->add_option("--b", b, "b in [0, 1]")->required();
    gamma_cmd->add_flag("--series", series, "Evaluate the series instead of the closed form");

    auto* limit = app.add_subcommand("limit", "Upper-bound expression on K_{n,n}");
    limit->add_option("--n", n, "n >= 2")->required();
    limit->add_option("--b", b, "b in [0, 1]");
    limit->add_option("--trials", trials, "Monte Carlo trials (n > 12)");
    limit->add_option("--seed", seed, "Seed");
    limit->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    limit->add_option("--out", out_path, "Output file (default stdout)");

    auto* decompose = app.add_subcommand("decompose", "Convex combination of matchings for a marginal vector");
    decompose->add_option("--graph", graph_path, "Instance JSON file")->required();
    decompose->add_option("--marginals", marginals_path, "Marginal JSON file")->required();
    decompose->add_option("--out", out_path, "CSV output file (default stdout)");

    auto* pipeline = app.add_subcommand("pipeline", "Continuous greedy, then rounding through a scheme");
    pipeline->add_option("--function", function_text, "modular or coverage")
        ->check(CLI::IsMember({"modular", "coverage"}));
    pipeline->add_option("--instance", instance_text, "Instance spec whose graph is used")->required();
    pipeline->add_option("--scheme", scheme_text, "Scheme used for rounding")->required();
    pipeline->add_option("--b", b, "Polytope scale b in (0, 1]");
    pipeline->add_option("--steps", steps, "Continuous greedy steps (>= 10)");
    pipeline->add_option("--samples", samples, "Gradient samples per step");
    pipeline->add_option("--trials", trials, "Rounding trials");
    pipeline->add_option("--seed", seed, "Seed");
    pipeline->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    pipeline->add_option("--out", out_path, "Output file (default stdout)");

    auto* generate = app.add_subcommand("generate", "Write an instance as JSON");
    generate->add_option("--instance", instance_text, "Instance spec")->required();
    generate->add_option("--out", out_path, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const std::uint64_t run_seed = seed ? *seed : default_seed();
        std::cout << std::setprecision(10);

        if (*estimate) {
            const crs::SchemeKind kind = crs::parse_scheme(scheme_text);
            const crs::InstanceSpec spec = crs::parse_instance_spec(instance_text);
            const crs::Instance inst = crs::generate_instance(spec);
            crs::BalancednessReport rep;
            if (exact) {
                rep = crs::exact_balancedness(kind, inst.graph, inst.x);
                if (!edge_filter.empty()) {
                    crs::BalancednessReport cut = rep;
                    cut.edges.clear();
                    cut.value.clear();
                    for (int e : crs::normalize_edge_set(edge_filter)) {
                        cut.edges.push_back(e);
                        cut.value.push_back(rep.at(e));
                    }
                    cut.std_error.clear();
                    cut.finish();
                    rep = cut;
                }
            } else {
                crs::EstimateOptions opt;
                opt.trials = trials;
                opt.seed = run_seed;
                opt.jobs = jobs;
                opt.edges = edge_filter;
                rep = crs::estimate_balancedness(kind, inst, opt);
            }
            Output out(out_path);
            std::ostream& os = out.stream();
            const std::string mode = exact ? "exact" : "monte-carlo";
            if (format == "csv") {
                os << "scheme,instance,edge,mean,ci_low,ci_high,trials,seed,mode\n";
                for (std::size_t i = 0; i < rep.edges.size(); ++i) {
                    os << crs::scheme_name(kind) << ',' << inst.name << ',' << rep.edges[i] << ','
                       << csv_number(rep.value[i]) << ',' << csv_number(rep.value[i] - rep.half_width[i]) << ','
                       << csv_number(rep.value[i] + rep.half_width[i]) << ',' << rep.trials << ',' << run_seed
                       << ',' << mode << '\n';
                }
            } else {
                for (std::size_t i = 0; i < rep.edges.size(); ++i) {
                    json rec{{"scheme", crs::scheme_name(kind)},
                             {"instance", inst.name},
                             {"edge", rep.edges[i]},
                             {"mean", rep.value[i]},
                             {"ci", {rep.value[i] - rep.half_width[i], rep.value[i] + rep.half_width[i]}},
                             {"trials", rep.trials},
                             {"seed", run_seed},
                             {"mode", mode}};
                    os << rec.dump() << '\n';
                }
                json summary{{"scheme", crs::scheme_name(kind)},
                             {"instance", inst.name},
                             {"edge", "min"},
                             {"argmin", rep.argmin},
                             {"mean", rep.minimum},
                             {"trials", rep.trials},
                             {"seed", run_seed},
                             {"mode", mode},
                             {"error_bound", rep.error_bound},
                             {"command", command_echo(argc, argv)},
                             {"wall_time_s", seconds_since(t0)}};
                os << summary.dump() << '\n';
            }
            return 0;
        }

        if (*verify) {
            crs::Instance inst;
            if (!graph_path.empty()) {
                inst = crs::load_instance(graph_path);
            } else if (!instance_text.empty()) {
                inst = crs::generate_instance(crs::parse_instance_spec(instance_text));
            } else {
                throw crs::InputError("verify needs --graph or --instance");
            }
            crs::VerifyOptions opt;
            opt.max_edges = max_edges;
            opt.trials = std::max<std::int64_t>(trials, crs::kMinEstimateTrials);
            opt.seed = run_seed;
            opt.jobs = jobs;
            auto records = crs::verify_instance(inst, opt);
            Output out(out_path);
            std::ostream& os = out.stream();
            os << "check,scheme,result,detail\n";
            bool all = true;
            for (const auto& r : records) {
                all = all && r.pass;
                os << r.check << ',' << r.scheme << ',' << (r.pass ? "pass" : "fail") << ',' << r.detail << '\n';
            }
            return all ? 0 : kExitInvariant;
        }

        if (*beta_cmd) {
            std::cout << crs::beta(b) << '\n';
            return 0;
        }
        if (*gamma_cmd) {
            std::cout << (series ? crs::gamma_series(b) : crs::gamma(b)) << '\n';
            return 0;
        }

        if (*limit) {
            crs::LimitResult res = crs::optimality_limit(n, b, trials, run_seed, jobs);
            Output out(out_path);
            json rec{{"n", n},          {"b", b},
                     {"value", res.value}, {"std_error", res.std_error},
                     {"exact", res.exact}, {"trials", res.trials},
                     {"seed", run_seed},   {"beta", crs::beta(b)},
                     {"wall_time_s", seconds_since(t0)}};
            out.stream() << rec.dump() << '\n';
            return 0;
        }

        if (*decompose) {
            const crs::Instance inst = crs::load_instance(graph_path);
            const crs::RationalVector y = crs::load_marginals(marginals_path, inst.graph.edge_count());
            crs::ConvexCombination comb = inst.graph.is_bipartite()
                                              ? crs::birkhoff_decompose(inst.graph, y)
                                              : crs::matching_polytope_decompose(inst.graph, y);
            Output out(out_path);
            std::ostream& os = out.stream();
            os << "weight,edges\n";
            for (const auto& t : comb.terms) {
                os << crs::to_string(t.weight) << ",\"";
                for (std::size_t i = 0; i < t.matching.size(); ++i) os << (i ? "," : "") << t.matching[i];
                os << "\"\n";
            }
            return 0;
        }

        if (*pipeline) {
            const crs::SchemeKind kind = crs::parse_scheme(scheme_text);
            const crs::Instance inst = crs::generate_instance(crs::parse_instance_spec(instance_text));
            const crs::FunctionKind fk = crs::parse_function_kind(function_text);
            const auto f = crs::SubmodularOracle::random(fk, inst.graph.edge_count(), run_seed);
            crs::FractionalPoint x = crs::continuous_greedy(f, inst.graph, b, steps, samples, run_seed);
            crs::MultilinearEstimate ml = crs::multilinear_estimate(f, x, trials, run_seed ^ 0x5eedULL, jobs);
            crs::RoundingResult rr = crs::round_and_evaluate(f, inst.graph, x, kind, trials, run_seed, jobs);
            Output out(out_path);
            json rec{{"function", function_text},
                     {"scheme", crs::scheme_name(kind)},
                     {"instance", inst.name},
                     {"b", b},
                     {"steps", steps},
                     {"samples", samples},
                     {"trials", trials},
                     {"seed", run_seed},
                     {"x", x},
                     {"multilinear", ml.value},
                     {"multilinear_std_error", ml.std_error},
                     {"rounded", rr.mean},
                     {"rounded_std_error", rr.std_error},
                     {"ratio", ml.value > 0 ? rr.mean / ml.value : 0.0},
                     {"wall_time_s", seconds_since(t0)}};
            out.stream() << rec.dump() << '\n';
            return 0;
        }

        if (*generate) {
            const crs::Instance inst = crs::generate_instance(crs::parse_instance_spec(instance_text));
            Output out(out_path);
            out.stream() << crs::instance_to_json(inst).dump(2) << '\n';
            return 0;
        }
    } catch (const crs::CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << '\n';
        return kExitCapability;
    } catch (const crs::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

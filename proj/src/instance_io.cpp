#include "crs/instance_io.hpp"

#include <fstream>
#include <sstream>

namespace crs {

using nlohmann::json;

namespace {

Rational read_value(const json& v, const std::string& what) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number()) return decimal_rational(v.get<double>());
    throw InputError(what + " must be a number or a \"p/q\" string");
}

int read_int(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw InputError(std::string("missing or non-integer field '") + key + "'");
    }
    return j[key].get<int>();
}

}  // namespace

Instance instance_from_json(const json& j, const std::string& name) {
    if (!j.is_object()) throw InputError("instance must be a JSON object");
    const int n = read_int(j, "vertices");
    if (n < 0) throw InputError("vertex count must be nonnegative");
    if (!j.contains("edges") || !j["edges"].is_array()) throw InputError("missing 'edges' array");
    const auto& arr = j["edges"];
    std::vector<Edge> edges(arr.size());
    RationalVector x(arr.size());
    std::vector<char> seen(arr.size(), 0);
    for (const auto& item : arr) {
        if (!item.is_object()) throw InputError("edge entries must be objects");
        int id = read_int(item, "id");
        if (id < 0 || id >= static_cast<int>(arr.size())) throw InputError("edge ids must be dense 0..|E|-1");
        if (seen[id]) throw InputError("duplicate edge id " + std::to_string(id));
        seen[id] = 1;
        edges[id] = {read_int(item, "u"), read_int(item, "v")};
        if (!item.contains("x")) throw InputError("edge " + std::to_string(id) + " has no 'x'");
        x[id] = read_value(item["x"], "edge value");
    }
    Instance inst;
    inst.graph = Multigraph(n, std::move(edges));
    for (const Rational& v : x) {
        if (v < 0 || v > 1) throw InputError("edge value outside [0, 1]");
        inst.x.push_back(to_double(v));
    }
    inst.exact_x = std::move(x);
    if (j.contains("bipartition") && !j["bipartition"].is_null()) {
        const auto& b = j["bipartition"];
        if (!b.is_array() || static_cast<int>(b.size()) != n) {
            throw InputError("bipartition must list one side per vertex");
        }
        std::vector<int> sides;
        for (const auto& s : b) {
            if (!s.is_number_integer() || (s.get<int>() != 0 && s.get<int>() != 1)) {
                throw InputError("bipartition sides must be 0 or 1");
            }
            sides.push_back(s.get<int>());
        }
        for (const Edge& e : inst.graph.edges()) {
            if (sides[e.u] == sides[e.v]) {
                throw InputError("bipartition puts both ends of edge {" + std::to_string(e.u) + "," +
                                 std::to_string(e.v) + "} on one side");
            }
        }
        inst.bipartition = std::move(sides);
    } else {
        inst.bipartition = inst.graph.two_coloring();
    }
    inst.name = name;
    return inst;
}

json instance_to_json(const Instance& inst) {
    json j;
    j["vertices"] = inst.graph.vertex_count();
    json edges = json::array();
    for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
        json item{{"id", e}, {"u", inst.graph.edge(e).u}, {"v", inst.graph.edge(e).v}};
        if (inst.exact_x && to_double((*inst.exact_x)[e]) == inst.x[e]) {
            const Rational& r = (*inst.exact_x)[e];
            if (denominator(r) == 1 || to_string(r).size() > 40) {
                item["x"] = inst.x[e];
            } else {
                item["x"] = to_string(r);
            }
        } else {
            item["x"] = inst.x[e];
        }
        edges.push_back(std::move(item));
    }
    j["edges"] = std::move(edges);
    if (inst.bipartition) j["bipartition"] = *inst.bipartition;
    return j;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open instance file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw InputError("malformed JSON in '" + path + "': " + ex.what());
    }
    return instance_from_json(j, "file:" + path);
}

void save_instance(const std::string& path, const Instance& inst) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << instance_to_json(inst).dump(2) << '\n';
}

RationalVector marginals_from_json(const json& j, int edge_count) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("y")) throw InputError("marginal object needs key 'y'");
        arr = &j["y"];
    }
    if (!arr->is_array()) throw InputError("marginals must be a JSON array");
    if (static_cast<int>(arr->size()) != edge_count) throw InputError("marginal vector has wrong length");
    RationalVector y;
    for (const auto& v : *arr) y.push_back(read_value(v, "marginal entry"));
    return y;
}

RationalVector load_marginals(const std::string& path, int edge_count) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open marginal file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw InputError("malformed JSON in '" + path + "': " + ex.what());
    }
    return marginals_from_json(j, edge_count);
}

}  // namespace crs

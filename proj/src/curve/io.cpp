#include "bacoord/curve/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"

namespace bacoord {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

void expect_fields(const Json& j, const std::string& path, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) schema(path, "expected an object");
    for (const char* key : required)
        if (!j.contains(key)) schema(path, std::string("missing field '") + key + "'");
    for (const auto& item : j.items()) {
        const auto& key = item.key();
        const auto known = [&](std::initializer_list<const char*> keys) {
            return std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
        };
        if (!known(required) && !known(optional)) schema(path, "unknown field '" + key + "'");
    }
}

const Json& array_at(const Json& j, const char* key, const std::string& path) {
    const Json& a = j.at(key);
    if (!a.is_array()) schema(path + "." + key, "expected an array");
    return a;
}

std::string index_path(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

Complex read_complex(const Json& j, const std::string& path) {
    Complex z;
    if (j.is_number()) {
        z = j.get<double>();
    } else if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        z = {j[0].get<double>(), j[1].get<double>()};
    } else {
        schema(path, "expected a number or a [re, im] pair");
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvariantError("finite values", path + " is not finite");
    return z;
}

SpherePoint read_location(const Json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return SpherePoint::infinity();
        schema(path, "the only accepted string location is \"inf\"");
    }
    return read_complex(j, path);
}

int read_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) schema(path, "expected an integer");
    return j.get<int>();
}

std::size_t read_component(const Json& j, const std::string& path, const SpectralData& data) {
    if (!j.is_string()) schema(path, "expected a component id");
    const auto c = data.find_component(j.get<std::string>());
    if (!c) schema(path, "unknown component '" + j.get<std::string>() + "'");
    return *c;
}

CurvePoint read_point(const Json& j, const std::string& path, const SpectralData& data,
                      std::initializer_list<const char*> extra = {}) {
    std::vector<const char*> required{"component", "location"};
    required.insert(required.end(), extra.begin(), extra.end());
    if (!j.is_object()) schema(path, "expected an object");
    for (const char* key : required)
        if (!j.contains(key)) schema(path, std::string("missing field '") + key + "'");
    for (const auto& item : j.items())
        if (std::none_of(required.begin(), required.end(), [&](const char* k) { return item.key() == k; }))
            schema(path, "unknown field '" + item.key() + "'");
    return {read_component(j.at("component"), path + ".component", data),
            read_location(j.at("location"), path + ".location")};
}

void check_index_set(const std::vector<int>& indices, int n, const char* rule, const char* what) {
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    bool ok = static_cast<int>(sorted.size()) == n;
    for (int k = 0; ok && k < n; ++k) ok = sorted[static_cast<std::size_t>(k)] == k + 1;
    if (!ok) throw InvariantError(rule, std::string(what) + " must be exactly {1, ..., " + std::to_string(n) + "}");
}

Involution read_involution(const Json& j, const std::string& path, const SpectralData& data) {
    expect_fields(j, path, {"component_map", "mobius"}, {"conjugating"});
    const std::size_t m = data.component_count();
    Involution inv;
    inv.conjugating = false;
    if (j.contains("conjugating")) {
        if (!j.at("conjugating").is_boolean()) schema(path + ".conjugating", "expected a boolean");
        inv.conjugating = j.at("conjugating").get<bool>();
    }

    const Json& cmap = j.at("component_map");
    if (!cmap.is_object()) schema(path + ".component_map", "expected an object");
    inv.component_map.assign(m, m);
    for (const auto& item : cmap.items()) {
        const auto from = data.find_component(item.key());
        if (!from) schema(path + ".component_map", "unknown component '" + item.key() + "'");
        inv.component_map[*from] = read_component(item.value(), path + ".component_map." + item.key(), data);
    }
    for (std::size_t c = 0; c < m; ++c)
        if (inv.component_map[c] == m) schema(path + ".component_map", "no image for component '" + data.components[c] + "'");
    std::vector<std::size_t> image = inv.component_map;
    std::sort(image.begin(), image.end());
    if (std::adjacent_find(image.begin(), image.end()) != image.end())
        throw InvariantError("component map is a permutation", path + ".component_map is not a bijection");

    const Json& mob = j.at("mobius");
    if (!mob.is_object()) schema(path + ".mobius", "expected an object");
    std::vector<bool> seen(m, false);
    inv.maps.assign(m, MobiusMap::identity());
    for (const auto& item : mob.items()) {
        const auto c = data.find_component(item.key());
        const std::string p = path + ".mobius." + item.key();
        if (!c) schema(path + ".mobius", "unknown component '" + item.key() + "'");
        const Json& mat = item.value();
        if (!mat.is_array() || mat.size() != 2 || !mat[0].is_array() || !mat[1].is_array() || mat[0].size() != 2 ||
            mat[1].size() != 2)
            schema(p, "expected a 2x2 matrix [[a, b], [c, d]]");
        MobiusMap map{read_complex(mat[0][0], p), read_complex(mat[0][1], p), read_complex(mat[1][0], p),
                      read_complex(mat[1][1], p), inv.conjugating};
        check_nondegenerate(map, tolerances().point);
        inv.maps[*c] = map;
        seen[*c] = true;
    }
    for (std::size_t c = 0; c < m; ++c)
        if (!seen[c]) schema(path + ".mobius", "no map for component '" + data.components[c] + "'");
    return inv;
}

ComponentForm read_form(const Json& j, const std::string& path, std::set<std::string>& referenced) {
    expect_fields(j, path, {"numerator", "poles"}, {"scale"});
    ComponentForm f;
    const Json& num = array_at(j, "numerator", path);
    std::vector<Complex> coeffs;
    for (std::size_t k = 0; k < num.size(); ++k) coeffs.push_back(read_complex(num[k], index_path(path + ".numerator", k)));
    f.numerator = Polynomial(std::move(coeffs));
    const Json& poles = array_at(j, "poles", path);
    for (std::size_t k = 0; k < poles.size(); ++k) {
        const std::string p = index_path(path + ".poles", k);
        expect_fields(poles[k], p, {"location", "order"});
        const SpherePoint loc = read_location(poles[k].at("location"), p + ".location");
        if (loc.is_infinite())
            throw InvariantError("finite pole location",
                                 p + ": behaviour at infinity follows from the degrees and is never declared");
        f.poles.push_back({loc.value(), read_int(poles[k].at("order"), p + ".order")});
    }
    if (j.contains("scale")) {
        const Json& s = j.at("scale");
        if (s.is_object()) {
            expect_fields(s, path + ".scale", {"param"}, {"factor"});
            if (!s.at("param").is_string()) schema(path + ".scale.param", "expected a parameter name");
            f.parameter = s.at("param").get<std::string>();
            referenced.insert(*f.parameter);
            if (s.contains("factor")) f.scale = read_complex(s.at("factor"), path + ".scale.factor");
        } else {
            f.scale = read_complex(s, path + ".scale");
        }
    }
    // Exercise the rational-function invariants now, with the scale left symbolic.
    (void)RationalFunction(f.numerator, f.poles, 1.0);
    return f;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json location_json(const SpherePoint& z) {
    if (z.is_infinite()) return "inf";
    return complex_json(z.value());
}

Json point_json(const CurvePoint& x, const SpectralData& data) {
    Json j;
    j["component"] = data.components[x.component];
    j["location"] = location_json(x.location);
    return j;
}

Json involution_json(const Involution& inv, const SpectralData& data) {
    Json j;
    Json cmap = Json::object();
    Json mob = Json::object();
    for (std::size_t c = 0; c < data.component_count(); ++c) {
        cmap[data.components[c]] = data.components[inv.component_map[c]];
        const MobiusMap& m = inv.maps[c];
        mob[data.components[c]] = Json::array({Json::array({complex_json(m.a), complex_json(m.b)}),
                                               Json::array({complex_json(m.c), complex_json(m.d)})});
    }
    j["component_map"] = cmap;
    j["mobius"] = mob;
    j["conjugating"] = inv.conjugating;
    return j;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t k = 0; k < end; ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

Json parse_json(std::string_view text) {
    std::vector<std::set<std::string>> keys;
    const auto callback = [&keys](int, Json::parse_event_t event, Json& parsed) {
        switch (event) {
            case Json::parse_event_t::object_start:
                keys.emplace_back();
                break;
            case Json::parse_event_t::object_end:
                keys.pop_back();
                break;
            case Json::parse_event_t::key:
                if (!keys.back().insert(parsed.get<std::string>()).second)
                    throw SchemaError("duplicate field '" + parsed.get<std::string>() + "'");
                break;
            default:
                break;
        }
        return true;
    };
    try {
        return Json::parse(text.begin(), text.end(), callback);
    } catch (const Json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte);
        std::string msg = e.what();
        if (const auto pos = msg.find("] "); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw SyntaxError(msg, line, column);
    }
}

}  // namespace

SpectralData parse_spectral_data(std::string_view text) {
    const Json root = parse_json(text);
    expect_fields(root, "$",
                  {"dimension", "components", "essential_points", "q_points", "normalization", "psi_poles", "nodes",
                   "sigma", "omega", "parameters"},
                  {"tau", "description"});

    SpectralData data;
    if (root.contains("description")) {
        if (!root.at("description").is_string()) schema("$.description", "expected a string");
        data.description = root.at("description").get<std::string>();
    }
    data.dimension = read_int(root.at("dimension"), "$.dimension");
    if (data.dimension < 1) throw InvariantError("dimension positive", "dimension must be at least 1");

    const Json& comps = array_at(root, "components", "$");
    if (comps.empty()) throw InvariantError("at least one component", "the component list is empty");
    for (std::size_t k = 0; k < comps.size(); ++k) {
        if (!comps[k].is_string()) schema(index_path("$.components", k), "expected a string id");
        const std::string id = comps[k].get<std::string>();
        if (data.find_component(id)) throw InvariantError("component ids unique", "component '" + id + "' repeats");
        data.components.push_back(id);
    }

    const Json& ess = array_at(root, "essential_points", "$");
    std::vector<int> flows;
    for (std::size_t k = 0; k < ess.size(); ++k) {
        const std::string p = index_path("$.essential_points", k);
        EssentialPoint e{read_point(ess[k], p, data, {"flow_index"}), read_int(ess[k].at("flow_index"), p + ".flow_index")};
        flows.push_back(e.flow_index);
        data.essential_points.push_back(e);
    }
    check_index_set(flows, data.dimension, "flow indices 1..n", "essential point flow indices");

    const Json& qs = array_at(root, "q_points", "$");
    std::vector<int> coords;
    for (std::size_t k = 0; k < qs.size(); ++k) {
        const std::string p = index_path("$.q_points", k);
        QPoint q{read_point(qs[k], p, data, {"coordinate_index"}),
                 read_int(qs[k].at("coordinate_index"), p + ".coordinate_index")};
        coords.push_back(q.coordinate_index);
        data.q_points.push_back(q);
    }
    check_index_set(coords, data.dimension, "coordinate indices 1..n", "Q point coordinate indices");

    const Json& rs = array_at(root, "normalization", "$");
    for (std::size_t k = 0; k < rs.size(); ++k) {
        const std::string p = index_path("$.normalization", k);
        data.normalization.push_back({read_point(rs[k], p, data, {"value"}), read_complex(rs[k].at("value"), p + ".value")});
    }
    if (std::none_of(data.normalization.begin(), data.normalization.end(),
                     [](const NormalizationPoint& r) { return r.value != Complex{}; }))
        throw InvariantError("normalization not all zero", "at least one normalization value d must be nonzero");

    const Json& gs = array_at(root, "psi_poles", "$");
    for (std::size_t k = 0; k < gs.size(); ++k) {
        const std::string p = index_path("$.psi_poles", k);
        const CurvePoint g = read_point(gs[k], p, data);
        if (g.location.is_infinite()) throw InvariantError("psi poles finite", p + " lies at infinity");
        data.psi_poles.push_back(g);
    }

    const Json& ns = array_at(root, "nodes", "$");
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const std::string p = index_path("$.nodes", k);
        expect_fields(ns[k], p, {"p", "q", "lambda"});
        Node node{read_point(ns[k].at("p"), p + ".p", data), read_point(ns[k].at("q"), p + ".q", data),
                  read_complex(ns[k].at("lambda"), p + ".lambda")};
        if (node.lambda == Complex{}) throw InvariantError("lambda ≠ 0", p + ": the gluing constant vanishes");
        if (same_point(node.p, node.q, tolerances().point))
            throw InvariantError("node sides distinct", p + ": both sides are the same point");
        data.nodes.push_back(node);
    }

    data.sigma = read_involution(root.at("sigma"), "$.sigma", data);
    if (data.sigma->conjugating) throw InvariantError("sigma holomorphic", "$.sigma must not be conjugating");
    if (root.contains("tau") && !root.at("tau").is_null()) {
        data.tau = read_involution(root.at("tau"), "$.tau", data);
        if (!data.tau->conjugating) throw InvariantError("tau antiholomorphic", "$.tau must be conjugating");
    }

    const Json& om = root.at("omega");
    if (!om.is_object()) schema("$.omega", "expected an object keyed by component id");
    std::set<std::string> referenced;
    data.omega.resize(data.component_count());
    std::vector<bool> have(data.component_count(), false);
    for (const auto& item : om.items()) {
        const auto c = data.find_component(item.key());
        if (!c) schema("$.omega", "unknown component '" + item.key() + "'");
        data.omega[*c] = read_form(item.value(), "$.omega." + item.key(), referenced);
        have[*c] = true;
    }
    for (std::size_t c = 0; c < data.component_count(); ++c)
        if (!have[c]) schema("$.omega", "no form for component '" + data.components[c] + "'");

    const Json& params = root.at("parameters");
    if (!params.is_object()) schema("$.parameters", "expected an object");
    for (const auto& item : params.items()) {
        const std::string p = "$.parameters." + item.key();
        if (item.value().is_string()) {
            if (item.value().get<std::string>() != "solve") schema(p, "expected a number, a [re, im] pair or \"solve\"");
            data.parameters[item.key()] = std::nullopt;
        } else {
            data.parameters[item.key()] = read_complex(item.value(), p);
        }
        if (!referenced.count(item.key()))
            throw InvariantError("parameter used", "parameter '" + item.key() + "' appears in no component form");
    }
    for (const auto& name : referenced)
        if (!data.parameters.count(name)) schema("$.parameters", "form references undeclared parameter '" + name + "'");
    return data;
}

SpectralData load_spectral_data(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("cannot read " + path.string());
    return parse_spectral_data(buf.str());
}

std::string serialize_spectral_data(const SpectralData& data, int indent) {
    Json root;
    if (!data.description.empty()) root["description"] = data.description;
    root["dimension"] = data.dimension;
    root["components"] = data.components;

    root["essential_points"] = Json::array();
    for (const auto& e : data.essential_points) {
        Json j = point_json(e.point, data);
        j["flow_index"] = e.flow_index;
        root["essential_points"].push_back(j);
    }
    root["q_points"] = Json::array();
    for (const auto& q : data.q_points) {
        Json j = point_json(q.point, data);
        j["coordinate_index"] = q.coordinate_index;
        root["q_points"].push_back(j);
    }
    root["normalization"] = Json::array();
    for (const auto& r : data.normalization) {
        Json j = point_json(r.point, data);
        j["value"] = complex_json(r.value);
        root["normalization"].push_back(j);
    }
    root["psi_poles"] = Json::array();
    for (const auto& g : data.psi_poles) root["psi_poles"].push_back(point_json(g, data));
    root["nodes"] = Json::array();
    for (const auto& n : data.nodes) {
        Json j;
        j["p"] = point_json(n.p, data);
        j["q"] = point_json(n.q, data);
        j["lambda"] = complex_json(n.lambda);
        root["nodes"].push_back(j);
    }
    if (data.sigma) root["sigma"] = involution_json(*data.sigma, data);
    if (data.tau) root["tau"] = involution_json(*data.tau, data);

    Json om = Json::object();
    for (std::size_t c = 0; c < data.component_count(); ++c) {
        const ComponentForm& f = data.omega[c];
        Json j;
        j["numerator"] = Json::array();
        for (Complex a : f.numerator.coefficients()) j["numerator"].push_back(complex_json(a));
        j["poles"] = Json::array();
        for (const Pole& p : f.poles) j["poles"].push_back({{"location", complex_json(p.location)}, {"order", p.order}});
        if (f.parameter) {
            j["scale"] = {{"param", *f.parameter}};
            if (f.scale != Complex{1.0}) j["scale"]["factor"] = complex_json(f.scale);
        } else {
            j["scale"] = complex_json(f.scale);
        }
        om[data.components[c]] = j;
    }
    root["omega"] = om;

    Json params = Json::object();
    for (const auto& [name, value] : data.parameters) params[name] = value ? complex_json(*value) : Json("solve");
    root["parameters"] = params;
    return root.dump(indent) + "\n";
}

}  // namespace bacoord

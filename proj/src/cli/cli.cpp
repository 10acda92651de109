#include "bacoord/cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bacoord/curve/io.hpp"
#include "bacoord/curve/validation.hpp"
#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"
#include "json.hpp"

namespace bacoord::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(Complex z) {
    char buf[80];
    if (z.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.10g", z.real());
    else std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
    return buf;
}

Json complex_json(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return Json::array({z.real(), z.imag()});
}

struct Options {
    bool json = false;
    std::uint64_t seed = 0;
    double tol_pt = 1e-9;
    double tol_res = 1e-10;
    bool solve_params = false;
};

/// Raised inside a subcommand to leave with a given code after printing a diagnostic.
struct Exit {
    int code;
};

SpectralData load_checked(const std::string& path, const Options& opt, std::ostream& err, bool need_bound) {
    SpectralData data;
    try {
        data = load_spectral_data(path);
    } catch (const InvariantError& e) {
        err << path << ": invalid spectral data, rule '" << e.rule() << "': " << e.what() << '\n';
        throw Exit{ValidationFailure};
    } catch (const std::exception& e) {
        err << path << ": " << e.what() << '\n';
        throw Exit{RuntimeFailure};
    }
    if (opt.solve_params && !data.parameters_bound()) {
        try {
            solve_all_parameters(data);
        } catch (const Error& e) {
            err << path << ": cannot solve parameters: " << e.what() << '\n';
            throw Exit{ValidationFailure};
        }
    }
    if (need_bound && !data.parameters_bound()) {
        std::string names;
        for (const auto& n : data.unbound_parameters()) names += (names.empty() ? "" : ", ") + n;
        err << path << ": unbound parameters (" << names << "); pass --solve-params\n";
        throw Exit{ValidationFailure};
    }
    return data;
}

void require_valid(const SpectralData& data, const std::string& path, std::ostream& err) {
    const ValidationReport rep = validate_all(data);
    if (const CheckEntry* f = rep.first_failure()) {
        err << path << ": validation failed, rule '" << f->rule << "': " << f->detail << '\n';
        throw Exit{ValidationFailure};
    }
}

std::vector<FlowPoint> samples_of(const std::vector<std::string>& us, const std::string& grid, int dimension) {
    std::vector<FlowPoint> out;
    if (!grid.empty()) {
        const GridSpec g = GridSpec::parse(grid);
        if (static_cast<int>(g.axes.size()) != dimension)
            throw std::invalid_argument("grid has " + std::to_string(g.axes.size()) + " axes, data has dimension " +
                                        std::to_string(dimension));
        for (std::size_t k = 0; k < g.size(); ++k) out.push_back(g.point(k));
    }
    for (const auto& text : us) {
        FlowPoint u = parse_flow_point(text);
        if (static_cast<int>(u.size()) != dimension)
            throw std::invalid_argument("--u " + text + " has " + std::to_string(u.size()) + " entries, expected " +
                                        std::to_string(dimension));
        out.push_back(std::move(u));
    }
    if (out.empty()) throw std::invalid_argument("give --u or --grid");
    return out;
}

std::vector<CoordinateSample> evaluate_all(const BakerAkhiezerProblem& problem, const std::vector<FlowPoint>& samples) {
    std::vector<CoordinateSample> out(samples.size());
    const auto count = static_cast<long long>(samples.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long long k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = coordinates(problem, samples[static_cast<std::size_t>(k)]);
    return out;
}

int cmd_validate(const std::string& path, const Options& opt, std::ostream& out, std::ostream& err) {
    const SpectralData data = load_checked(path, opt, err, false);
    const ValidationReport rep = validate_all(data);
    out << (opt.json ? rep.to_json() + "\n" : rep.to_text());
    return rep.passed() ? Success : ValidationFailure;
}

int cmd_solve(const std::string& path, const std::vector<std::string>& us, const std::string& grid,
              const std::string& out_path, const Options& opt, std::ostream& out, std::ostream& err) {
    const SpectralData data = load_checked(path, opt, err, true);
    require_valid(data, path, err);
    const BakerAkhiezerProblem problem(data);
    const std::vector<FlowPoint> samples = samples_of(us, grid, data.dimension);
    std::size_t gaps = 0;
    const std::string csv = coordinates_csv(problem, samples, &gaps);
    if (out_path.empty()) out << csv;
    else write_atomically(out_path, csv);
    if (gaps == samples.size()) {
        err << path << ": every sample is a gap\n";
        return RuntimeFailure;
    }
    return Success;
}

int cmd_verify(const std::string& path, const std::string& grid, const std::string& report_path, const Options& opt,
               std::ostream& out, std::ostream& err) {
    const SpectralData data = load_checked(path, opt, err, true);
    require_valid(data, path, err);
    const BakerAkhiezerProblem problem(data);
    const GridSpec g = grid.empty() ? GridSpec::uniform(data.dimension, -1.0, 1.0, 21) : GridSpec::parse(grid);
    CheckTolerances tol;
    tol.residue = opt.tol_res;
    const VerificationReport rep = run_report(problem, g, opt.seed, tol);
    const std::string json = rep.to_json();
    if (!report_path.empty()) write_atomically(report_path, json + "\n");
    out << (opt.json ? json + "\n" : rep.to_text());
    std::size_t gaps = 0;
    for (const auto& c : rep.checks) gaps = std::max(gaps, c.gaps);
    if (gaps == g.size()) {
        err << path << ": every sample is a gap\n";
        return RuntimeFailure;
    }
    return rep.passed() ? Success : ValidationFailure;
}

int cmd_residues(const std::string& path, const Options& opt, std::ostream& out, std::ostream& err) {
    const SpectralData data = load_checked(path, opt, err, true);
    out << residue_table(data, opt.json);
    return Success;
}

int cmd_grid(const std::string& path, const std::string& grid, const std::string& svg_path, const Options& opt,
             std::ostream& out, std::ostream& err) {
    const SpectralData data = load_checked(path, opt, err, false);
    if (data.dimension != 2) {
        err << path << ": the coordinate net needs dimension 2, got " << data.dimension << '\n';
        return ValidationFailure;
    }
    if (!data.tau) {
        err << path << ": no τ in the data, refusing to plot real parts of complex coordinates\n";
        return ValidationFailure;
    }
    const BakerAkhiezerProblem problem(data);
    const GridSpec g = grid.empty() ? GridSpec::uniform(2, -1.0, 1.0, 21) : GridSpec::parse(grid);
    if (g.axes.size() != 2) throw std::invalid_argument("the coordinate net needs a two-axis grid");
    std::vector<FlowPoint> samples;
    for (std::size_t k = 0; k < g.size(); ++k) samples.push_back(g.point(k));
    const CheckTolerances tol;
    for (const CoordinateSample& c : evaluate_all(problem, samples)) {
        if (!c.solved) continue;
        double xmax = 0.0, imax = 0.0;
        for (Complex x : c.x) {
            xmax = std::max(xmax, std::abs(x));
            imax = std::max(imax, std::abs(x.imag()));
        }
        if (!(imax / (1.0 + xmax) < tol.reality)) {
            err << path << ": coordinates are not real at u = (" << num(c.u[0].real()) << ", " << num(c.u[1].real())
                << "), relative imaginary part " << imax / (1.0 + xmax) << '\n';
            return ValidationFailure;
        }
    }
    std::size_t lines = 0;
    const std::string svg = coordinate_net_svg(problem, g, &lines);
    if (svg_path.empty()) out << svg;
    else {
        write_atomically(svg_path, svg);
        out << "wrote " << lines << " polylines to " << svg_path << '\n';
    }
    return Success;
}

}  // namespace

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
    }
}

FlowPoint parse_flow_point(const std::string& text) {
    FlowPoint u;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || part.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v))
            throw std::invalid_argument("'" + part + "' is not a number in flow point '" + text + "'");
        u.emplace_back(v);
    }
    if (u.empty() || text.back() == ',') throw std::invalid_argument("malformed flow point '" + text + "'");
    return u;
}

std::string coordinates_csv(const BakerAkhiezerProblem& problem, const std::vector<FlowPoint>& samples,
                            std::size_t* gaps) {
    const int n = problem.dimension();
    std::string csv;
    for (int k = 1; k <= n; ++k) csv += "u" + std::to_string(k) + ",";
    for (int k = 1; k <= n; ++k) csv += "re_x" + std::to_string(k) + ",im_x" + std::to_string(k) + ",";
    csv += "orthogonality_residual,status\n";
    std::size_t missing = 0;
    for (const CoordinateSample& c : evaluate_all(problem, samples)) {
        for (Complex v : c.u) csv += num(v.real()) + ",";
        if (c.solved) {
            for (Complex x : c.x) csv += num(x.real()) + "," + num(x.imag()) + ",";
            csv += num(orthogonality_residual(c)) + ",solved\n";
        } else {
            ++missing;
            for (int k = 0; k < n; ++k) csv += ",,";
            csv += ",gap\n";
        }
    }
    if (gaps) *gaps = missing;
    return csv;
}

std::string residue_table(const SpectralData& data, bool json) {
    const double tol = tolerances().point;
    const auto labels_at = [&](std::size_t comp, const SpherePoint& z) {
        std::vector<std::string> out;
        const CurvePoint x{comp, z};
        for (const auto& q : data.q_points)
            if (same_point(q.point, x, tol)) out.push_back("Q" + std::to_string(q.coordinate_index));
        for (std::size_t k = 0; k < data.normalization.size(); ++k)
            if (same_point(data.normalization[k].point, x, tol)) out.push_back("R" + std::to_string(k + 1));
        if (data.sigma)
            for (std::size_t k = 0; k < data.normalization.size(); ++k)
                if (same_point((*data.sigma)(data.normalization[k].point), x, tol))
                    out.push_back("σR" + std::to_string(k + 1));
        for (std::size_t k = 0; k < data.nodes.size(); ++k) {
            if (same_point(data.nodes[k].p, x, tol)) out.push_back("node " + std::to_string(k + 1) + " a");
            if (same_point(data.nodes[k].q, x, tol)) out.push_back("node " + std::to_string(k + 1) + " b");
        }
        return out;
    };

    Json rows = Json::array();
    std::string text = "component  point                      order  residue                    marks\n";
    char line[256];
    for (std::size_t c = 0; c < data.component_count(); ++c) {
        const RationalOneForm w = data.omega_form(c);
        std::vector<std::pair<SpherePoint, int>> points;
        for (const auto& p : w.coefficient.poles()) points.emplace_back(SpherePoint(p.location), p.order);
        const int at_inf = order_at(w, SpherePoint::infinity(), tol);
        if (at_inf < 0) points.emplace_back(SpherePoint::infinity(), -at_inf);
        for (const auto& [z, order] : points) {
            const Complex r = residue(w, z);
            std::string marks;
            Json mark_list = Json::array();
            for (const auto& m : labels_at(c, z)) {
                marks += (marks.empty() ? "" : ", ") + m;
                mark_list.push_back(m);
            }
            std::snprintf(line, sizeof line, "%-10s %-26s %5d  %-26s %s\n", data.components[c].c_str(),
                          z.to_string().c_str(), order, short_num(r).c_str(), marks.c_str());
            text += line;
            rows.push_back({{"component", data.components[c]},
                            {"point", z.to_string()},
                            {"order", order},
                            {"residue", complex_json(r)},
                            {"marks", mark_list}});
        }
    }

    const ValidationReport rc = check_residue_conditions(data);
    const CheckEntry* eq = rc.find("Q-residues equal");
    const Complex rho = q_residue(data);
    text += "\nQ residues equal: " + std::string(eq ? to_string(eq->status) : "n/a") + " (Res_Q Ω = " +
            short_num(rho) + ")\n";
    Json nodes = Json::array();
    for (std::size_t k = 0; k < data.nodes.size(); ++k) {
        const NodeResidueSum s = node_residue_sum(data, k);
        const double rel = s.scale > 0.0 ? std::abs(s.value) / s.scale : std::abs(s.value);
        std::snprintf(line, sizeof line, "node %zu weighted sum: %s (relative %.3e)\n", k + 1,
                      short_num(s.value).c_str(), rel);
        text += line;
        nodes.push_back({{"node", k + 1}, {"weighted_sum", complex_json(s.value)}, {"relative", rel}});
    }
    if (!json) return text;
    Json j;
    j["residues"] = rows;
    j["q_residue"] = complex_json(rho);
    j["q_residues_equal"] = eq ? to_string(eq->status) : "n/a";
    j["nodes"] = nodes;
    return j.dump(2) + "\n";
}

std::string coordinate_net_svg(const BakerAkhiezerProblem& problem, const GridSpec& grid, std::size_t* polylines) {
    if (grid.axes.size() != 2) throw std::invalid_argument("the coordinate net needs a two-axis grid");
    std::vector<FlowPoint> samples;
    for (std::size_t k = 0; k < grid.size(); ++k) samples.push_back(grid.point(k));
    const std::vector<CoordinateSample> cs = evaluate_all(problem, samples);
    const auto n0 = static_cast<std::size_t>(grid.axes[0].count), n1 = static_cast<std::size_t>(grid.axes[1].count);
    const auto at = [&](std::size_t i, std::size_t j) -> const CoordinateSample& { return cs[i * n1 + j]; };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& c : cs) {
        if (!c.solved) continue;
        xmin = std::min(xmin, c.x[0].real());
        xmax = std::max(xmax, c.x[0].real());
        ymin = std::min(ymin, -c.x[1].real());
        ymax = std::max(ymax, -c.x[1].real());
    }
    if (xmin > xmax) xmin = xmax = ymin = ymax = 0.0;
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double pad = 0.05 * span;

    std::string body;
    std::size_t count = 0;
    const auto emit = [&](const std::string& cls, const std::vector<const CoordinateSample*>& line) {
        std::string pts;
        const auto flush = [&] {
            if (pts.find(' ') != std::string::npos) {
                body += "  <polyline class=\"" + cls + "\" points=\"" + pts + "\"/>\n";
                ++count;
            }
            pts.clear();
        };
        for (const CoordinateSample* c : line) {
            if (!c->solved) {
                flush();
                continue;
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s%.6g,%.6g", pts.empty() ? "" : " ", c->x[0].real(), -c->x[1].real());
            pts += buf;
        }
        flush();
    };
    for (std::size_t j = 0; j < n1; ++j) {
        std::vector<const CoordinateSample*> line;
        for (std::size_t i = 0; i < n0; ++i) line.push_back(&at(i, j));
        emit("u1-line", line);
    }
    for (std::size_t i = 0; i < n0; ++i) {
        std::vector<const CoordinateSample*> line;
        for (std::size_t j = 0; j < n1; ++j) line.push_back(&at(i, j));
        emit("u2-line", line);
    }

    char head[512];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6g %.6g %.6g %.6g\" width=\"640\" height=\"640\">\n"
                  "  <style>polyline{fill:none;stroke-width:1.2;vector-effect:non-scaling-stroke}"
                  ".u1-line{stroke:#1f5fa8}.u2-line{stroke:#b8462a}</style>\n",
                  xmin - pad, ymin - pad, (xmax - xmin) + 2 * pad, (ymax - ymin) + 2 * pad);
    if (polylines) *polylines = count;
    return std::string(head) + body + "</svg>\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Orthogonal coordinates from Baker-Akhiezer sections on nodal spectral curves", "bacoord"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_flag("--json", opt.json, "Machine-readable output");
    app.add_option("--seed", opt.seed, "Seed for random probes")->capture_default_str();
    app.add_option("--tol-pt", opt.tol_pt, "Point-coincidence tolerance")->capture_default_str();
    app.add_option("--tol-res", opt.tol_res, "Residue-identity tolerance")->capture_default_str();
    app.add_flag("--solve-params", opt.solve_params, "Solve parameters of Ω marked \"solve\"");

    std::string file, grid, out_path, report_path, svg_path;
    std::vector<std::string> us;

    auto* validate = app.add_subcommand("validate", "Check a spectral-data file");
    validate->add_option("file", file, "Spectral-data file")->required();

    auto* solve = app.add_subcommand("solve", "Export coordinates as CSV");
    solve->add_option("file", file, "Spectral-data file")->required();
    solve->add_option("--u", us, "Flow point u1,...,un (repeatable; use --u=-1,0 for negative values)");
    solve->add_option("--grid", grid, "Grid min:max:count per flow variable");
    solve->add_option("--out", out_path, "CSV path (standard output if omitted)");

    auto* verify = app.add_subcommand("verify", "Run every numerical check over a grid");
    verify->add_option("file", file, "Spectral-data file")->required();
    verify->add_option("--grid", grid, "Grid min:max:count per flow variable (default -1:1:21 each)");
    verify->add_option("--report", report_path, "JSON report path");

    auto* residues = app.add_subcommand("residues", "Print the residues of Ω");
    residues->add_option("file", file, "Spectral-data file")->required();

    auto* net = app.add_subcommand("grid", "Draw the coordinate net as SVG");
    net->add_option("file", file, "Spectral-data file")->required();
    net->add_option("--grid", grid, "Grid min:max:count for both flow variables (default -1:1:21 each)");
    net->add_option("--svg", svg_path, "SVG path (standard output if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Success : RuntimeFailure;
    }

    if (!(opt.tol_pt > 0.0) || !(opt.tol_res > 0.0)) {
        err << "tolerances must be positive\n";
        return RuntimeFailure;
    }
    set_tolerances({opt.tol_pt, opt.tol_res});

    try {
        if (*validate) return cmd_validate(file, opt, out, err);
        if (*solve) return cmd_solve(file, us, grid, out_path, opt, out, err);
        if (*verify) return cmd_verify(file, grid, report_path, opt, out, err);
        if (*residues) return cmd_residues(file, opt, out, err);
        if (*net) return cmd_grid(file, grid, svg_path, opt, out, err);
    } catch (const Exit& e) {
        return e.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return RuntimeFailure;
    }
    return RuntimeFailure;
}

}  // namespace bacoord::cli

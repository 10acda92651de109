#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "bacoord/errors.hpp"
#include "bacoord/verify/verify.hpp"
#include "json.hpp"

namespace bacoord {

namespace {

enum Check : std::size_t {
    Orthogonality,
    Reality,
    RealityProbe,
    Lame,
    BetaSymmetry,
    Epd,
    NodeSum,
    GlobalResidue,
    QIdentity,
    CheckCount
};

constexpr double kNotEvaluated = -1.0;
constexpr double kGap = -2.0;

using SampleResult = std::array<double, CheckCount>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Plan {
    std::array<bool, CheckCount> applicable{};
    std::array<std::string, CheckCount> note;
};

Plan plan_for(const SpectralData& d) {
    Plan p;
    p.applicable.fill(true);
    const auto off = [&](Check c, std::string why) {
        p.applicable[c] = false;
        p.note[c] = std::move(why);
    };
    if (d.dimension < 2) {
        off(Orthogonality, "vacuous: n = 1");
        off(Epd, "vacuous: n = 1");
        off(BetaSymmetry, "vacuous: n = 1");
    }
    if (!d.tau) {
        off(Reality, "no τ in the data");
        off(RealityProbe, "no τ in the data");
    }
    if (auto why = egorov_shape_violation(d)) {
        off(Lame, "not Egorov-shaped: " + *why);
        off(BetaSymmetry, "not Egorov-shaped: " + *why);
    }
    if (!d.parameters_bound()) {
        for (Check c : {Lame, NodeSum, GlobalResidue, QIdentity}) off(c, "Ω has unbound parameters");
        off(BetaSymmetry, "Ω has unbound parameters");
    }
    if (d.nodes.empty()) off(NodeSum, "no nodes");
    if (!d.sigma) for (Check c : {NodeSum, GlobalResidue, QIdentity}) off(c, "no σ in the data");
    p.note[Epd] = p.applicable[Epd] ? "h taken from the expansion at the essential points" : p.note[Epd];
    return p;
}

template <class F>
void guarded(SampleResult& r, Check c, F&& f) {
    if (r[c] == kGap) return;
    try {
        r[c] = std::max(r[c] < 0.0 ? 0.0 : r[c], f());
    } catch (const Error&) {
        r[c] = kGap;
    }
}

SampleResult evaluate_sample(const BakerAkhiezerProblem& problem, const Plan& plan, const FlowPoint& u,
                             std::uint64_t sample_seed) {
    const SpectralData& d = problem.data();
    const int n = d.dimension;
    SampleResult r;
    r.fill(kNotEvaluated);

    BASolution s;
    try {
        s = problem.solve(u, 2);
    } catch (const Error&) {
        for (std::size_t c = 0; c < CheckCount; ++c)
            if (plan.applicable[c]) r[c] = kGap;
        return r;
    }
    std::mt19937_64 rng(sample_seed);

    if (plan.applicable[Orthogonality])
        guarded(r, Orthogonality, [&] { return orthogonality_residual(coordinates(problem, u)); });
    if (plan.applicable[Reality]) {
        try {
            const RealityResidual rr = reality_residual(problem, u, rng(), 1);
            r[Reality] = rr.imaginary;
            r[RealityProbe] = rr.probe;
        } catch (const Error&) {
            r[Reality] = r[RealityProbe] = kGap;
        }
    }
    if (plan.applicable[Lame]) {
        try {
            const EgorovData e = egorov_checks(problem, u);
            r[Lame] = e.lame_residual;
            if (plan.applicable[BetaSymmetry]) r[BetaSymmetry] = e.beta_residual;
        } catch (const Error&) {
            r[Lame] = kGap;
            if (plan.applicable[BetaSymmetry]) r[BetaSymmetry] = kGap;
        }
    }
    if (plan.applicable[Epd]) {
        const CurvePoint q = random_curve_point(d, rng);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                guarded(r, Epd, [&] { return epd_residual(problem, s, i, j, q).normalized; });
    }
    if (plan.applicable[GlobalResidue]) {
        bool gap = false;
        for (int i = 0; i < n && !gap; ++i)
            for (int j = 0; j < n && !gap; ++j) {
                try {
                    const NodeCancellation nc = node_cancellation_residual(problem, s, i, j);
                    if (plan.applicable[NodeSum]) r[NodeSum] = std::max(r[NodeSum], nc.node);
                    r[GlobalResidue] = std::max(r[GlobalResidue], nc.global);
                    r[QIdentity] = std::max(r[QIdentity], nc.q_identity);
                } catch (const Error&) {
                    if (plan.applicable[NodeSum]) r[NodeSum] = kGap;
                    r[GlobalResidue] = r[QIdentity] = kGap;
                    gap = true;
                }
            }
    }
    return r;
}

VerificationReport reduce(const std::vector<SampleResult>& results, const Plan& plan, const GridSpec& grid,
                          std::uint64_t seed, const CheckTolerances& tol) {
    const std::array<double, CheckCount> tolerance = {tol.orthogonality, tol.reality, tol.probe,   tol.lame,   tol.beta,
                                                      tol.epd,           tol.residue, tol.residue, tol.residue};
    VerificationReport rep;
    rep.grid_size = grid.size();
    rep.seed = seed;
    for (std::size_t c = 0; c < CheckCount; ++c) {
        CheckSummary sum;
        sum.name = check_names()[c];
        sum.applicable = plan.applicable[c];
        sum.note = plan.note[c];
        sum.tolerance = tolerance[c];
        if (sum.applicable) {
            for (std::size_t k = 0; k < results.size(); ++k) {
                const double v = results[k][c];
                if (v == kGap) {
                    ++sum.gaps;
                    continue;
                }
                if (v < 0.0) continue;
                const bool first = sum.samples == 0;
                ++sum.samples;
                if (std::isnan(sum.max_residual)) continue;
                if (first || std::isnan(v) || v > sum.max_residual) {
                    sum.max_residual = v;
                    sum.worst_u = grid.point(k);
                }
            }
        }
        rep.checks.push_back(std::move(sum));
    }
    return rep;
}

VerificationReport run(const BakerAkhiezerProblem& problem, const GridSpec& grid, std::uint64_t seed,
                       const CheckTolerances& tol, bool parallel) {
    if (static_cast<int>(grid.axes.size()) != problem.dimension())
        throw std::invalid_argument("grid has " + std::to_string(grid.axes.size()) + " axes, data has dimension " +
                                    std::to_string(problem.dimension()));
    const Plan plan = plan_for(problem.data());
    const std::size_t total = grid.size();
    std::vector<SampleResult> results(total);
    const auto body = [&](std::size_t k) {
        results[k] = evaluate_sample(problem, plan, grid.point(k), splitmix64(seed ^ splitmix64(k)));
    };
    if (parallel) {
        const auto count = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 4)
        for (long long k = 0; k < count; ++k) body(static_cast<std::size_t>(k));
    } else {
        for (std::size_t k = 0; k < total; ++k) body(k);
    }
    return reduce(results, plan, grid, seed, tol);
}

nlohmann::ordered_json complex_json(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return nlohmann::ordered_json::array({z.real(), z.imag()});
}

}  // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = {"orthogonality",     "reality",          "reality probe",
                                                   "lame identity",     "beta symmetry",    "second-order equation",
                                                   "node cancellation", "global residue",   "q-residue identity"};
    return names;
}

GridSpec GridSpec::parse(const std::string& text) {
    GridSpec g;
    if (!text.empty() && text.back() == ',') throw std::invalid_argument("grid specification ends with ','");
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        GridAxis a;
        char c1 = 0, c2 = 0;
        std::istringstream p(part);
        if (!(p >> a.min >> c1 >> a.max >> c2 >> a.count) || c1 != ':' || c2 != ':' || !(p >> std::ws).eof())
            throw std::invalid_argument("grid axis '" + part + "' is not min:max:count");
        if (!(a.min < a.max)) throw std::invalid_argument("grid axis '" + part + "' needs min < max");
        if (a.count < 2) throw std::invalid_argument("grid axis '" + part + "' needs count >= 2");
        g.axes.push_back(a);
    }
    if (g.axes.empty()) throw std::invalid_argument("empty grid specification");
    return g;
}

GridSpec GridSpec::uniform(int dimension, double min, double max, int count) {
    return GridSpec{std::vector<GridAxis>(static_cast<std::size_t>(dimension), GridAxis{min, max, count})};
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
    return axes.empty() ? 0 : n;
}

FlowPoint GridSpec::point(std::size_t index) const {
    FlowPoint u(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const auto& a = axes[k];
        const auto count = static_cast<std::size_t>(a.count);
        const std::size_t i = index % count;
        index /= count;
        u[k] = a.min + (a.max - a.min) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return u;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckSummary& c) { return c.passed(); });
}

const CheckSummary* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string VerificationReport::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["grid_size"] = grid_size;
    j["seed"] = seed;
    j["passed"] = passed();
    auto& arr = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["applicable"] = c.applicable;
        if (!c.note.empty()) e["note"] = c.note;
        e["tolerance"] = c.tolerance;
        if (c.applicable && c.samples > 0) e["max_residual"] = c.max_residual;
        else e["max_residual"] = nullptr;
        auto& w = e["worst_u"] = nlohmann::ordered_json::array();
        for (Complex v : c.worst_u) w.push_back(complex_json(v));
        e["n_samples"] = c.samples;
        e["n_gaps"] = c.gaps;
        e["passed"] = c.passed();
        arr.push_back(std::move(e));
    }
    return j.dump(indent);
}

std::string VerificationReport::to_text() const {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %-6s %12s %10s %8s %6s\n", "check", "status", "max residual", "tolerance",
                  "samples", "gaps");
    out += line;
    for (const auto& c : checks) {
        const char* status = !c.applicable ? "n/a" : (c.passed() ? "pass" : "FAIL");
        if (c.applicable)
            std::snprintf(line, sizeof line, "%-22s %-6s %12.3e %10.1e %8zu %6zu\n", c.name.c_str(), status,
                          c.max_residual, c.tolerance, c.samples, c.gaps);
        else
            std::snprintf(line, sizeof line, "%-22s %-6s %s\n", c.name.c_str(), status, c.note.c_str());
        out += line;
    }
    out += passed() ? "all applicable checks pass\n" : "some checks fail\n";
    return out;
}

VerificationReport run_report(const BakerAkhiezerProblem& problem, const GridSpec& grid, std::uint64_t seed,
                              const CheckTolerances& tol) {
    return run(problem, grid, seed, tol, true);
}

VerificationReport run_report_serial(const BakerAkhiezerProblem& problem, const GridSpec& grid, std::uint64_t seed,
                                     const CheckTolerances& tol) {
    return run(problem, grid, seed, tol, false);
}

}  // namespace bacoord

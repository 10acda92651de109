#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "bacoord/cli/cli.hpp"
#include "bacoord/curve/io.hpp"
#include "json.hpp"

using namespace bacoord;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string dataset(const std::string& name) { return std::string(BACOORD_DATASET_DIR) + "/" + name + ".bacurve"; }

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result bacoord_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bacoord");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(cells);
    }
    return rows;
}

class Scratch {
public:
    Scratch() {
        static int counter = 0;
        dir_ = fs::temp_directory_path() / ("bacoord_cli_test_" + std::to_string(counter++));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;

    fs::path file(const std::string& name) const { return dir_ / name; }

    std::string edited(const std::string& base, const std::function<void(Json&)>& edit) const {
        std::ifstream in(dataset(base));
        Json j = Json::parse(in);
        edit(j);
        const fs::path p = file(base + "_edited.bacurve");
        std::ofstream(p) << j.dump(2);
        return p.string();
    }

    std::string text(const std::string& name, const std::string& content) const {
        const fs::path p = file(name);
        std::ofstream(p) << content;
        return p.string();
    }

    std::size_t entries() const { return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir_), {})); }

private:
    fs::path dir_;
};

}  // namespace

TEST_CASE("validate exit codes") {
    Scratch tmp;
    for (const char* name : {"example1", "example1_lambda12", "example2", "example3", "minimal1d"}) {
        CAPTURE(name);
        CHECK(bacoord_cli({"validate", dataset(name)}).code == 0);
    }
    const Result zero = bacoord_cli({"validate", tmp.edited("example1", [](Json& j) { j["nodes"][0]["lambda"] = 0; })});
    CHECK(zero.code == 1);
    CHECK(zero.err.find("lambda ≠ 0") != std::string::npos);

    const Result broken = bacoord_cli({"validate", tmp.edited("example1", [](Json& j) { j["parameters"]["s"] = 5; })});
    CHECK(broken.code == 1);
    CHECK(broken.out.find("[fail] node residue condition") != std::string::npos);

    CHECK(bacoord_cli({"validate", tmp.file("missing.bacurve").string()}).code == 2);
    CHECK(bacoord_cli({"validate", tmp.text("bad.bacurve", "{\"dimension\": ")}).code == 2);
    CHECK(bacoord_cli({"validate", tmp.text("schema.bacurve", "{\"dimension\": 2}")}).code == 2);

    const Result js = bacoord_cli({"--json", "validate", dataset("example3")});
    CHECK(js.code == 0);
    CHECK(Json::parse(js.out).is_array());
}

TEST_CASE("usage errors and help") {
    CHECK(bacoord_cli({}).code == 2);
    CHECK(bacoord_cli({"frobnicate"}).code == 2);
    CHECK(bacoord_cli({"--help"}).code == 0);
    CHECK(bacoord_cli({"--tol-pt", "-1", "validate", dataset("example1")}).code == 2);
}

TEST_CASE("solve prints one row per flow point") {
    const Result r1 = bacoord_cli({"solve", dataset("example1"), "--u", "0,0"});
    REQUIRE(r1.code == 0);
    const auto rows = csv_rows(r1.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"u1", "u2", "re_x1", "im_x1", "re_x2", "im_x2", "orthogonality_residual",
                                              "status"});
    CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::stod(rows[1][4]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rows[1][7] == "solved");

    const auto r3 = csv_rows(bacoord_cli({"solve", dataset("example3"), "--u", "0,0"}).out);
    CHECK(std::stod(r3[1][2]) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(std::stod(r3[1][4]) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r3[1][2] == "1.3333333333333333");

    const auto neg = csv_rows(bacoord_cli({"solve", dataset("example1"), "--u", "-1,0.5", "--u=0.25,-0.75"}).out);
    REQUIRE(neg.size() == 3);
    CHECK(neg[1][0] == "-1");
    CHECK(neg[2][1] == "-0.75");
}

TEST_CASE("solve over a grid writes the file once and deterministically") {
    Scratch tmp;
    const std::string a = tmp.file("a.csv").string(), b = tmp.file("b.csv").string();
    CHECK(bacoord_cli({"solve", dataset("example1"), "--grid", "-1:1:21,-1:1:21", "--out", a}).code == 0);
    CHECK(bacoord_cli({"--seed", "9", "solve", dataset("example1"), "--grid", "-1:1:21,-1:1:21", "--out", b}).code == 0);
    const std::string text = read_text(a);
    CHECK(csv_rows(text).size() == 442);
    CHECK(text == read_text(b));
    CHECK(tmp.entries() == 2);
}

TEST_CASE("solve reports gaps and bad input") {
    Scratch tmp;
    const std::string dup = tmp.edited("example1", [](Json& j) { j["nodes"][1] = j["nodes"][0]; });
    const Result g = bacoord_cli({"solve", dup, "--grid", "-1:1:2,0:1:2"});
    CHECK(g.code == 1);
    CHECK(g.err.find("node points distinct") != std::string::npos);

    const BakerAkhiezerProblem singular(load_spectral_data(dup));
    std::size_t gaps = 0;
    const auto rows = csv_rows(cli::coordinates_csv(singular, {{-1.0, 0.0}, {1.0, 1.0}}, &gaps));
    CHECK(gaps == 2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "-1");
    CHECK(rows[1].size() == 8);
    CHECK(rows[1][2].empty());
    CHECK(rows[1][6].empty());
    CHECK(rows[1][7] == "gap");

    CHECK(bacoord_cli({"solve", dataset("example1"), "--u", "0,0,0"}).code == 2);
    CHECK(bacoord_cli({"solve", dataset("example1"), "--u", "0,x"}).code == 2);
    CHECK(bacoord_cli({"solve", dataset("example1")}).code == 2);
    CHECK(bacoord_cli({"solve", dataset("example3_solve"), "--u", "0,0"}).code == 1);
    CHECK(bacoord_cli({"--solve-params", "solve", dataset("example3_solve"), "--u", "0,0"}).code == 0);
}

TEST_CASE("verify writes a report and sets the exit code from it") {
    Scratch tmp;
    const std::string path = tmp.file("r.json").string();
    const Result r = bacoord_cli({"verify", dataset("example1"), "--report", path});
    CHECK(r.code == 0);
    CHECK(r.out.find("all applicable checks pass") != std::string::npos);
    const Json j = Json::parse(read_text(path));
    CHECK(j["passed"] == true);
    CHECK(j["grid_size"] == 441);
    CHECK(j["checks"][0]["name"] == "orthogonality");
    CHECK(j["checks"][0]["max_residual"].get<double>() < 1e-8);

    const Json j3 = Json::parse(bacoord_cli({"--json", "verify", dataset("example3")}).out);
    bool lame = false;
    for (const auto& c : j3["checks"])
        if (c["name"] == "lame identity") lame = c["applicable"].get<bool>() && c["passed"].get<bool>();
    CHECK(lame);

    const std::string again = tmp.file("r2.json").string();
    bacoord_cli({"verify", dataset("example1"), "--report", again});
    CHECK(read_text(path) == read_text(again));

    CHECK(bacoord_cli({"verify", dataset("minimal1d"), "--grid", "-1:1:5"}).code == 0);
}

TEST_CASE("verify fails on data that no longer admits the form") {
    Scratch tmp;
    const std::string s = tmp.edited("example1", [](Json& j) { j["parameters"]["s"] = 4.4; });
    const Result r = bacoord_cli({"verify", s});
    CHECK(r.code == 1);
    CHECK(r.err.find("node residue condition") != std::string::npos);
}

TEST_CASE("residue tables") {
    const Result r = bacoord_cli({"residues", dataset("example1_lambda12")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Q residues equal: pass (Res_Q Ω = -1)") != std::string::npos);
    CHECK(r.out.find("node 1 weighted sum: 0") != std::string::npos);

    const Json j = Json::parse(bacoord_cli({"--json", "residues", dataset("example1_lambda12")}).out);
    int q_rows = 0;
    for (const auto& row : j["residues"])
        for (const auto& m : row["marks"])
            if (m.get<std::string>().rfind("Q", 0) == 0) {
                ++q_rows;
                CHECK(row["residue"].get<double>() == doctest::Approx(-1.0));
            }
    CHECK(q_rows == 2);

    const Json j2 = Json::parse(bacoord_cli({"--json", "residues", dataset("example2")}).out);
    bool double_pole = false;
    for (const auto& row : j2["residues"]) double_pole = double_pole || row["order"] == 2;
    CHECK(double_pole);

    CHECK(bacoord_cli({"residues", dataset("example3_solve")}).code == 1);
    const Json j3 = Json::parse(bacoord_cli({"--json", "--solve-params", "residues", dataset("example3_solve")}).out);
    CHECK(j3["q_residue"].get<double>() == doctest::Approx(-1.0 / 9.0));
    CHECK(j3["q_residues_equal"] == "pass");
}

TEST_CASE("coordinate net SVG") {
    Scratch tmp;
    const std::string svg = tmp.file("net.svg").string();
    const Result r = bacoord_cli({"grid", dataset("example1"), "--svg", svg});
    CHECK(r.code == 0);
    const std::string text = read_text(svg);
    std::size_t count = 0;
    for (std::size_t at = text.find("<polyline"); at != std::string::npos; at = text.find("<polyline", at + 1)) ++count;
    CHECK(count == 42);
    CHECK(text.rfind("<svg", 0) == 0);

    CHECK(bacoord_cli({"grid", dataset("example3"), "--grid", "-1:1:5,-1:1:7", "--svg", svg}).code == 0);
    CHECK(bacoord_cli({"grid", dataset("minimal1d")}).code == 1);
    const std::string complex_lambda = tmp.edited("example1", [](Json& j) {
        j["nodes"][0]["lambda"] = Json::array({1, 2});
        j["nodes"][1]["lambda"] = Json::array({1, 2});
    });
    CHECK(bacoord_cli({"grid", complex_lambda}).code == 1);
    const std::string no_tau = tmp.edited("example1", [](Json& j) { j.erase("tau"); });
    CHECK(bacoord_cli({"grid", no_tau}).code == 1);
}

TEST_CASE("gaps break the polylines of the net") {
    const SpectralData d = load_spectral_data(dataset("example1"));
    const BakerAkhiezerProblem p(d);
    std::size_t lines = 0;
    const std::string svg = cli::coordinate_net_svg(p, GridSpec::parse("-1:1:4,-1:1:3"), &lines);
    CHECK(lines == 7);
    CHECK(svg.find("u1-line") != std::string::npos);
    CHECK(svg.find("u2-line") != std::string::npos);
}

TEST_CASE("flow point parsing") {
    CHECK(cli::parse_flow_point("0.5,-1") == FlowPoint{0.5, -1.0});
    CHECK(cli::parse_flow_point("2") == FlowPoint{2.0});
    for (const char* bad : {"", ",", "1,", "a", "1,,2", "1 2", "nan", "1e999"})
        CHECK_THROWS_AS(cli::parse_flow_point(bad), std::invalid_argument);
}

TEST_CASE("atomic writes leave no temporary behind") {
    Scratch tmp;
    const fs::path p = tmp.file("x.txt");
    cli::write_atomically(p, "one");
    cli::write_atomically(p, "two");
    CHECK(read_text(p) == "two");
    CHECK(tmp.entries() == 1);
    CHECK_THROWS(cli::write_atomically(tmp.file("no/such/dir.txt"), "x"));
}

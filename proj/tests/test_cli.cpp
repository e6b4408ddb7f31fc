#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using asode::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "asode");
    std::ostringstream out, err;
    const int code = run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "asode_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

// Value after "key: " on its own line.
double field(const std::string& text, const std::string& key) {
    const std::regex re("(^|\n)" + key + ": ([^\n]+)");
    std::smatch m;
    REQUIRE(std::regex_search(text, m, re));
    return std::stod(m[2].str());
}

}  // namespace

TEST_CASE("solve smoke run") {
    const Outcome o = invoke({"solve", "--problem", "example1", "--tol", "1e-2"});
    CHECK(o.code == 0);
    CHECK(field(o.out, "steps_accepted") > 0);
    CHECK(field(o.out, "t") == 50.0);
    CHECK(o.out.find("phi_evals: ") != std::string::npos);
}

TEST_CASE("unknown problem is a configuration error") {
    const Outcome o = invoke({"solve", "--problem", "nosuch"});
    CHECK(o.code == 1);
    CHECK(o.err.find("unknown problem") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"solve"}).code == 1);
    CHECK(invoke({"solve", "--problem", "example1", "--method", "euler"}).code == 1);
    CHECK(invoke({"solve", "--problem", "example1", "--tol", "-1"}).code == 1);
    CHECK(invoke({"order-study", "--problem", "example1", "--split", "zero"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("numerical failure exits with 2") {
    const Outcome o = invoke({"solve", "--problem", "example1", "--tol", "1e-300"});
    CHECK(o.code == 2);
    CHECK(o.err.find("numerical failure") != std::string::npos);
}

TEST_CASE("trace file") {
    const fs::path trace = temp_file("trace.csv");
    const Outcome o = invoke({"solve", "--problem", "example2", "--tol", "1e-4", "--trace", trace.string()});
    REQUIRE(o.code == 0);
    const std::string csv = read_all(trace);
    CHECK(first_line(csv) == "t,h,err,v,y1,y2,y3");
    std::size_t rows = 0;
    for (char c : csv) rows += (c == '\n');
    CHECK(rows - 1 == static_cast<std::size_t>(field(o.out, "steps_accepted")));
}

TEST_CASE("comparators through solve") {
    for (const char* m : {"merson", "rkf45"}) {
        const Outcome o = invoke({"solve", "--problem", "example4", "--method", m, "--tol", "1e-4"});
        CHECK(o.code == 0);
        CHECK(field(o.out, "y1") == doctest::Approx(0.63976).epsilon(1e-3));
        CHECK(field(o.out, "factorizations") == 0);
    }
}

TEST_CASE("tolerance file") {
    const fs::path file = temp_file("tol.txt");
    {
        std::ofstream f(file);
        f << "# per component\n1e-3 1e-3\n1e-4\n1e-3 1e-2\n";
    }
    CHECK(invoke({"solve", "--problem", "example3", "--tol-file", file.string()}).code == 0);
    {
        std::ofstream f(file);
        f << "1e-3\n";
    }
    CHECK(invoke({"solve", "--problem", "example3", "--tol-file", file.string()}).code == 1);
}

TEST_CASE("config file with command line override") {
    const fs::path cfg = temp_file("run.ini");
    {
        std::ofstream f(cfg);
        f << "[solve]\nproblem=example3\ntol=1e-2\n";
    }
    const Outcome from_file = invoke({"--config", cfg.string(), "solve"});
    CHECK(from_file.code == 0);
    CHECK(from_file.out.find("problem: example3") != std::string::npos);
    const Outcome overridden = invoke({"--config", cfg.string(), "solve", "--problem", "example4"});
    CHECK(overridden.code == 0);
    CHECK(overridden.out.find("problem: example4") != std::string::npos);
    {
        std::ofstream f(cfg);
        f << "[solve]\nproblem=example3\nbogus=1\n";
    }
    CHECK(invoke({"--config", cfg.string(), "solve"}).code == 1);
}

TEST_CASE("output is deterministic") {
    const auto a = invoke({"solve", "--problem", "example4", "--tol", "1e-3"});
    const auto b = invoke({"solve", "--problem", "example4", "--tol", "1e-3"});
    CHECK(a.out == b.out);
}

TEST_CASE("order study slopes") {
    const Outcome o = invoke({"order-study"});
    REQUIRE(o.code == 0);
    CHECK(field(o.out, "slope") == doctest::Approx(3.0).epsilon(0.1));
    CHECK(field(o.out, "embedded_slope") == doctest::Approx(3.0).epsilon(0.1));

    const Outcome m = invoke({"order-study", "--method", "merson"});
    REQUIRE(m.code == 0);
    CHECK(field(m.out, "slope") == doctest::Approx(4.0).epsilon(0.3 / 4.0));

    const fs::path csv = temp_file("order.csv");
    CHECK(invoke({"order-study", "--split", "diagonal", "--csv", csv.string()}).code == 0);
    CHECK(first_line(read_all(csv)) == "steps,h,error,embedded_gap");
}

TEST_CASE("stability region csv") {
    const fs::path csv = temp_file("region.csv");
    REQUIRE(invoke({"stability-region", "--nx", "3", "--nz", "2", "--csv", csv.string()}).code == 0);
    const std::string text = read_all(csv);
    CHECK(first_line(text) == "z\\x,-3,-1.5,0");
    // last row is z = 0; the x = 0 cell is exactly 1
    CHECK(text.find("\n0,") != std::string::npos);
    CHECK(text.substr(text.rfind(',', text.size() - 2) + 1) == "1\n");

    const fs::path mask = temp_file("mask.csv");
    REQUIRE(invoke({"stability-region", "--nx", "3", "--nz", "2", "--csv", csv.string(), "--mask",
                    mask.string()})
                .code == 0);
    const std::string m = read_all(mask);
    CHECK(m.find("\n0,0,1,1") != std::string::npos);
}

TEST_CASE("coefficient csv") {
    const fs::path csv = temp_file("coeffs.csv");
    const Outcome o = invoke({"coeffs", "--csv", csv.string()});
    REQUIRE(o.code == 0);
    const std::string text = read_all(csv);
    CHECK(first_line(text) == "name,value,residual_group");
    CHECK(text.find("\na,0.57281606248213") != std::string::npos);
    CHECK(text.find("\nresidual,") != std::string::npos);
    CHECK(field(o.out, "max \\|residual\\|") < 1e-12);
    CHECK(invoke({"coeffs", "--a", "0"}).code == 1);
}

#include "phtree/cli.hpp"
#include "phtree/report.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace phtree;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "phtree");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("phtree_test_" + name);
}

} // namespace

TEST_CASE("format_double and canonical_json") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(1.0 / 3) == "0.33333333333333331");
    const json j = {{"b", 1.0 / 3}, {"a", {{"z", 1}, {"y", std::nan("")}}}};
    const auto text = canonical_json(j);
    CHECK(text.find("\"a\"") < text.find("\"b\""));
    CHECK(text.find("\"y\"") < text.find("\"z\""));
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(text.find("null") != std::string::npos);
    CHECK(text.back() == '\n');
    CHECK(json::parse(text)["b"].get<double>() == 1.0 / 3);
}

TEST_CASE("report schemas") {
    const auto dim = to_json(fatou_dimension(GameParams(3, 0.5, 0.5)));
    for (const char* key : {"gamma", "objective", "dimension", "m", "alpha", "beta"}) CHECK(dim.contains(key));

    const auto est = estimate_value(Vertex(3), Strategy::fixed_digit(0), Strategy::fixed_digit(2),
                                    BoundarySpec::linear(), GameParams(3, 0.5, 0.5), 5, 10, 1);
    const auto ej = to_json(est);
    for (const char* key : {"mean", "std_error", "plays", "truncation_error"}) CHECK(ej.contains(key));

    std::ostringstream csv;
    write_field_csv(build_un(BoundarySpec::linear(), GameParams(3, 0.5, 0.5), 2), csv);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "level,index,psi_left,value");
    std::size_t rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == 1 + 3 + 9);

    std::ostringstream dcsv;
    write_csv(fatou_dimension(GameParams(3, 1, 0)), dcsv);
    CHECK(dcsv.str().rfind("m,alpha,beta,gamma,exponent_neg,exponent_pos,objective,dimension\n", 0) == 0);
}

TEST_CASE("field CSV round trip keeps check_field") {
    for (double a : {0.0, 0.5, 1.0}) {
        const GameParams p(3, a, 1 - a);
        auto field = build_un(BoundarySpec::quadratic_centered(), p, 4);
        field.levels[2][5] += 0.01;
        std::stringstream io;
        write_field_csv(field, io);
        const auto back = read_field_csv(io, p);
        CHECK(back.levels == field.levels);
        const auto c1 = check_field(field, p);
        const auto c2 = check_field(back, p);
        CHECK(c1.max_abs_residual == c2.max_abs_residual);
        CHECK(c1.worst_vertex == c2.worst_vertex);
        CHECK(c1.classification == c2.classification);
    }
    std::istringstream broken("level,index,psi_left,value\n0,0,0,1\n1,0,0,1\n");
    CHECK_THROWS(read_field_csv(broken, GameParams(3, 0.5, 0.5)));
}

TEST_CASE("cli solve example") {
    const auto r = run({"solve", "--m", "3", "--alpha", "0.5", "--beta", "0.5", "--boundary", "linear", "--n", "2",
                        "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["root_value"].get<double>() == doctest::Approx(4.0 / 9).epsilon(1e-15));
    CHECK(j["n"] == 2);
    CHECK(j["levels"].size() == 3);
    CHECK(j["levels"][1][2].get<double>() == doctest::Approx(7.0 / 9).epsilon(1e-15));
    CHECK(j["params"]["m"] == 3);

    const auto tol = run({"solve", "--m", "3", "--alpha", "0.5", "--tol", "0.02"});
    REQUIRE(tol.code == kExitOk);
    CHECK(json::parse(tol.out)["n"] == 4);

    const auto csv = run({"solve", "--m", "3", "--alpha", "0.5", "--n", "2", "--format", "csv"});
    REQUIRE(csv.code == kExitOk);
    CHECK(csv.out.rfind("level,index,psi_left,value\n", 0) == 0);
}

TEST_CASE("cli dim and ucp examples") {
    const auto d = run({"dim", "--m", "3", "--alpha", "0", "--beta", "1"});
    REQUIRE(d.code == kExitOk);
    CHECK(json::parse(d.out)["dimension"].get<double>() == 1.0);

    const auto o = run({"dim", "--m", "3", "--alpha", "1", "--oracle"});
    REQUIRE(o.code == kExitOk);
    const auto oj = json::parse(o.out);
    CHECK(std::abs(oj["oracle"]["min_value"].get<double>() - oj["objective"].get<double>()) <= 1e-6);

    const auto u = run({"ucp", "--set", "rho:1,4,1,8,1,16", "--m", "3", "--alpha", "0.5", "--beta", "0.5", "--kmax",
                        "6"});
    REQUIRE(u.code == kExitOk);
    const auto uj = json::parse(u.out);
    CHECK(uj["rho"] == json::array({1, 4, 1, 8, 1, 16}));
    CHECK(uj["verdict"] == "UCP-certified");
}

TEST_CASE("cli simulate report") {
    const auto s = run({"simulate", "--m", "3", "--alpha", "0.5", "--plays", "500", "--seed", "4", "--depth", "10"});
    REQUIRE(s.code == kExitOk);
    const auto j = json::parse(s.out);
    for (const char* key : {"mean", "std_error", "plays", "truncation_error"}) CHECK(j.contains(key));
    CHECK(j["plays"] == 500);
    CHECK(j["truncation_error"].get<double>() == doctest::Approx(std::pow(3.0, -10)));
}

TEST_CASE("cli output is byte reproducible") {
    const std::vector<std::vector<std::string>> configs{
        {"solve", "--m", "3", "--alpha", "0.3", "--boundary", "quadratic-centered", "--n", "4"},
        {"simulate", "--m", "3", "--alpha", "0.5", "--plays", "2000", "--seed", "11"},
        {"ucp", "--set", "last-digit:0", "--m", "3", "--alpha", "0.5", "--depth", "10"},
        {"dim", "--m", "5", "--alpha", "0.25", "--format", "csv"},
    };
    for (const auto& c : configs) {
        const auto a = run(c);
        const auto b = run(c);
        CHECK(a.code == kExitOk);
        CHECK(a.out == b.out);
    }

    const auto path = temp_file("solve.json");
    const auto w1 = run({"solve", "--m", "3", "--alpha", "0.5", "--n", "3", "--output", path.string()});
    REQUIRE(w1.code == kExitOk);
    std::ifstream f1(path, std::ios::binary);
    const std::string first((std::istreambuf_iterator<char>(f1)), {});
    run({"solve", "--m", "3", "--alpha", "0.5", "--n", "3", "--output", path.string()});
    std::ifstream f2(path, std::ios::binary);
    const std::string second((std::istreambuf_iterator<char>(f2)), {});
    CHECK(!first.empty());
    CHECK(first == second);
    std::filesystem::remove(path);
}

TEST_CASE("cli exit codes and messages") {
    const auto bad_sum = run({"solve", "--m", "3", "--alpha", "0.5", "--beta", "0.6"});
    CHECK(bad_sum.code == kExitValidation);
    CHECK(bad_sum.err.find("--alpha/--beta") != std::string::npos);

    const auto bad_boundary = run({"solve", "--m", "3", "--alpha", "0.5", "--boundary", "cubic"});
    CHECK(bad_boundary.code == kExitValidation);
    CHECK(bad_boundary.err.find("--boundary") != std::string::npos);

    const auto bad_set = run({"ucp", "--m", "3", "--alpha", "0.5", "--set", "stripes:3"});
    CHECK(bad_set.code == kExitValidation);
    CHECK(bad_set.err.find("--set") != std::string::npos);

    const auto bad_m = run({"dim", "--m", "1", "--alpha", "0.5"});
    CHECK(bad_m.code == kExitValidation);
    CHECK(bad_m.err.find("--m") != std::string::npos);

    CHECK(run({"dim", "--alpha", "0.5"}).code == kExitValidation);
    CHECK(run({"frobnicate"}).code == kExitValidation);

    const auto big = run({"solve", "--m", "10", "--alpha", "0.5", "--n", "12"});
    CHECK(big.code == kExitCapacity);
    CHECK(big.err.find("PHTREE_SIZE_CAP") != std::string::npos);

    const auto missing = run({"solve", "--m", "3", "--alpha", "0.5", "--boundary-file", "/nonexistent/f.csv"});
    CHECK(missing.code == kExitValidation);
    CHECK(missing.err.find("--boundary-file") != std::string::npos);

    const auto unwritable = run({"dim", "--m", "3", "--alpha", "0.5", "--output", "/nonexistent/dir/out.json"});
    CHECK(unwritable.code == kExitIo);
}

TEST_CASE("cli honours PHTREE_SIZE_CAP") {
    ::setenv("PHTREE_SIZE_CAP", "100", 1);
    const auto capped = run({"solve", "--m", "3", "--alpha", "0.5", "--n", "5"});
    const auto bad = [] {
        ::setenv("PHTREE_SIZE_CAP", "lots", 1);
        return run({"solve", "--m", "3", "--alpha", "0.5", "--n", "2"});
    }();
    ::unsetenv("PHTREE_SIZE_CAP");
    CHECK(capped.code == kExitCapacity);
    CHECK(bad.code == kExitValidation);
    CHECK(run({"solve", "--m", "3", "--alpha", "0.5", "--n", "5"}).code == kExitOk);
}

TEST_CASE("cli boundary file") {
    const auto path = temp_file("boundary.csv");
    {
        std::ofstream f(path);
        f << "t,value\n0,0\n0.5,1\n1,0\n";
    }
    const auto r = run({"solve", "--m", "3", "--alpha", "0", "--boundary-file", path.string(), "--n", "6"});
    std::filesystem::remove(path);
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["root_value"].get<double>() == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(j["certified"] == true);
}

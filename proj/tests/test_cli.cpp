#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mixedpde/cli.hpp"

using namespace mixedpde;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "mixedpde");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("mixedpde_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("solve from a config file writes all outputs deterministically") {
    const auto dir = scratch("solve");
    write(dir / "c.toml",
          "s = 1\nn = 1\na_over_pi = \"1\"\nphi = [\"sin(x) + 0.3*sin(2*x)\"]\npsi = [\"0\"]\nK = 10\n");
    const auto first = run({"solve", "--config", (dir / "c.toml").string(), "-o", (dir / "a").string()});
    REQUIRE(first.code == kExitOk);
    const auto second = run({"solve", "--config", (dir / "c.toml").string(), "-o", (dir / "b").string()});
    REQUIRE(second.code == kExitOk);
    for (const char* f : {"solution.csv", "metadata.json", "denominator.json", "residual.json"}) {
        CHECK(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto meta = nlohmann::json::parse(slurp(dir / "a" / "metadata.json"));
    CHECK(meta["modes_used"] == 2);
    CHECK(meta["verdict"] == "separated-with-delta1");
    CHECK(slurp(dir / "a" / "solution.csv").rfind("x,y,u\n", 0) == 0);
}

TEST_CASE("command line overrides config values") {
    const auto dir = scratch("override");
    write(dir / "c.toml", "a_over_pi = \"1\"\nphi = [\"sin(x)\"]\nK = 4\n");
    const auto r = run({"solve", "--config", (dir / "c.toml").string(), "--a-over-pi", "1/4", "-o", dir.string()});
    REQUIRE(r.code == kExitOk);
    const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
    CHECK(meta["verdict"] == "not-guaranteed");
    CHECK(meta["modes_requested"] == 4);
}

TEST_CASE("invalid problems exit with the validation code") {
    const auto dir = scratch("invalid");
    write(dir / "bad.toml", "s = 3\nn = 2\na_over_pi = \"1\"\n");
    const auto r = run({"solve", "--config", (dir / "bad.toml").string(), "-o", dir.string()});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("b = s/n") != std::string::npos);
    CHECK(fs::exists(dir / "error.json"));

    write(dir / "extra.toml", "a_over_pi = \"1\"\nnonsense = 3\n");
    CHECK(run({"solve", "--config", (dir / "extra.toml").string(), "-o", dir.string()}).code == kExitValidation);
    CHECK(run({"solve", "-o", dir.string()}).code == kExitValidation);
    CHECK(run({"solve", "--bogus"}).code == kExitValidation);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("singular modes carrying data exit with their own code") {
    const auto dir = scratch("singular");
    const auto r = run({"solve", "--n", "2", "--s", "2", "--q", "1", "--a-over-pi", "1/2", "--tol-singular", "1e-6",
                        "--phi", "sin(9*x)", "--phi", "0", "--psi", "0", "--psi", "0", "-o", dir.string()});
    CHECK(r.code == kExitSingularWithData);
    const auto ok = run({"solve", "--n", "2", "--s", "2", "--q", "1", "--a-over-pi", "1/2", "--tol-singular", "1e-6",
                         "--phi", "sin(2*x)", "--phi", "0", "--psi", "0", "--psi", "0", "-o", dir.string()});
    CHECK(ok.code == kExitOk);
    CHECK_FALSE(fs::exists(dir / "error.json"));
    CHECK(nlohmann::json::parse(slurp(dir / "metadata.json"))["nonunique"] == true);
}

TEST_CASE("denominator subcommand") {
    const auto sep = run({"denominator", "--2n", "4", "--gamma", "1", "--q", "1", "--a-ratio", "1/1"});
    CHECK(sep.code == kExitOk);
    CHECK(sep.out.find("separated") != std::string::npos);
    CHECK(run({"denominator", "--2n", "3", "--a-ratio", "1/1"}).code == kExitNotTabulated);
    CHECK(run({"denominator", "--2n", "4", "--gamma", "3", "--a-ratio", "1/1"}).code == kExitNotTabulated);

    const auto dir = scratch("denominator");
    const auto scan = run({"denominator", "--2n", "4", "--tau", "sqrt2", "--kmax", "2000", "-o",
                           (dir / "d.json").string()});
    CHECK(scan.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "d.json"));
    CHECK(j.contains("continued_fraction"));
}

TEST_CASE("verify and eigs subcommands") {
    const auto dir = scratch("verify");
    const auto v = run({"verify", "--a-over-pi", "1", "--phi", "sin(x)", "--K", "4", "--residual-grid", "51", "-o",
                        dir.string()});
    CHECK(v.code == kExitOk);
    CHECK(v.out.find("FAIL") == std::string::npos);
    CHECK(fs::exists(dir / "residual.json"));

    const auto e = run({"eigs", "--p0", "1", "--K", "5", "-o", dir.string()});
    CHECK(e.code == kExitOk);
    CHECK(fs::exists(dir / "eigs.csv"));
}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"
#include "tlf/version.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result tool(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = tlf::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string golden(const std::string& name) { return slurp(fs::path(TLF_GOLDEN_DIR) / name); }

std::string scratch(const std::string& name) { return (fs::path(TLF_SCRATCH_DIR) / name).string(); }

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// Header and shape must match exactly; numbers to `tol` relative, so that a
// different libm cannot break the schema check.
void check_csv(const std::string& actual, const std::string& expected, double tol) {
    const auto a = split_csv(actual);
    const auto e = split_csv(expected);
    REQUIRE(a.size() == e.size());
    REQUIRE(!a.empty());
    CHECK(a.front() == e.front());
    for (std::size_t r = 1; r < a.size(); ++r) {
        REQUIRE(a[r].size() == e[r].size());
        for (std::size_t c = 0; c < a[r].size(); ++c) {
            CAPTURE(e.front()[c]);
            const double x = std::stod(a[r][c]);
            const double y = std::stod(e[r][c]);
            if (y == 0.0) {
                CHECK(x == 0.0);
            } else {
                CHECK_REL(x, y, tol);
            }
        }
    }
}

void check_json(const json& a, const json& e, double tol) {
    REQUIRE(a.type() == e.type());
    if (e.is_object()) {
        REQUIRE(a.size() == e.size());
        for (const auto& [key, value] : e.items()) {
            CAPTURE(key);
            REQUIRE(a.contains(key));
            check_json(a[key], value, tol);
        }
    } else if (e.is_array()) {
        REQUIRE(a.size() == e.size());
        for (std::size_t i = 0; i < e.size(); ++i) check_json(a[i], e[i], tol);
    } else if (e.is_number_float()) {
        CHECK_REL(a.get<double>(), e.get<double>(), tol);
    } else {
        CHECK(a == e);
    }
}

const std::vector<std::string> kCumulantsMs{"cumulants", "--alpha", "1", "--gamma", "1",
                                            "--ell", "100", "--truncation", "ms"};

std::vector<std::string> simulate_args(const std::string& prefix, const std::string& threads) {
    return {"simulate", "--alpha", "1.5", "--gamma", "1", "--ell", "50", "--truncation", "exp",
            "--steps", "16", "--walkers", "2000", "--seed", "42", "--record", "1,4,16",
            "--out", prefix, "--threads", threads};
}

}  // namespace

TEST_CASE("golden outputs") {
    auto r = tool(kCumulantsMs);
    CHECK(r.code == 0);
    check_csv(r.out, golden("cumulants_ms.csv"), 1e-12);

    r = tool({"cumulants", "--alpha", "1.5", "--gamma", "2", "--ell", "300", "--truncation", "pexp", "--h", "0.5",
              "--orders", "2,4,6,8", "--format", "json"});
    CHECK(r.code == 0);
    check_json(json::parse(r.out), json::parse(golden("cumulants_pexp.json")), 1e-12);

    r = tool({"regime", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "exp"});
    CHECK(r.code == 0);
    check_csv(r.out, golden("regime_exp.csv"), 1e-12);

    r = tool({"regime", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "pexp", "--h", "0.5",
              "--format", "json"});
    CHECK(r.code == 0);
    check_json(json::parse(r.out), json::parse(golden("regime_pexp.json")), 1e-12);

    r = tool({"returns", "--alpha", "1.5", "--gamma", "1", "--n-list", "1,2,4,8"});
    CHECK(r.code == 0);
    check_csv(r.out, golden("returns.csv"), 1e-12);

    r = tool({"returns", "--alpha", "1", "--gamma", "2", "--n-list", "1,10", "--format", "json"});
    CHECK(r.code == 0);
    check_json(json::parse(r.out), json::parse(golden("returns.json")), 1e-12);

    r = tool({"oracle", "--alpha", "1", "--truncation", "ms", "--order", "2", "--eps-list", "0.01,0.001"});
    CHECK(r.code == 0);
    check_csv(r.out, golden("oracle_ms.csv"), 1e-9);
}

TEST_CASE("CSV headers") {
    const auto header = [](const std::string& text) { return text.substr(0, text.find('\n')); };
    CHECK(header(tool(kCumulantsMs).out) == "j,mu_j,kappa_j,lambda_j,a_alpha,epsilon");
    CHECK(header(tool({"regime", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms"}).out) ==
          "diffusion,n_gauss,n_levy_max,epsilon");
    CHECK(header(tool({"returns", "--alpha", "1", "--gamma", "1", "--n-list", "1"}).out) == "n,return_density");
    CHECK(header(tool({"oracle", "--alpha", "1", "--truncation", "exp", "--order", "2", "--eps-list", "0.01"})
                     .out) == "epsilon,kappa_numeric,kappa_asymptotic,rel_error");

    const std::string prefix = scratch("header");
    REQUIRE(tool(simulate_args(prefix, "1")).code == 0);
    CHECK(header(slurp(prefix + ".stats.csv")) ==
          "n,variance,variance_se,kurtosis,kurtosis_se,return_density,return_density_se,count");
}

TEST_CASE("JSON output round-trips byte for byte") {
    for (const auto& name : {"cumulants_pexp.json", "regime_pexp.json", "returns.json"}) {
        CAPTURE(name);
        const std::string text = golden(name);
        CHECK(json::parse(text).dump(2) + "\n" == text);
    }
    const auto r = tool({"regime", "--alpha", "0.7", "--gamma", "0.3", "--ell", "1234.5", "--truncation", "exp",
                         "--format", "json"});
    CHECK(json::parse(r.out).dump(2) + "\n" == r.out);
    const json parsed = json::parse(r.out);
    CHECK(json::parse(parsed.dump(2)) == parsed);
}

TEST_CASE("exit codes") {
    CHECK(tool(kCumulantsMs).code == 0);
    CHECK(tool({"--version"}).code == 0);
    CHECK(tool({"--version"}).out == std::string(tlf::kVersion) + "\n");
    CHECK(tool({"--help"}).code == 0);

    // Validation.
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"cumulants", "--alpha", "2.5", "--gamma", "1", "--ell", "100", "--truncation", "exp"},
             {"cumulants", "--alpha", "1", "--gamma", "-1", "--ell", "100", "--truncation", "exp"},
             {"cumulants", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "gauss"},
             {"cumulants", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "pexp"},
             {"cumulants", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--orders", "3"},
             {"cumulants", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--orders", "10"},
             {"cumulants", "--alpha", "1", "--gamma", "1", "--truncation", "ms"},
             {"cumulants", "--alpha", "x", "--gamma", "1", "--ell", "100", "--truncation", "ms"},
             {"regime", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--format", "xml"},
             {"oracle", "--alpha", "1", "--truncation", "ms", "--order", "8", "--eps-list", "0.01"},
             {"oracle", "--alpha", "1", "--truncation", "ms", "--order", "2", "--eps-list", "0.5"},
             {"oracle", "--alpha", "1", "--truncation", "ms", "--order", "2", "--eps-list", "0.01,abc"},
             {"returns", "--alpha", "1", "--gamma", "1", "--n-list", "0"},
             {"simulate", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--steps", "5",
              "--walkers", "10", "--seed", "1", "--record", "5", "--out", scratch("small")},
             {"simulate", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--steps", "5",
              "--walkers", "200", "--seed", "1", "--record", "6", "--out", scratch("range")},
             {"frobnicate"},
             {},
         }) {
        CAPTURE(args.empty() ? std::string("<none>") : args.front());
        const auto r = tool(args);
        CHECK(r.code == tlf::cli::kExitValidation);
        CHECK(!r.err.empty());
    }

    // Numerical failures.
    auto r = tool({"cumulants", "--alpha", "0.5", "--gamma", "1", "--ell", "1e300", "--truncation", "exp"});
    CHECK(r.code == tlf::cli::kExitNumerical);
    r = tool({"oracle", "--alpha", "0.05", "--truncation", "pexp", "--h", "0.05", "--order", "6", "--eps-list", "1e-8"});
    CHECK(r.code == tlf::cli::kExitNumerical);
    CHECK(r.err.find("epsilon 1e-08") != std::string::npos);

    // I/O failures.
    r = tool({"simulate", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--steps", "2",
              "--walkers", "100", "--seed", "1", "--record", "2", "--out", "/nonexistent-dir/run"});
    CHECK(r.code == tlf::cli::kExitIo);
    r = tool({"regime", "--config", scratch("missing.json")});
    CHECK(r.code == tlf::cli::kExitIo);
    r = tool({"regime", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--manifest",
              "/nonexistent-dir/m.json"});
    CHECK(r.code == tlf::cli::kExitIo);
}

TEST_CASE("warnings go to stderr") {
    const auto r = tool({"regime", "--alpha", "1", "--gamma", "1", "--ell", "5", "--truncation", "ms"});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: ") == 0);
    CHECK(r.out.find("diffusion") == 0);
}

TEST_CASE("simulate is seed-deterministic") {
    const std::string a = scratch("det_a");
    const std::string b = scratch("det_b");
    const std::string c = scratch("det_c");
    REQUIRE(tool(simulate_args(a, "1")).code == 0);
    REQUIRE(tool(simulate_args(b, "1")).code == 0);
    REQUIRE(tool(simulate_args(c, "3")).code == 0);
    const std::string stats = slurp(a + ".stats.csv");
    CHECK(stats == slurp(b + ".stats.csv"));
    CHECK(stats == slurp(c + ".stats.csv"));
    CHECK(split_csv(stats).size() == 4);

    auto other = simulate_args(scratch("det_d"), "1");
    other[14] = "43";
    REQUIRE(tool(other).code == 0);
    CHECK(slurp(scratch("det_d") + ".stats.csv") != stats);
}

TEST_CASE("simulate manifest") {
    const std::string prefix = scratch("manifest");
    const auto r = tool(simulate_args(prefix, "1"));
    REQUIRE(r.code == 0);
    CHECK(r.out == prefix + ".stats.csv\n" + prefix + ".manifest.json\n");
    const json m = json::parse(slurp(prefix + ".manifest.json"));
    CHECK(m.at("command") == "simulate");
    CHECK(m.at("seed") == 42);
    CHECK(m.at("version") == tlf::kVersion);
    const std::string ts = m.at("timestamp");
    CHECK(ts.size() == 20);
    CHECK(ts.back() == 'Z');
    CHECK(ts[10] == 'T');
    const json& p = m.at("params");
    CHECK(p.at("alpha") == 1.5);
    CHECK(p.at("truncation") == "exp");
    CHECK(p.at("walkers") == 2000);
    CHECK(p.at("record") == json::array({1, 4, 16}));

    // A manifest is a valid config and reproduces the run.
    const std::string rerun = scratch("manifest_rerun");
    REQUIRE(tool({"simulate", "--config", prefix + ".manifest.json", "--out", rerun}).code == 0);
    CHECK(slurp(rerun + ".stats.csv") == slurp(prefix + ".stats.csv"));
}

TEST_CASE("optional manifest for table commands") {
    const std::string path = scratch("regime_manifest.json");
    fs::remove(path);
    const auto r = tool({"regime", "--alpha", "1", "--gamma", "1", "--ell", "100", "--truncation", "ms", "--manifest",
                         path});
    REQUIRE(r.code == 0);
    const json m = json::parse(slurp(path));
    CHECK(m.at("command") == "regime");
    CHECK(m.at("seed").is_null());
    CHECK(m.at("params").at("ell") == 100.0);
}

TEST_CASE("config file precedence") {
    const std::string path = scratch("config.json");
    {
        std::ofstream f(path);
        f << R"({"alpha": 1, "gamma": 1, "ell": 100, "truncation": "exp", "format": "json"})";
    }
    const auto from_config = tool({"regime", "--config", path});
    REQUIRE(from_config.code == 0);
    CHECK(json::parse(from_config.out).at("epsilon") == 0.01);

    const auto explicit_wins = tool({"regime", "--config", path, "--ell", "1000", "--format", "csv"});
    REQUIRE(explicit_wins.code == 0);
    CHECK(explicit_wins.out.find("diffusion,") == 0);
    CHECK(explicit_wins.out.find(",0.001\n") != std::string::npos);

    {
        std::ofstream f(scratch("bad_key.json"));
        f << R"({"alpha": 1, "colour": "red"})";
    }
    CHECK(tool({"regime", "--config", scratch("bad_key.json"), "--gamma", "1", "--ell", "100", "--truncation", "ms"})
              .code == tlf::cli::kExitValidation);
    {
        std::ofstream f(scratch("not_json.json"));
        f << "{alpha";
    }
    CHECK(tool({"regime", "--config", scratch("not_json.json")}).code == tlf::cli::kExitValidation);
}

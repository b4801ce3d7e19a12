#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlf/cumulant_engine.hpp"
#include "tlf/diagnostics.hpp"
#include "tlf/errors.hpp"
#include "tlf/montecarlo.hpp"
#include "tlf/oracle.hpp"
#include "tlf/version.hpp"

namespace tlf::cli {
namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::vector<T> parse_list(const std::string& text, std::string_view what) {
    std::vector<T> values;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string item(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        T v{};
        bool ok = false;
        if constexpr (std::is_floating_point_v<T>) {
            char* end = nullptr;
            v = std::strtod(item.c_str(), &end);
            ok = !item.empty() && end == item.c_str() + item.size();
        } else {
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            ok = ec == std::errc{} && ptr == item.data() + item.size();
        }
        if (!ok) throw DomainError(std::string(what) + ": cannot parse '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw DomainError(std::string(what) + " must not be empty");
    return values;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json manifest(const std::string& command, const json& params, const json& seed) {
    return {{"command", command},
            {"params", params},
            {"seed", seed},
            {"version", kVersion},
            {"timestamp", utc_timestamp()}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing " + path);
}

// JSON config -> command-line tokens. A run manifest is accepted too, in
// which case its "params" object is used.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file " + path);
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::parse_error& e) {
        throw DomainError("config " + path + " is not valid JSON: " + e.what());
    }
    if (cfg.is_object() && cfg.contains("command") && cfg.contains("params")) cfg = cfg["params"];
    if (!cfg.is_object()) throw DomainError("config " + path + " must hold a JSON object");

    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config") throw DomainError("config files cannot nest --config");
        std::string text;
        auto scalar = [&key](const json& v) -> std::string {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
            if (v.is_number_float()) return fmt(v.get<double>());
            throw DomainError("config key '" + key + "' has an unsupported value type");
        };
        if (value.is_null()) continue;
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) text += (i ? "," : "") + scalar(value[i]);
        } else {
            text = scalar(value);
        }
        tokens.push_back("--" + key);
        tokens.push_back(text);
    }
    return tokens;
}

struct ModelArgs {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double gamma = 1.0;
    double ell = std::numeric_limits<double>::quiet_NaN();
    std::string truncation;
    std::optional<double> h;

    void add_to(CLI::App& app, bool with_ell) {
        app.add_option("--alpha", alpha, "Index of stability in (0, 2)")->required();
        app.add_option("--gamma", gamma, "Spatial scale of the stable law")->required();
        if (with_ell) app.add_option("--ell", ell, "Truncation scale l")->required();
        app.add_option("--truncation", truncation, "Deformation family: ms, exp or pexp")->required();
        app.add_option("--h", h, "Shape parameter of the pexp family");
    }

    DeformationSpec shape(double scale) const {
        const auto family = parse_family(truncation);
        if (!family) throw DomainError("unknown truncation '" + truncation + "' (expected ms, exp or pexp)");
        switch (*family) {
            case TruncationFamily::MantegnaStanley:
                return DeformationSpec::mantegna_stanley(scale);
            case TruncationFamily::Exponential:
                return DeformationSpec::exponential(scale);
            case TruncationFamily::PowerExponential:
                if (!h) throw DomainError("--h is required for --truncation pexp");
                return DeformationSpec::power_exponential(scale, *h);
            case TruncationFamily::Custom:
                break;
        }
        throw DomainError("custom deformations are not available from the command line");
    }

    TlfModel model() const { return TlfModel(StableParams(alpha, gamma), shape(ell)); }

    json params() const {
        json p = {{"alpha", alpha}, {"gamma", gamma}, {"truncation", truncation}};
        if (!std::isnan(ell)) p["ell"] = ell;
        if (h) p["h"] = *h;
        return p;
    }
};

struct Output {
    std::string format = "csv";
    std::string manifest_path;

    void add_to(CLI::App& app) {
        app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        app.add_option("--manifest", manifest_path, "Also write a run manifest to this path");
    }

    bool csv() const { return format == "csv"; }

    void finish(const std::string& command, const json& params) const {
        if (!manifest_path.empty()) write_file(manifest_path, dump(manifest(command, params, nullptr)));
    }
};

void check_orders(const std::vector<int>& orders) {
    for (int j : orders) {
        if (j < 2 || j > kMaxCumulantOrder || j % 2 != 0) {
            throw DomainError("cumulant orders must be even and lie in [2, " +
                              std::to_string(kMaxCumulantOrder) + "], got " + std::to_string(j));
        }
    }
}

int execute(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    // Pull --config out of the arguments and splice its contents in front of
    // the explicit flags; with take-last semantics the explicit flags win.
    std::vector<std::string> args;
    std::optional<std::string> config_path;
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
        const std::string& a = raw_args[i];
        if (a == "--config") {
            if (i + 1 >= raw_args.size()) throw DomainError("--config needs a path");
            config_path = raw_args[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
        } else {
            args.push_back(a);
        }
    }
    if (config_path) {
        if (args.empty()) throw DomainError("--config needs a subcommand");
        const auto tokens = config_tokens(*config_path);
        args.insert(args.begin() + 1, tokens.begin(), tokens.end());
    }

    CLI::App app{"Cumulant theory, oracles and simulation of truncated Levy flights", "tlf"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    // "-h" would clash with the pexp shape flag --h.
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.add_option("--config", "JSON file of flag values; explicit flags take precedence");

    ModelArgs model_args;
    Output output;
    std::string orders_text = "2,4,6";
    int order = 0;
    std::string eps_text;
    std::string n_text;
    std::int64_t steps = 0;
    std::int64_t walkers = 0;
    std::uint64_t seed = 0;
    std::string record_text;
    std::string out_prefix;
    unsigned threads = 0;

    auto* cumulants = app.add_subcommand("cumulants", "Closed-form cumulant table");
    model_args.add_to(*cumulants, true);
    cumulants->add_option("--orders", orders_text, "Comma-separated even orders");
    output.add_to(*cumulants);

    auto* regime = app.add_subcommand("regime", "Diffusion coefficient and regime thresholds");
    model_args.add_to(*regime, true);
    output.add_to(*regime);

    auto* oracle = app.add_subcommand("oracle", "Quadrature cumulants against the asymptotic forms");
    oracle->add_option("--alpha", model_args.alpha, "Index of stability in (0, 2)")->required();
    oracle->add_option("--gamma", model_args.gamma, "Spatial scale (default 1)");
    oracle->add_option("--truncation", model_args.truncation, "Deformation family: ms, exp or pexp")
        ->required();
    oracle->add_option("--h", model_args.h, "Shape parameter of the pexp family");
    oracle->add_option("--order", order, "Cumulant order: 2, 4 or 6")->required();
    oracle->add_option("--eps-list", eps_text, "Comma-separated epsilon values in (0, 0.1]")->required();
    output.add_to(*oracle);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble of walks");
    model_args.add_to(*simulate, true);
    simulate->add_option("--steps", steps, "Number of steps per walk")->required();
    simulate->add_option("--walkers", walkers, "Number of walkers")->required();
    simulate->add_option("--seed", seed, "Master seed")->required();
    simulate->add_option("--record", record_text, "Comma-separated step counts to record")->required();
    simulate->add_option("--out", out_prefix, "Output path prefix")->required();
    simulate->add_option("--threads", threads, "Worker threads (0: all cores); results do not depend on it");

    auto* returns = app.add_subcommand("returns", "Levy-regime return density W(0, n)");
    returns->add_option("--alpha", model_args.alpha, "Index of stability in (0, 2)")->required();
    returns->add_option("--gamma", model_args.gamma, "Spatial scale")->required();
    returns->add_option("--n-list", n_text, "Comma-separated step counts")->required();
    output.add_to(*returns);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    if (cumulants->parsed()) {
        const auto orders = parse_list<int>(orders_text, "--orders");
        check_orders(orders);
        const TlfModel model = model_args.model();
        const CumulantTable table = cumulant_table(model, orders);
        if (output.csv()) {
            out << "j,mu_j,kappa_j,lambda_j,a_alpha,epsilon\n";
            for (const auto& e : table.entries) {
                out << e.order << ',' << fmt(e.mu) << ',' << fmt(e.kappa) << ',' << fmt(e.lambda) << ','
                    << fmt(table.a_alpha) << ',' << fmt(table.epsilon) << '\n';
            }
        } else {
            json rows = json::array();
            for (const auto& e : table.entries) {
                rows.push_back({{"j", e.order}, {"mu_j", e.mu}, {"kappa_j", e.kappa}, {"lambda_j", e.lambda}});
            }
            out << dump({{"a_alpha", table.a_alpha}, {"epsilon", table.epsilon}, {"rows", rows}});
        }
        json params = model_args.params();
        params["orders"] = orders;
        output.finish("cumulants", params);
    } else if (regime->parsed()) {
        const RegimeReport r = regime_report(model_args.model());
        if (output.csv()) {
            out << "diffusion,n_gauss,n_levy_max,epsilon\n"
                << fmt(r.diffusion) << ',' << fmt(r.n_gauss) << ',' << fmt(r.n_levy_max) << ','
                << fmt(r.epsilon) << '\n';
        } else {
            out << dump({{"diffusion", r.diffusion},
                         {"n_gauss", r.n_gauss},
                         {"n_levy_max", r.n_levy_max},
                         {"epsilon", r.epsilon}});
        }
        output.finish("regime", model_args.params());
    } else if (oracle->parsed()) {
        const auto eps_list = parse_list<double>(eps_text, "--eps-list");
        // Validate everything before the first (slow) quadrature.
        const StableParams stable(model_args.alpha, model_args.gamma);
        const DeformationSpec shape = model_args.shape(1.0);
        if (order != 2 && order != 4 && order != 6) {
            throw DomainError("--order must be 2, 4 or 6, got " + std::to_string(order));
        }
        for (double eps : eps_list) {
            if (!(eps > 0.0 && eps <= 0.1)) throw DomainError("epsilon must lie in (0, 0.1], got " + fmt(eps));
        }
        std::vector<OracleReport> reports;
        for (double eps : eps_list) {
            try {
                const auto one = convergence_sweep(stable.alpha(), shape, order, std::span(&eps, 1),
                                                   stable.gamma());
                reports.push_back(one.front());
            } catch (const DomainError&) {
                throw;
            } catch (const Error& e) {
                throw QuadratureError("epsilon " + fmt(eps) + ": " + e.what());
            }
        }
        if (output.csv()) {
            out << "epsilon,kappa_numeric,kappa_asymptotic,rel_error\n";
            for (const auto& r : reports) {
                out << fmt(r.epsilon) << ',' << fmt(r.kappa_numeric) << ',' << fmt(r.kappa_asymptotic) << ','
                    << fmt(r.rel_error) << '\n';
            }
        } else {
            json rows = json::array();
            for (const auto& r : reports) {
                rows.push_back({{"epsilon", r.epsilon},
                                {"kappa_numeric", r.kappa_numeric},
                                {"kappa_asymptotic", r.kappa_asymptotic},
                                {"rel_error", r.rel_error}});
            }
            out << dump({{"order", order}, {"rows", rows}});
        }
        json params = model_args.params();
        params["order"] = order;
        params["eps-list"] = eps_list;
        output.finish("oracle", params);
    } else if (simulate->parsed()) {
        const auto record = parse_list<std::int64_t>(record_text, "--record");
        WalkConfig config{model_args.model(), steps, walkers, seed, record, false, threads};
        validate(config);
        const EnsembleStats stats = run_ensemble(config);

        std::ostringstream csv;
        csv << "n,variance,variance_se,kurtosis,kurtosis_se,return_density,return_density_se,count\n";
        for (const auto& r : stats.rows) {
            csv << r.n << ',' << fmt(r.variance) << ',' << fmt(r.variance_se) << ',' << fmt(r.kurtosis) << ','
                << fmt(r.kurtosis_se) << ',' << fmt(r.return_density) << ',' << fmt(r.return_density_se) << ','
                << r.count << '\n';
        }
        json params = model_args.params();
        params["steps"] = steps;
        params["walkers"] = walkers;
        params["seed"] = seed;
        params["record"] = record;
        params["out"] = out_prefix;
        write_file(out_prefix + ".stats.csv", csv.str());
        write_file(out_prefix + ".manifest.json", dump(manifest("simulate", params, seed)));
        out << out_prefix << ".stats.csv\n" << out_prefix << ".manifest.json\n";
    } else if (returns->parsed()) {
        const auto n_list = parse_list<std::int64_t>(n_text, "--n-list");
        const StableParams stable(model_args.alpha, model_args.gamma);
        for (auto n : n_list) {
            if (n < 1) throw DomainError("step counts must be >= 1, got " + std::to_string(n));
        }
        if (output.csv()) {
            out << "n,return_density\n";
            for (auto n : n_list) out << n << ',' << fmt(levy_return_density(stable, static_cast<double>(n))) << '\n';
        } else {
            json rows = json::array();
            for (auto n : n_list) {
                rows.push_back({{"n", n}, {"return_density", levy_return_density(stable, static_cast<double>(n))}});
            }
            out << dump({{"rows", rows}});
        }
        output.finish("returns", {{"alpha", model_args.alpha}, {"gamma", model_args.gamma}, {"n-list", n_list}});
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    ScopedWarningHandler sink([&err](std::string_view msg) { err << "warning: " << msg << "\n"; });
    try {
        return execute(args, out, err);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace tlf::cli

// Scenario driver for the capacity laboratory. Thin shell over the C API:
// each subcommand runs one scenario, prints its assertion summary, and exits
// 0 (pass), 1 (scenario assertion failed) or 2 (invalid config / usage).

#include "caplab/caplab.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string format = "json";
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

int run_kind(const std::string& kind, const CommonArgs& args) {
    std::optional<std::string> config_text;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path, std::ios::binary);
        if (!in) {
            std::fprintf(stderr, "error: cannot read config file '%s'\n",
                         args.config_path.c_str());
            return 2;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        config_text = buf.str();
    }

    const int has_seed = args.seed_opt && args.seed_opt->count() > 0 ? 1 : 0;
    int exit_code = 0;
    char* report_json = nullptr;
    const caplab_status status = caplab_run_scenario(
        kind.c_str(), config_text ? config_text->c_str() : nullptr, args.out_dir.c_str(),
        args.format.c_str(), has_seed, args.seed, &exit_code, &report_json);
    if (status != CAPLAB_OK) {
        std::fprintf(stderr, "error: %s\n", caplab_last_error());
        return 2;
    }

    const nlohmann::json report = nlohmann::json::parse(report_json);
    caplab_string_free(report_json);
    std::printf("%s: %s (config %s, seed %llu)\n", kind.c_str(),
                report.at("pass").get<bool>() ? "PASS" : "FAIL",
                report.at("config_hash").get<std::string>().c_str(),
                static_cast<unsigned long long>(report.at("seed").get<std::uint64_t>()));
    for (const auto& a : report.at("assertions")) {
        std::printf("  [%s] %s: %s\n", a.at("holds").get<bool>() ? "ok" : "FAIL",
                    a.at("name").get<std::string>().c_str(),
                    a.at("detail").get<std::string>().c_str());
    }
    std::string stem = kind;
    for (char& c : stem)
        if (c == '-') c = '_';
    std::printf("  report: %s/%s_report.json\n", args.out_dir.c_str(), stem.c_str());
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacity laboratory scenario driver"};
    app.require_subcommand(1);

    const struct {
        const char* kind;
        const char* blurb;
    } kinds[] = {
        {"chain-probe", "evaluate a capacity along a decreasing chain of sets"},
        {"counterexample", "Huber-type capacity where the removal value never decays"},
        {"positive-case", "sup of finitely many measures where the removal value decays"},
        {"set-equality", "closed neighborhoods against decreasing intersections"},
        {"property-sweep", "axiom and property checks across the capacity zoo"},
        {"lusin-sweep", "removal values across (eta, scale) settings"},
    };

    int rc = 0;
    for (const auto& k : kinds) {
        auto* sub = app.add_subcommand(k.kind, k.blurb);
        auto args = std::make_shared<CommonArgs>();
        sub->add_option("--config", args->config_path, "JSON config file (defaults when omitted)");
        sub->add_option("--out", args->out_dir, "output directory for reports")
            ->capture_default_str();
        sub->add_option("--format", args->format, "report format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        args->seed_opt = sub->add_option("--seed", args->seed, "seed override for sampled checks");
        const std::string kind = k.kind;
        sub->callback([&rc, kind, args] { rc = run_kind(kind, *args); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return rc;
}

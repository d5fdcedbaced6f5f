#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dce/scenario/config.hpp"
#include "dce/scenario/run.hpp"

namespace sc = dce::scenario;

int main(int argc, char** argv) {
    CLI::App app{"Squeezed-cavity photon growth under decoherence: scenario runner"};
    std::string config_path, scenario, out, formats;
    std::uint64_t seed = 0;
    int jobs = 0;
    app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--scenario", scenario, "override the configured scenario");
    app.add_option("--out", out, "output path prefix");
    app.add_option("--format", formats, "comma-separated subset of csv,json");
    auto* seed_opt = app.add_option("--seed", seed, "seed for the random initial state");
    app.add_option("--jobs", jobs, "parallel sweep points")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sc::kUsage;
    }

    try {
        sc::ptree pt;
        if (!config_path.empty()) pt = sc::read_config_file(config_path);
        if (!scenario.empty()) pt.put("scenario", scenario);
        if (!out.empty()) pt.put("output", out);
        if (!formats.empty()) pt.put("formats", formats);
        if (*seed_opt) pt.put("seed", std::to_string(seed));
        if (jobs > 0) pt.put("jobs", std::to_string(jobs));

        const sc::ScenarioConfig cfg = sc::parse_config(pt);
        const sc::RunResult res = sc::run(cfg);
        std::cout << sc::to_string(cfg.kind) << ": " << res.report["status"].get<std::string>() << '\n';
        for (const auto& f : res.files) std::cout << "  wrote " << f.string() << '\n';
        return res.exit_code;
    } catch (const sc::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return sc::kUsage;
    } catch (const dce::InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return sc::kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sc::kIntegrationFailure;
    }
}

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "hopnet/io.hpp"
#include "hopnet/kernels.hpp"
#include "runner.hpp"
#include "suite.hpp"

namespace {

using namespace hopnet;

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    std::size_t workers = 1;
    std::string format = "csv";
};

void add_common(CLI::App* sub, Flags& f, bool needs_config) {
    auto* c = sub->add_option("--config,-c", f.config, "Scenario JSON file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out,-o", f.out, "Output directory");
    sub->add_option("--seed", f.seed, "Override the scenario seed");
    sub->add_option("--workers,-j", f.workers, "Worker threads")->check(CLI::Range(1, 1024));
    if (needs_config) {
        sub->add_flag("--strict", f.strict, "Exit 4 when a reported property is violated");
        sub->add_option("--format", f.format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));
    }
}

int run_selftest(const Flags& f) {
    selftest::SuiteOptions opts;
    if (f.seed) opts.seed = *f.seed;
    opts.workers = f.workers;
    const auto start = std::chrono::steady_clock::now();
    const auto result = selftest::run_suite(opts);
    selftest::print_table(std::cout, result);
    if (!f.out.empty()) {
        try {
            const std::filesystem::path dir(f.out);
            std::filesystem::create_directories(dir);
            io::Json names = io::Json::array();
            for (const auto& [name, content] : result.artifacts) {
                io::write_file_atomic(dir / name, content);
                names.push_back(name);
            }
            names.push_back("manifest.json");
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const io::Json manifest = {{"tool", "hopnet"},
                                       {"command", "selftest"},
                                       {"seed", opts.seed},
                                       {"workers", opts.workers},
                                       {"isa", std::string(kernels::to_string(kernels::active()))},
                                       {"passed", result.passed()},
                                       {"wall_time_seconds", wall},
                                       {"artifacts", names}};
            io::write_file_atomic(dir / "manifest.json", io::dump(manifest));
        } catch (const std::exception& e) {
            std::cerr << "hopnet: cannot write artifacts: " << e.what() << "\n";
            return 1;
        }
    }
    return result.passed() ? cli::kExitOk : cli::kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous Hopfield network simulator and analysis tool", "hopnet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HOPNET_VERSION_STRING);

    Flags flags;
    auto* run = app.add_subcommand("run", "Run every analysis listed in the scenario");
    add_common(run, flags, true);

    std::vector<std::pair<CLI::App*, cli::Op>> single;
    const std::pair<const char*, const char*> descriptions[] = {
        {"simulate", "Integrate the network and check the dissipation inequalities"},
        {"equilibria", "Find and classify equilibria"},
        {"passivity", "Certify or falsify semi-passivity outside a radius"},
        {"invariance", "Probe invariance of the shrunken cube"},
        {"lambda-sweep", "Sweep the sigmoid gain"},
        {"memory", "Hebbian storage and recall"},
        {"interconnect", "Check the coupled-network identities"},
    };
    for (const auto& [name, text] : descriptions) {
        auto* sub = app.add_subcommand(name, text);
        add_common(sub, flags, true);
        single.emplace_back(sub, *cli::op_from_name(name));
    }

    auto* self = app.add_subcommand("selftest", "Run the built-in acceptance suite");
    add_common(self, flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitValidation;
    }

    if (self->parsed()) return run_selftest(flags);

    cli::RunOptions opts;
    if (!flags.out.empty()) opts.out_dir = flags.out;
    opts.seed = flags.seed;
    opts.strict = flags.strict;
    opts.workers = flags.workers;
    opts.format = flags.format == "json" ? cli::TrajectoryFormat::json : cli::TrajectoryFormat::csv;
    for (const auto& [sub, op] : single)
        if (sub->parsed()) opts.only = op;
    return cli::run_config(flags.config, opts, std::cerr);
}

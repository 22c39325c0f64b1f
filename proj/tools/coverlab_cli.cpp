// coverlab: command-line driver for the pipelines.
//
//   coverlab <subcommand> [config.json] [--config FILE] [--out DIR] [--threads N] [--seed-override S]
//
// Exit status: 0 all checks pass, 1 a numerical check failed, 2 bad config or input.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <omp.h>

#include <CLI11.hpp>

#include "coverlab/config.hpp"
#include "coverlab/pipelines.hpp"

using namespace coverlab;

namespace {

struct Options {
    std::string config, out, ensemble;
    int threads = 0;
    std::optional<std::uint64_t> seed;
};

int run(const std::string& command, const Options& o) {
    const std::string& path = o.config;
    RunConfig cfg;
    try {
        cfg = path.empty() ? default_config() : load_config(path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (o.seed) cfg.sim.base_seed = *o.seed;
    if (o.threads > 0) omp_set_num_threads(o.threads);

    std::filesystem::path root = "runs";
    if (const char* env = std::getenv("COVERLAB_OUT")) root = env;
    if (!o.out.empty()) root = o.out;
    std::filesystem::path dir = root / config_hash(cfg);

    auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    try {
        Session s(cfg, dir);
        if (command == "forms") s.forms(report);
        else if (command == "sigma") s.sigma(report);
        else if (command == "simulate") s.simulate(report);
        else if (command == "verify") {
            std::optional<std::filesystem::path> ens;
            if (!o.ensemble.empty()) ens = o.ensemble;
            s.verify(report, ens);
        } else if (command == "spectrum") s.spectrum(report);
        else if (command == "hessian") s.hessian(report);
        else if (command == "heatkernel") s.heatkernel(report);
        else if (command == "all") s.all(report);
    } catch (const ConfigError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 2;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream(dir / "manifest.json") << manifest_json(cfg, command, report, wall) << "\n";
    std::cout << "output: " << dir.string() << "\n";
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
    for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
    for (const Check& c : report.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " target=" << c.target
                  << " tol=" << c.tolerance << "\n";
    if (!report.pass()) {
        std::cout << "failing:";
        for (const auto& f : report.failing()) std::cout << " " << f;
        std::cout << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Winding and cover heat-kernel laboratory for planar domains with holes"};
    app.require_subcommand(1);
    Options o;
    std::string seed_text;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config,--config", o.config, "JSON config file (default: the built-in annulus)");
        sub->add_option("--out", o.out, "output root (default $COVERLAB_OUT or ./runs)");
        sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed-override", seed_text, "replace simulate.seed");
    };
    for (const char* name : {"forms", "sigma", "simulate", "spectrum", "hessian", "heatkernel", "all"}) {
        add_common(app.add_subcommand(name));
    }
    CLI::App* verify = app.add_subcommand("verify", "statistical checks on an ensemble");
    verify->require_subcommand(1);
    CLI::App* clt = verify->add_subcommand("clt", "CLT, drift and quadratic-variation checks");
    add_common(clt);
    clt->add_option("--ensemble", o.ensemble, "ensemble CSV (default: the run directory's ensemble.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (!seed_text.empty()) {
        try {
            o.seed = std::stoull(seed_text);
        } catch (const std::exception&) {
            std::cerr << "config error: --seed-override must be a non-negative integer\n";
            return 2;
        }
    }
    std::string command = app.get_subcommands().front()->get_name();
    return run(command, o);
}

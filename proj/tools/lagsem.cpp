#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagsem/harness.hpp"
#include "lagsem/poisson.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::vector<std::string> overrides;
    std::string seed;
};

void add_common(CLI::App* sub, CommonOpts* opts) {
    sub->add_option("--config", opts->config_path, "flat key=value config file");
    sub->add_option("--out", opts->out_path, "output report path (default: stdout)");
    sub->add_option("--set", opts->overrides, "override config entries, key=value")
        ->take_all();
    sub->add_option("--seed", opts->seed, "random seed for ensembles");
}

int dispatch(const std::string& name, const CommonOpts& opts) {
    using namespace lagsem;
    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::from_file(opts.config_path);
        for (const auto& s : opts.overrides) cfg.apply_override(s);
        if (!opts.seed.empty()) cfg.kv["seed"] = opts.seed;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!opts.out_path.empty()) {
        file.open(opts.out_path);
        if (!file) {
            std::cerr << "config error: cannot open output path " << opts.out_path << "\n";
            return kExitConfigError;
        }
        out = &file;
    }

    try {
        if (name == "kernel") return run_kernel(cfg, *out);
        if (name == "converge") return run_converge(cfg, *out);
        if (name == "weights") return run_weights(cfg, *out);
        if (name == "transfer") return run_transfer(cfg, *out);
    } catch (const AdmissibilityError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return kExitAdmissibilityRejection;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << " (estimate " << e.estimate << ")\n";
        return kExitNumericFailure;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laguerre-type heat and Poisson semigroup experiments"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string picked;
    for (const char* name : {"kernel", "converge", "weights", "transfer"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, &opts);
        sub->callback([&picked, name] { picked = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return lagsem::kExitConfigError;
    }
    return dispatch(picked, opts);
}

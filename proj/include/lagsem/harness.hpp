#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace lagsem {

// Exit codes shared by all subcommands.
enum ExitCode : int {
    kExitPass = 0,
    kExitConfigError = 2,
    kExitNumericFailure = 3,
    kExitAdmissibilityRejection = 4,
};

// Flat key=value configuration with command-line overrides.  Every report
// embeds the resolved map, so fitted constants stay reproducible.
struct ExperimentConfig {
    std::map<std::string, std::string> kv;

    static ExperimentConfig from_file(const std::string& path);
    void apply_override(const std::string& key_eq_value);

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::uint64_t seed(std::uint64_t fallback = 20240915) const;
    std::vector<double> num_list(const std::string& key, const std::string& fallback) const;
};

int run_kernel(const ExperimentConfig& cfg, std::ostream& out);
int run_converge(const ExperimentConfig& cfg, std::ostream& out);
int run_weights(const ExperimentConfig& cfg, std::ostream& out);
int run_transfer(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace lagsem

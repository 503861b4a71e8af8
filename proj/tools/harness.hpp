#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace erspec::harness {

// Bad configuration; the message carries the offending field path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& experiment_kinds();
const std::string& kind_help(const std::string& kind);

struct ExperimentConfig {
    std::string kind;
    int n = 10000;
    std::optional<double> b;
    std::optional<double> d;
    std::vector<uint64_t> seeds{1};
    double tau = 1.5;
    std::optional<double> delta;
    double r_star_c = 0.25;
    std::optional<int> r_star;
    double kappa = 0.1;
    std::vector<double> eta_grid;
    std::vector<std::complex<double>> z_grid;
    std::vector<double> alpha_grid{0, 0.5, 1, 2, 3, 5};
    std::vector<double> b_grid;
    std::vector<double> lambda_grid;
    std::vector<int> r_grid{6, 12, 24};
    std::vector<double> phase_angles{0.0, 1.0471975511965976};
    std::string matrix = "adjacency_over_sqrt_d";
    double typical_a = 1.0;
    bool sce = false;
    int extremal_k = 0;
    int dense_max = 16000;
    int density_points = 401;
    std::string out = "results";

    double effective_d() const;
    int effective_r_star() const;
    nlohmann::json to_json() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

struct RunRecord {
    std::string kind;
    uint64_t seed = 0;
    std::string run_id;
    nlohmann::json config;
    std::string csv;                  // header plus rows
    std::vector<nlohmann::json> lines;
    double wall_seconds = 0;
    std::string version;
};

std::string run_id(const ExperimentConfig& cfg, uint64_t seed);

// One record per seed; deterministic kinds produce a single record.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, int threads = 1);

enum class Format { csv, jsonl };

std::filesystem::path emit(const RunRecord& rec, const std::filesystem::path& dir, Format fmt);
// Wall time lives next to the payload so that payload bytes stay reproducible.
std::filesystem::path emit_meta(const RunRecord& rec, const std::filesystem::path& dir);

}  // namespace erspec::harness

#include <CLI11.hpp>
#include <iostream>

#include "erspec/errors.hpp"
#include "harness.hpp"

namespace h = erspec::harness;

namespace {

h::ExperimentConfig load(const std::string& source, const std::string& kind) {
    nlohmann::json j;
    if (source.empty()) {
        j = nlohmann::json::object();
    } else if (source.front() == '{') {
        try {
            j = nlohmann::json::parse(source);
        } catch (const nlohmann::json::parse_error& e) {
            throw h::ConfigError(std::string("config: malformed JSON: ") + e.what());
        }
    } else {
        h::ExperimentConfig c = h::parse_config_file(source);
        if (c.kind != kind) throw h::ConfigError("config.kind: '" + c.kind + "' does not match subcommand '" + kind + "'");
        return c;
    }
    if (j.is_object() && !j.contains("kind")) j["kind"] = kind;
    if (j.is_object() && j["kind"] != kind)
        throw h::ConfigError("config.kind: does not match subcommand '" + kind + "'");
    return h::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral experiments on sparse Erdos-Renyi graphs"};
    app.require_subcommand(1);
    std::string config, out;
    int threads = 1;
    std::optional<uint64_t> seed_override;
    app.add_option("--config", config, "JSON config file, or an inline JSON object");
    app.add_option("--out", out, "Output directory (overrides config.out)");
    app.add_option("--threads", threads, "Worker threads; seeds fan out across workers")->check(CLI::PositiveNumber);
    app.add_option("--seed-override", seed_override, "Replace the seed list with this single seed");

    for (const auto& kind : h::experiment_kinds()) {
        auto* sub = app.add_subcommand(kind, h::kind_help(kind).substr(0, h::kind_help(kind).find('\n')));
        sub->footer(h::kind_help(kind));
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::string kind = app.get_subcommands().front()->get_name();
    try {
        h::ExperimentConfig cfg = load(config, kind);
        if (seed_override) cfg.seeds = {*seed_override};
        if (!out.empty()) cfg.out = out;
        auto records = h::run_experiment(cfg, threads);
        for (const auto& rec : records) {
            auto csv = h::emit(rec, cfg.out, h::Format::csv);
            h::emit(rec, cfg.out, h::Format::jsonl);
            h::emit_meta(rec, cfg.out);
            std::cout << csv.string() << "\n";
        }
        return 0;
    } catch (const h::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const erspec::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const erspec::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

// Command-line front end for the ptelm shared library. Talks to the library
// exclusively through the C API in ptelm/ptelm.h.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
// failure (1 is reserved for internal/usage faults that should not occur).

#include <charconv>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptelm/ptelm.h"

namespace {

int report_failure(ptelm_status status) {
    std::fprintf(stderr, "error: %s\n", ptelm_last_error());
    return static_cast<int>(status);
}

bool parse_grid(const std::string& text, std::vector<double>& grid) {
    grid.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i != text.size() && text[i] != ',') continue;
        std::string item = text.substr(start, i - start);
        start = i + 1;
        if (item.empty()) return false;
        double value = 0.0;
        auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc{} || end != item.data() + item.size()) return false;
        grid.push_back(value);
    }
    return !grid.empty();
}

using experiment_ptr = std::unique_ptr<ptelm_experiment, decltype(&ptelm_experiment_free)>;

int open_experiment(const std::string& config, const std::string& output_dir,
                    experiment_ptr& out) {
    ptelm_experiment* raw = nullptr;
    ptelm_status status = ptelm_experiment_create(config.c_str(), &raw);
    if (status != PTELM_OK) return report_failure(status);
    out = experiment_ptr(raw, &ptelm_experiment_free);
    if (!output_dir.empty()) {
        status = ptelm_experiment_set(out.get(), "output_dir", output_dir.c_str());
        if (status != PTELM_OK) return report_failure(status);
    }
    return 0;
}

int run_command(const std::string& config, const std::string& output_dir) {
    experiment_ptr experiment(nullptr, &ptelm_experiment_free);
    if (int rc = open_experiment(config, output_dir, experiment); rc != 0) return rc;
    ptelm_status status = ptelm_experiment_run(experiment.get());
    if (status != PTELM_OK) return report_failure(status);

    size_t count = 0;
    ptelm_experiment_method_count(experiment.get(), &count);
    for (size_t i = 0; i < count; ++i) {
        const char* name = nullptr;
        double mean = 0.0;
        double stddev = 0.0;
        if (ptelm_experiment_method_name(experiment.get(), i, &name) != PTELM_OK) continue;
        ptelm_experiment_mean_accuracy(experiment.get(), name, &mean);
        ptelm_experiment_stddev_accuracy(experiment.get(), name, &stddev);
        std::printf("%-6s accuracy %.4f +/- %.4f\n", name, mean, stddev);
    }
    return 0;
}

int sweep_command(const std::string& config, const std::string& output_dir,
                  const std::string& param, const std::string& grid_text) {
    std::vector<double> grid;
    if (!parse_grid(grid_text, grid)) {
        std::fprintf(stderr, "error: --grid expects comma-separated numbers, got '%s'\n",
                     grid_text.c_str());
        return 2;
    }
    experiment_ptr experiment(nullptr, &ptelm_experiment_free);
    if (int rc = open_experiment(config, output_dir, experiment); rc != 0) return rc;
    ptelm_status status =
        ptelm_experiment_sweep(experiment.get(), param.c_str(), grid.data(), grid.size());
    if (status != PTELM_OK) return report_failure(status);
    std::printf("swept %s over %zu values\n", param.c_str(), grid.size());
    return 0;
}

int split_command(const std::string& config, const std::string& output_dir, size_t trial) {
    experiment_ptr experiment(nullptr, &ptelm_experiment_free);
    if (int rc = open_experiment(config, output_dir, experiment); rc != 0) return rc;
    ptelm_status status = ptelm_experiment_write_splits(experiment.get(), trial);
    if (status != PTELM_OK) return report_failure(status);
    std::printf("wrote split manifests for trial %zu\n", trial);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parameter-transfer extreme learning machine experiments"};
    app.require_subcommand(1);

    std::string config;
    std::string output_dir;
    std::string param;
    std::string grid_text;
    size_t trial = 0;

    CLI::App* run = app.add_subcommand("run", "run a multi-trial experiment");
    run->add_option("--config", config, "experiment config file")->required();
    run->add_option("--output-dir", output_dir, "override the report directory");

    CLI::App* sweep = app.add_subcommand("sweep", "hyperparameter sensitivity sweep");
    sweep->add_option("--config", config, "experiment config file")->required();
    sweep->add_option("--param", param, "lambda1 | lambda2 | lambda3 | L")->required();
    sweep->add_option("--grid", grid_text, "comma-separated values")->required();
    sweep->add_option("--output-dir", output_dir, "override the report directory");

    CLI::App* split = app.add_subcommand("split", "write split manifests only");
    split->add_option("--config", config, "experiment config file")->required();
    split->add_option("--trial", trial, "trial index")->required();
    split->add_option("--output-dir", output_dir, "override the report directory");

    CLI::App* version = app.add_subcommand("version", "print the library version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (version->parsed()) {
        std::printf("ptelm %s\n", ptelm_version());
        return 0;
    }
    if (run->parsed()) return run_command(config, output_dir);
    if (sweep->parsed()) return sweep_command(config, output_dir, param, grid_text);
    if (split->parsed()) return split_command(config, output_dir, trial);
    return 2;
}

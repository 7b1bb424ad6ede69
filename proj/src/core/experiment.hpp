#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "data.hpp"
#include "transfer.hpp"

namespace ptelm {

// The compared classifiers: source-only ELM, target-only ELM (labeled
// target rows only), and the parameter-transfer model using both.
enum class Method { elm_s, elm_t, ptelm };

Method method_from_string(const std::string& name);
const char* to_string(Method method);

struct ExperimentConfig {
    std::filesystem::path source_path;
    std::filesystem::path target_path;
    bool csv_header = false;
    long label_column = -1;
    std::size_t trials = 20;
    std::vector<Method> methods = {Method::elm_s, Method::elm_t, Method::ptelm};
    SplitSpec split; // per-class counts; trial_seed is derived per trial
    PtelmHyperparams hyperparams;
    double elm_lambda = 1.0;
    std::optional<std::size_t> pca_dims;
    std::uint64_t base_seed = 0;
    std::filesystem::path output_dir;
};

// Reads the flat key=value config format ('#' comments, blank lines
// allowed; unknown or duplicate keys rejected). output_dir falls back to
// $PTELM_OUTPUT_DIR, then "./ptelm_report".
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies one key=value override using the same keys as the config file.
void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value);

// Range/consistency checks plus existence of the referenced data files.
void validate_config(const ExperimentConfig& cfg);

using Confusion = std::vector<std::vector<long long>>;

// Entry (i, j) counts samples of true class i predicted as class j.
Confusion confusion_matrix(const std::vector<int>& predicted, const std::vector<int>& actual,
                           int class_count);

struct TrialResult {
    std::size_t trial_index = 0;
    std::vector<double> accuracy;     // parallel to config.methods
    std::vector<Confusion> confusion; // parallel to config.methods
    std::vector<double> objective_trace; // transfer objective, empty without ptelm
    std::vector<std::vector<std::size_t>> source_train_indices; // per class
    std::vector<std::vector<std::size_t>> target_train_indices; // per class
    std::vector<std::size_t> target_test_indices;
};

// One seeded trial: split both domains with seed base_seed + trial_index,
// train every configured method, evaluate all of them on the identical
// target test rows. Deterministic in (cfg, trial_index).
TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

struct AggregateResult {
    ExperimentConfig config;
    int class_count = 0;
    std::vector<TrialResult> trials;
    std::vector<double> mean_accuracy;   // parallel to config.methods
    std::vector<double> stddev_accuracy; // sample convention (divisor trials-1)
    std::vector<std::vector<std::vector<double>>> mean_confusion; // per method, c x c
    std::vector<std::string> notes;
};

// Runs trials 0..trials-1 (any trial failure aborts with its cause),
// aggregates, and writes the report files into cfg.output_dir.
AggregateResult run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { csv, json };

// Writes accuracy tables, mean confusion matrices, objective traces, and
// per-trial split manifests under `dir`. CSV numbers use 6 significant
// digits; the JSON summary keeps full precision.
void emit_report(const AggregateResult& result, ReportFormat format,
                 const std::filesystem::path& dir);

struct SweepPoint {
    double value = 0.0;
    std::vector<double> mean_accuracy;   // parallel to config.methods
    std::vector<double> stddev_accuracy;
};

// Re-runs the experiment once per grid value with the named hyperparameter
// (lambda1 | lambda2 | lambda3 | hidden_nodes) overridden, writing each
// run's reports under output_dir/value_<i> and a combined curve CSV + JSON
// at the top level.
std::vector<SweepPoint> sensitivity_sweep(const ExperimentConfig& cfg, const std::string& param,
                                          const std::vector<double>& grid);

// Writes only the split manifests for one trial (no training) into
// cfg.output_dir.
void write_split_manifests(const ExperimentConfig& cfg, std::size_t trial_index);

} // namespace ptelm

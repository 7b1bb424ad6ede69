#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "version.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ptelm {

Method method_from_string(const std::string& name) {
    if (name == "elm_s") return Method::elm_s;
    if (name == "elm_t") return Method::elm_t;
    if (name == "ptelm") return Method::ptelm;
    raise(ErrorKind::invalid_config, "unknown method '" + name + "'");
}

const char* to_string(Method method) {
    switch (method) {
    case Method::elm_s: return "elm_s";
    case Method::elm_t: return "elm_t";
    case Method::ptelm: return "ptelm";
    }
    return "ptelm";
}

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    std::size_t end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, end - begin + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    double parsed = 0.0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || end != value.data() + value.size()) {
        raise(ErrorKind::invalid_config, key + ": cannot parse '" + value + "' as a number");
    }
    return parsed;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& value) {
    Int parsed{};
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || end != value.data() + value.size()) {
        raise(ErrorKind::invalid_config, key + ": cannot parse '" + value + "' as an integer");
    }
    return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    raise(ErrorKind::invalid_config, key + ": expected true/false, got '" + value + "'");
}

std::vector<Method> parse_methods(const std::string& value) {
    std::vector<Method> methods;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= value.size(); ++i) {
        if (i == value.size() || value[i] == ',') {
            std::string item = trim_copy(value.substr(start, i - start));
            if (!item.empty()) methods.push_back(method_from_string(item));
            start = i + 1;
        }
    }
    if (methods.empty()) {
        raise(ErrorKind::invalid_config, "methods: list is empty");
    }
    return methods;
}

void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "source") {
        cfg.source_path = value;
    } else if (key == "target") {
        cfg.target_path = value;
    } else if (key == "csv_header") {
        cfg.csv_header = parse_bool(key, value);
    } else if (key == "label_column") {
        cfg.label_column = parse_integer<long>(key, value);
    } else if (key == "trials") {
        cfg.trials = parse_integer<std::size_t>(key, value);
    } else if (key == "methods") {
        cfg.methods = parse_methods(value);
    } else if (key == "source_per_class") {
        cfg.split.source_per_class = parse_integer<std::size_t>(key, value);
    } else if (key == "target_labeled_per_class") {
        cfg.split.target_labeled_per_class = parse_integer<std::size_t>(key, value);
    } else if (key == "hidden_nodes") {
        cfg.hyperparams.hidden_nodes = parse_integer<std::size_t>(key, value);
    } else if (key == "activation") {
        cfg.hyperparams.activation = activation_from_string(value);
    } else if (key == "elm_lambda") {
        cfg.elm_lambda = parse_real(key, value);
    } else if (key == "lambda1") {
        cfg.hyperparams.lambda1 = parse_real(key, value);
    } else if (key == "lambda2") {
        cfg.hyperparams.lambda2 = parse_real(key, value);
    } else if (key == "lambda3") {
        cfg.hyperparams.lambda3 = parse_real(key, value);
    } else if (key == "epsilon") {
        cfg.hyperparams.epsilon = parse_real(key, value);
    } else if (key == "delta") {
        cfg.hyperparams.delta = parse_real(key, value);
    } else if (key == "inner_max_iters") {
        cfg.hyperparams.inner_max_iters = parse_integer<std::size_t>(key, value);
    } else if (key == "inner_tol") {
        cfg.hyperparams.inner_tol = parse_real(key, value);
    } else if (key == "outer_max_iters") {
        cfg.hyperparams.outer_max_iters = parse_integer<std::size_t>(key, value);
    } else if (key == "outer_tol") {
        cfg.hyperparams.outer_tol = parse_real(key, value);
    } else if (key == "pca_dims") {
        cfg.pca_dims = parse_integer<std::size_t>(key, value);
    } else if (key == "base_seed") {
        cfg.base_seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else {
        raise(ErrorKind::invalid_config, "unknown config key '" + key + "'");
    }
}

} // namespace

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorKind::invalid_config, "cannot open config '" + path.string() + "'");
    }
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string stripped = trim_copy(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            raise(ErrorKind::invalid_config,
                  path.string() + ":" + std::to_string(line_number) + ": expected key = value");
        }
        std::string key = trim_copy(stripped.substr(0, eq));
        std::string value = trim_copy(stripped.substr(eq + 1));
        if (key.empty()) {
            raise(ErrorKind::invalid_config,
                  path.string() + ":" + std::to_string(line_number) + ": empty key");
        }
        if (!seen.insert(key).second) {
            raise(ErrorKind::invalid_config,
                  path.string() + ":" + std::to_string(line_number) + ": duplicate key '" + key +
                      "'");
        }
        set_config_key(cfg, key, value);
    }
    if (cfg.output_dir.empty()) {
        const char* env = std::getenv("PTELM_OUTPUT_DIR");
        cfg.output_dir = env != nullptr && *env != '\0' ? fs::path(env)
                                                        : fs::path("ptelm_report");
    }
    return cfg;
}

void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
    set_config_key(cfg, key, value);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.source_path.empty() || cfg.target_path.empty()) {
        raise(ErrorKind::invalid_config, "source and target data paths are required");
    }
    if (!fs::exists(cfg.source_path)) {
        raise(ErrorKind::invalid_config, "source file '" + cfg.source_path.string() +
                                             "' does not exist");
    }
    if (!fs::exists(cfg.target_path)) {
        raise(ErrorKind::invalid_config, "target file '" + cfg.target_path.string() +
                                             "' does not exist");
    }
    if (cfg.trials < 1) {
        raise(ErrorKind::invalid_config, "trials must be at least 1");
    }
    if (cfg.methods.empty()) {
        raise(ErrorKind::invalid_config, "methods list is empty");
    }
    std::set<Method> unique(cfg.methods.begin(), cfg.methods.end());
    if (unique.size() != cfg.methods.size()) {
        raise(ErrorKind::invalid_config, "methods list contains duplicates");
    }
    if (cfg.split.source_per_class < 1 || cfg.split.target_labeled_per_class < 1) {
        raise(ErrorKind::invalid_config, "per-class sample counts must be at least 1");
    }
    if (!(cfg.elm_lambda > 0.0) || !std::isfinite(cfg.elm_lambda)) {
        raise(ErrorKind::invalid_config, "elm_lambda must be positive and finite");
    }
    if (cfg.pca_dims && *cfg.pca_dims < 1) {
        raise(ErrorKind::invalid_config, "pca_dims must be at least 1");
    }
    if (cfg.output_dir.empty()) {
        raise(ErrorKind::invalid_config, "output_dir is empty");
    }
    cfg.hyperparams.validate_for_training();
}

Confusion confusion_matrix(const std::vector<int>& predicted, const std::vector<int>& actual,
                           int class_count) {
    if (predicted.size() != actual.size()) {
        raise(ErrorKind::dimension_mismatch, "confusion_matrix: label vectors differ in length");
    }
    if (class_count < 1) {
        raise(ErrorKind::invalid_dimension, "confusion_matrix: class_count must be positive");
    }
    Confusion counts(static_cast<std::size_t>(class_count),
                     std::vector<long long>(static_cast<std::size_t>(class_count), 0));
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (actual[i] < 0 || actual[i] >= class_count || predicted[i] < 0 ||
            predicted[i] >= class_count) {
            raise(ErrorKind::label_out_of_range, "confusion_matrix: label outside [0, " +
                                                     std::to_string(class_count) + ")");
        }
        ++counts[static_cast<std::size_t>(actual[i])][static_cast<std::size_t>(predicted[i])];
    }
    return counts;
}

namespace {

struct PreparedData {
    DomainDataset source;
    DomainDataset target;
};

PreparedData prepare_data(const ExperimentConfig& cfg) {
    LoadedCsv source = load_csv(cfg.source_path, cfg.csv_header, cfg.label_column);
    LoadedCsv target = load_csv(cfg.target_path, cfg.csv_header, cfg.label_column);
    if (source.label_values != target.label_values) {
        raise(ErrorKind::class_mismatch,
              "source and target label sets differ ('" + source.dataset.name + "' vs '" +
                  target.dataset.name + "')");
    }
    // Dataset-level normalization: statistics over each domain's full
    // feature matrix, before any splitting.
    source.dataset.features = standardize(source.dataset.features).data;
    target.dataset.features = standardize(target.dataset.features).data;
    return {std::move(source.dataset), std::move(target.dataset)};
}

TrialResult run_trial_prepared(const PreparedData& data, const ExperimentConfig& cfg,
                               std::size_t trial_index) {
    const std::uint64_t seed = cfg.base_seed + trial_index;
    SplitSpec spec = cfg.split;
    spec.trial_seed = seed;
    DomainSplit source_split = sample_split(data.source, spec, SplitRole::source);
    DomainSplit target_split = sample_split(data.target, spec, SplitRole::target);

    DenseMatrix xs = std::move(source_split.train.features);
    DenseMatrix xt = std::move(target_split.train.features);
    DenseMatrix xtest = std::move(target_split.test.features);
    if (xs.cols() != xt.cols()) {
        raise(ErrorKind::invalid_config,
              "source and target feature dimensions differ (" + std::to_string(xs.cols()) +
                  " vs " + std::to_string(xt.cols()) + ")");
    }
    if (cfg.pca_dims) {
        // One basis fitted on the pooled training rows keeps both domains in
        // the same reduced space, which the shared hidden layer requires.
        DenseMatrix fit_rows = vstack(xs, xt);
        const std::size_t limit = std::min(fit_rows.rows(), fit_rows.cols());
        if (*cfg.pca_dims > limit) {
            raise(ErrorKind::invalid_config,
                  "pca_dims = " + std::to_string(*cfg.pca_dims) +
                      " exceeds min(train rows, features) = " + std::to_string(limit));
        }
        PcaModel pca = pca_fit(fit_rows, *cfg.pca_dims);
        xs = pca_transform(pca, xs);
        xt = pca_transform(pca, xt);
        xtest = pca_transform(pca, xtest);
    }

    const int class_count = data.source.class_count;
    const PtelmHyperparams& hp = cfg.hyperparams;
    HiddenLayer layer = init_hidden_layer(xs.cols(), hp.hidden_nodes, hp.activation, seed);

    TrialResult result;
    result.trial_index = trial_index;
    result.source_train_indices = std::move(source_split.train_indices);
    result.target_train_indices = std::move(target_split.train_indices);
    result.target_test_indices = std::move(target_split.test_indices);
    for (Method method : cfg.methods) {
        std::vector<int> predicted;
        switch (method) {
        case Method::elm_s: {
            DenseMatrix beta = train_elm(hidden_map(layer, xs),
                                         one_hot(source_split.train.labels, class_count),
                                         cfg.elm_lambda);
            predicted = predict(layer, beta, xtest);
            break;
        }
        case Method::elm_t: {
            DenseMatrix beta = train_elm(hidden_map(layer, xt),
                                         one_hot(target_split.train.labels, class_count),
                                         cfg.elm_lambda);
            predicted = predict(layer, beta, xtest);
            break;
        }
        case Method::ptelm: {
            PtelmModel model = train_ptelm(xs, source_split.train.labels, xt,
                                           target_split.train.labels, hp, seed);
            predicted = predict_target(model, xtest);
            result.objective_trace = std::move(model.objective_trace);
            break;
        }
        }
        result.accuracy.push_back(accuracy(predicted, target_split.test.labels));
        result.confusion.push_back(
            confusion_matrix(predicted, target_split.test.labels, class_count));
    }
    return result;
}

std::string sig6(double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

std::string shortest(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, end);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) {
        raise(ErrorKind::io_error, "cannot write '" + path.string() + "'");
    }
}

std::string trial_tag(std::size_t trial_index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trial_%03zu", trial_index);
    return buf;
}

void write_manifests(const fs::path& dir, const TrialResult& trial) {
    fs::create_directories(dir / "splits");
    const std::string tag = trial_tag(trial.trial_index);

    auto per_class = [](const std::vector<std::vector<std::size_t>>& indices) {
        std::string out = "class,index\n";
        for (std::size_t c = 0; c < indices.size(); ++c) {
            for (std::size_t idx : indices[c]) {
                out += std::to_string(c);
                out.push_back(',');
                out += std::to_string(idx);
                out.push_back('\n');
            }
        }
        return out;
    };
    write_file(dir / "splits" / (tag + "_source_train.csv"),
               per_class(trial.source_train_indices));
    write_file(dir / "splits" / (tag + "_target_train.csv"),
               per_class(trial.target_train_indices));
    std::string test = "index\n";
    for (std::size_t idx : trial.target_test_indices) {
        test += std::to_string(idx);
        test.push_back('\n');
    }
    write_file(dir / "splits" / (tag + "_target_test.csv"), test);
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["source"] = cfg.source_path.string();
    j["target"] = cfg.target_path.string();
    j["csv_header"] = cfg.csv_header;
    j["label_column"] = cfg.label_column;
    j["trials"] = cfg.trials;
    ordered_json methods = ordered_json::array();
    for (Method m : cfg.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["source_per_class"] = cfg.split.source_per_class;
    j["target_labeled_per_class"] = cfg.split.target_labeled_per_class;
    j["hidden_nodes"] = cfg.hyperparams.hidden_nodes;
    j["activation"] = to_string(cfg.hyperparams.activation);
    j["elm_lambda"] = cfg.elm_lambda;
    j["lambda1"] = cfg.hyperparams.lambda1;
    j["lambda2"] = cfg.hyperparams.lambda2;
    j["lambda3"] = cfg.hyperparams.lambda3;
    j["epsilon"] = cfg.hyperparams.epsilon;
    j["delta"] = cfg.hyperparams.delta;
    j["inner_max_iters"] = cfg.hyperparams.inner_max_iters;
    j["inner_tol"] = cfg.hyperparams.inner_tol;
    j["outer_max_iters"] = cfg.hyperparams.outer_max_iters;
    j["outer_tol"] = cfg.hyperparams.outer_tol;
    if (cfg.pca_dims) {
        j["pca_dims"] = *cfg.pca_dims;
    } else {
        j["pca_dims"] = nullptr;
    }
    j["base_seed"] = cfg.base_seed;
    j["output_dir"] = cfg.output_dir.string();
    return j;
}

} // namespace

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
    validate_config(cfg);
    PreparedData data = prepare_data(cfg);
    return run_trial_prepared(data, cfg, trial_index);
}

AggregateResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    PreparedData data = prepare_data(cfg);

    AggregateResult result;
    result.config = cfg;
    result.class_count = data.source.class_count;
    result.trials.reserve(cfg.trials);
    for (std::size_t k = 0; k < cfg.trials; ++k) {
        try {
            result.trials.push_back(run_trial_prepared(data, cfg, k));
        } catch (const Error& e) {
            raise(e.kind(), "trial " + std::to_string(k) + " failed: " + e.what());
        }
    }

    const std::size_t method_count = cfg.methods.size();
    const double trial_count = static_cast<double>(cfg.trials);
    result.mean_accuracy.assign(method_count, 0.0);
    result.stddev_accuracy.assign(method_count, 0.0);
    for (const TrialResult& trial : result.trials) {
        for (std::size_t m = 0; m < method_count; ++m) {
            result.mean_accuracy[m] += trial.accuracy[m];
        }
    }
    for (double& mean : result.mean_accuracy) mean /= trial_count;
    if (cfg.trials > 1) {
        for (const TrialResult& trial : result.trials) {
            for (std::size_t m = 0; m < method_count; ++m) {
                double d = trial.accuracy[m] - result.mean_accuracy[m];
                result.stddev_accuracy[m] += d * d;
            }
        }
        for (double& sd : result.stddev_accuracy) {
            sd = std::sqrt(sd / (trial_count - 1.0));
        }
    } else {
        result.notes.push_back("single trial: standard deviation reported as 0 by convention");
    }

    const std::size_t c = static_cast<std::size_t>(result.class_count);
    result.mean_confusion.assign(method_count,
                                 std::vector<std::vector<double>>(c, std::vector<double>(c, 0.0)));
    for (const TrialResult& trial : result.trials) {
        for (std::size_t m = 0; m < method_count; ++m) {
            for (std::size_t i = 0; i < c; ++i) {
                for (std::size_t j = 0; j < c; ++j) {
                    result.mean_confusion[m][i][j] +=
                        static_cast<double>(trial.confusion[m][i][j]) / trial_count;
                }
            }
        }
    }

    emit_report(result, ReportFormat::csv, cfg.output_dir);
    emit_report(result, ReportFormat::json, cfg.output_dir);
    return result;
}

void emit_report(const AggregateResult& result, ReportFormat format, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        raise(ErrorKind::io_error, "cannot create '" + dir.string() + "': " + ec.message());
    }
    const auto& methods = result.config.methods;

    if (format == ReportFormat::csv) {
        std::string acc = "trial";
        for (Method m : methods) {
            acc.push_back(',');
            acc += to_string(m);
        }
        acc.push_back('\n');
        for (const TrialResult& trial : result.trials) {
            acc += std::to_string(trial.trial_index);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                acc.push_back(',');
                acc += sig6(trial.accuracy[m]);
            }
            acc.push_back('\n');
        }
        acc += "mean";
        for (double v : result.mean_accuracy) {
            acc.push_back(',');
            acc += sig6(v);
        }
        acc.push_back('\n');
        acc += "stddev";
        for (double v : result.stddev_accuracy) {
            acc.push_back(',');
            acc += sig6(v);
        }
        acc.push_back('\n');
        write_file(dir / "accuracy.csv", acc);

        const std::size_t c = static_cast<std::size_t>(result.class_count);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            std::string conf = "class";
            for (std::size_t j = 0; j < c; ++j) {
                conf += ",pred_" + std::to_string(j);
            }
            conf.push_back('\n');
            for (std::size_t i = 0; i < c; ++i) {
                conf += std::to_string(i);
                for (std::size_t j = 0; j < c; ++j) {
                    conf.push_back(',');
                    conf += sig6(result.mean_confusion[m][i][j]);
                }
                conf.push_back('\n');
            }
            write_file(dir / ("confusion_" + std::string(to_string(methods[m])) + ".csv"), conf);
        }

        bool has_ptelm = std::find(methods.begin(), methods.end(), Method::ptelm) != methods.end();
        if (has_ptelm) {
            std::string trace = "trial,iteration,objective\n";
            for (const TrialResult& trial : result.trials) {
                for (std::size_t i = 0; i < trial.objective_trace.size(); ++i) {
                    trace += std::to_string(trial.trial_index);
                    trace.push_back(',');
                    trace += std::to_string(i);
                    trace.push_back(',');
                    trace += shortest(trial.objective_trace[i]);
                    trace.push_back('\n');
                }
            }
            write_file(dir / "objective_trace.csv", trace);
        }
    } else {
        ordered_json summary;
        summary["version"] = kVersion;
        summary["config"] = config_to_json(result.config);
        summary["class_count"] = result.class_count;
        summary["notes"] = result.notes;
        ordered_json mean, stddev, mean_confusion;
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const char* name = to_string(methods[m]);
            mean[name] = result.mean_accuracy[m];
            stddev[name] = result.stddev_accuracy[m];
            mean_confusion[name] = result.mean_confusion[m];
        }
        summary["mean_accuracy"] = mean;
        summary["stddev_accuracy"] = stddev;
        summary["mean_confusion"] = mean_confusion;
        ordered_json trials = ordered_json::array();
        for (const TrialResult& trial : result.trials) {
            ordered_json t;
            t["trial"] = trial.trial_index;
            ordered_json acc, conf;
            for (std::size_t m = 0; m < methods.size(); ++m) {
                acc[to_string(methods[m])] = trial.accuracy[m];
                conf[to_string(methods[m])] = trial.confusion[m];
            }
            t["accuracy"] = acc;
            t["confusion"] = conf;
            t["objective_trace"] = trial.objective_trace;
            t["source_train_indices"] = trial.source_train_indices;
            t["target_train_indices"] = trial.target_train_indices;
            t["target_test_indices"] = trial.target_test_indices;
            trials.push_back(std::move(t));
        }
        summary["trials"] = trials;
        write_file(dir / "summary.json", summary.dump(2) + "\n");
    }

    for (const TrialResult& trial : result.trials) {
        write_manifests(dir, trial);
    }
}

std::vector<SweepPoint> sensitivity_sweep(const ExperimentConfig& cfg, const std::string& param,
                                          const std::vector<double>& grid) {
    std::string canonical = param == "L" ? "hidden_nodes" : param;
    if (canonical != "lambda1" && canonical != "lambda2" && canonical != "lambda3" &&
        canonical != "hidden_nodes") {
        raise(ErrorKind::invalid_config,
              "sweep parameter must be one of lambda1, lambda2, lambda3, L (hidden_nodes); got '" +
                  param + "'");
    }
    if (grid.empty()) {
        raise(ErrorKind::invalid_config, "sweep grid is empty");
    }
    validate_config(cfg);

    std::vector<SweepPoint> points;
    points.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ExperimentConfig sub = cfg;
        const double value = grid[i];
        if (canonical == "hidden_nodes") {
            if (value != std::floor(value) || value < 1.0 || value > 1e9) {
                raise(ErrorKind::invalid_config,
                      "hidden_nodes sweep value " + shortest(value) +
                          " is not a positive integer");
            }
            sub.hyperparams.hidden_nodes = static_cast<std::size_t>(value);
        } else if (canonical == "lambda1") {
            sub.hyperparams.lambda1 = value;
        } else if (canonical == "lambda2") {
            sub.hyperparams.lambda2 = value;
        } else {
            sub.hyperparams.lambda3 = value;
        }
        char tag[32];
        std::snprintf(tag, sizeof(tag), "value_%03zu", i);
        sub.output_dir = cfg.output_dir / tag;
        AggregateResult run = run_experiment(sub);
        SweepPoint point;
        point.value = value;
        point.mean_accuracy = run.mean_accuracy;
        point.stddev_accuracy = run.stddev_accuracy;
        points.push_back(std::move(point));
    }

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        raise(ErrorKind::io_error, "cannot create '" + cfg.output_dir.string() +
                                       "': " + ec.message());
    }
    std::string curve = "value";
    for (Method m : cfg.methods) {
        curve += "," + std::string(to_string(m)) + "_mean";
        curve += "," + std::string(to_string(m)) + "_stddev";
    }
    curve.push_back('\n');
    for (const SweepPoint& point : points) {
        curve += sig6(point.value);
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            curve.push_back(',');
            curve += sig6(point.mean_accuracy[m]);
            curve.push_back(',');
            curve += sig6(point.stddev_accuracy[m]);
        }
        curve.push_back('\n');
    }
    write_file(cfg.output_dir / ("sweep_" + canonical + ".csv"), curve);

    ordered_json j;
    j["param"] = canonical;
    j["grid"] = grid;
    ordered_json point_list = ordered_json::array();
    for (const SweepPoint& point : points) {
        ordered_json p;
        p["value"] = point.value;
        ordered_json mean, stddev;
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            mean[to_string(cfg.methods[m])] = point.mean_accuracy[m];
            stddev[to_string(cfg.methods[m])] = point.stddev_accuracy[m];
        }
        p["mean_accuracy"] = mean;
        p["stddev_accuracy"] = stddev;
        point_list.push_back(std::move(p));
    }
    j["points"] = point_list;
    write_file(cfg.output_dir / ("sweep_" + canonical + ".json"), j.dump(2) + "\n");
    return points;
}

void write_split_manifests(const ExperimentConfig& cfg, std::size_t trial_index) {
    validate_config(cfg);
    PreparedData data = prepare_data(cfg);
    const std::uint64_t seed = cfg.base_seed + trial_index;
    SplitSpec spec = cfg.split;
    spec.trial_seed = seed;
    DomainSplit source_split = sample_split(data.source, spec, SplitRole::source);
    DomainSplit target_split = sample_split(data.target, spec, SplitRole::target);
    TrialResult stub;
    stub.trial_index = trial_index;
    stub.source_train_indices = std::move(source_split.train_indices);
    stub.target_train_indices = std::move(target_split.train_indices);
    stub.target_test_indices = std::move(target_split.test_indices);
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        raise(ErrorKind::io_error, "cannot create '" + cfg.output_dir.string() +
                                       "': " + ec.message());
    }
    write_manifests(cfg.output_dir, stub);
}

} // namespace ptelm

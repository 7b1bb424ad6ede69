#include "ptelm/ptelm.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "../core/data.hpp"
#include "../core/elm.hpp"
#include "../core/experiment.hpp"
#include "../core/transfer.hpp"
#include "../core/version.hpp"

namespace {

thread_local std::string g_last_error;

ptelm_status status_from(ptelm::ErrorCategory category) {
    switch (category) {
    case ptelm::ErrorCategory::config: return PTELM_ERROR_CONFIG;
    case ptelm::ErrorCategory::data: return PTELM_ERROR_DATA;
    case ptelm::ErrorCategory::numeric: return PTELM_ERROR_NUMERIC;
    case ptelm::ErrorCategory::invalid: break;
    }
    return PTELM_ERROR_INVALID;
}

ptelm_status fail_invalid(const char* message) {
    g_last_error = message;
    return PTELM_ERROR_INVALID;
}

template <typename Fn>
ptelm_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return PTELM_OK;
    } catch (const ptelm::Error& e) {
        g_last_error = e.what();
        return status_from(e.category());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PTELM_ERROR_INVALID;
    }
}

ptelm::DenseMatrix matrix_from(const double* values, size_t rows, size_t cols) {
    return ptelm::DenseMatrix(rows, cols, std::vector<double>(values, values + rows * cols));
}

ptelm::PtelmHyperparams convert(const ptelm_hyperparams& hp) {
    ptelm::PtelmHyperparams out;
    out.lambda1 = hp.lambda1;
    out.lambda2 = hp.lambda2;
    out.lambda3 = hp.lambda3;
    out.hidden_nodes = hp.hidden_nodes;
    out.activation = ptelm::activation_from_string(
        hp.activation != nullptr ? hp.activation : "sigmoid");
    out.epsilon = hp.epsilon;
    out.delta = hp.delta;
    out.inner_max_iters = hp.inner_max_iters;
    out.inner_tol = hp.inner_tol;
    out.outer_max_iters = hp.outer_max_iters;
    out.outer_tol = hp.outer_tol;
    return out;
}

} // namespace

struct ptelm_dataset {
    ptelm::DomainDataset data;
};

struct ptelm_elm_model {
    ptelm::ElmModel model;
};

struct ptelm_transfer_model {
    ptelm::PtelmModel model;
};

struct ptelm_experiment {
    ptelm::ExperimentConfig config;
    bool has_result = false;
    ptelm::AggregateResult result;
};

namespace {

ptelm_status aggregate_value(const ptelm_experiment* experiment, const char* method,
                             bool want_mean, double* out) {
    if (experiment == nullptr || method == nullptr || out == nullptr) {
        return fail_invalid("null argument");
    }
    if (!experiment->has_result) {
        return fail_invalid("experiment has not been run");
    }
    return guarded([&] {
        ptelm::Method wanted = ptelm::method_from_string(method);
        const auto& methods = experiment->result.config.methods;
        auto it = std::find(methods.begin(), methods.end(), wanted);
        if (it == methods.end()) {
            ptelm::raise(ptelm::ErrorKind::invalid_argument,
                         std::string("method '") + method + "' was not part of the experiment");
        }
        std::size_t index = static_cast<std::size_t>(it - methods.begin());
        *out = want_mean ? experiment->result.mean_accuracy[index]
                         : experiment->result.stddev_accuracy[index];
    });
}

} // namespace

extern "C" {

const char* ptelm_version(void) {
    return ptelm::kVersion;
}

const char* ptelm_last_error(void) {
    return g_last_error.c_str();
}

ptelm_status ptelm_dataset_load_csv(const char* path, int has_header, long label_column,
                                    ptelm_dataset** out) {
    if (path == nullptr || out == nullptr) return fail_invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        auto loaded = ptelm::load_csv(path, has_header != 0, label_column);
        *out = new ptelm_dataset{std::move(loaded.dataset)};
    });
}

ptelm_status ptelm_dataset_create(const double* features, size_t rows, size_t cols,
                                  const int* labels, int class_count, ptelm_dataset** out) {
    if (features == nullptr || labels == nullptr || out == nullptr) {
        return fail_invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] {
        ptelm::DomainDataset ds;
        ds.name = "memory";
        ds.features = matrix_from(features, rows, cols);
        ds.labels.assign(labels, labels + rows);
        if (class_count > 0) {
            ds.class_count = class_count;
        } else {
            int max_label = -1;
            for (int label : ds.labels) max_label = std::max(max_label, label);
            ds.class_count = max_label + 1;
        }
        ptelm::validate_dataset(ds);
        *out = new ptelm_dataset{std::move(ds)};
    });
}

ptelm_status ptelm_dataset_dims(const ptelm_dataset* dataset, size_t* rows, size_t* cols,
                                int* class_count) {
    if (dataset == nullptr) return fail_invalid("null dataset");
    if (rows != nullptr) *rows = dataset->data.features.rows();
    if (cols != nullptr) *cols = dataset->data.features.cols();
    if (class_count != nullptr) *class_count = dataset->data.class_count;
    g_last_error.clear();
    return PTELM_OK;
}

ptelm_status ptelm_dataset_standardize(ptelm_dataset* dataset) {
    if (dataset == nullptr) return fail_invalid("null dataset");
    return guarded([&] {
        dataset->data.features = ptelm::standardize(dataset->data.features).data;
    });
}

void ptelm_dataset_free(ptelm_dataset* dataset) {
    delete dataset;
}

ptelm_status ptelm_elm_train(const ptelm_dataset* train, size_t hidden_nodes,
                             const char* activation, double lambda, uint64_t seed,
                             ptelm_elm_model** out) {
    if (train == nullptr || out == nullptr) return fail_invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        ptelm::Activation act =
            ptelm::activation_from_string(activation != nullptr ? activation : "sigmoid");
        auto model = ptelm::fit_elm(train->data.features, train->data.labels,
                                    train->data.class_count, hidden_nodes, act, lambda, seed);
        *out = new ptelm_elm_model{std::move(model)};
    });
}

ptelm_status ptelm_elm_predict(const ptelm_elm_model* model, const double* features, size_t rows,
                               size_t cols, int* labels_out) {
    if (model == nullptr || features == nullptr || labels_out == nullptr) {
        return fail_invalid("null argument");
    }
    return guarded([&] {
        auto labels = ptelm::predict(model->model, matrix_from(features, rows, cols));
        std::copy(labels.begin(), labels.end(), labels_out);
    });
}

void ptelm_elm_model_free(ptelm_elm_model* model) {
    delete model;
}

void ptelm_hyperparams_init(ptelm_hyperparams* hp) {
    if (hp == nullptr) return;
    ptelm::PtelmHyperparams defaults;
    hp->lambda1 = defaults.lambda1;
    hp->lambda2 = defaults.lambda2;
    hp->lambda3 = defaults.lambda3;
    hp->hidden_nodes = defaults.hidden_nodes;
    hp->activation = "sigmoid";
    hp->epsilon = defaults.epsilon;
    hp->delta = defaults.delta;
    hp->inner_max_iters = defaults.inner_max_iters;
    hp->inner_tol = defaults.inner_tol;
    hp->outer_max_iters = defaults.outer_max_iters;
    hp->outer_tol = defaults.outer_tol;
}

ptelm_status ptelm_transfer_train(const ptelm_dataset* source, const ptelm_dataset* target,
                                  const ptelm_hyperparams* hp, uint64_t seed,
                                  ptelm_transfer_model** out) {
    if (source == nullptr || target == nullptr || hp == nullptr || out == nullptr) {
        return fail_invalid("null argument");
    }
    *out = nullptr;
    return guarded([&] {
        auto model = ptelm::train_ptelm(source->data.features, source->data.labels,
                                        target->data.features, target->data.labels,
                                        convert(*hp), seed);
        *out = new ptelm_transfer_model{std::move(model)};
    });
}

ptelm_status ptelm_transfer_predict(const ptelm_transfer_model* model, const double* features,
                                    size_t rows, size_t cols, int* labels_out) {
    if (model == nullptr || features == nullptr || labels_out == nullptr) {
        return fail_invalid("null argument");
    }
    return guarded([&] {
        auto labels = ptelm::predict_target(model->model, matrix_from(features, rows, cols));
        std::copy(labels.begin(), labels.end(), labels_out);
    });
}

ptelm_status ptelm_transfer_trace(const ptelm_transfer_model* model, const double** values,
                                  size_t* count) {
    if (model == nullptr || values == nullptr || count == nullptr) {
        return fail_invalid("null argument");
    }
    *values = model->model.objective_trace.data();
    *count = model->model.objective_trace.size();
    g_last_error.clear();
    return PTELM_OK;
}

void ptelm_transfer_model_free(ptelm_transfer_model* model) {
    delete model;
}

ptelm_status ptelm_accuracy(const int* predicted, const int* actual, size_t count, double* out) {
    if (predicted == nullptr || actual == nullptr || out == nullptr) {
        return fail_invalid("null argument");
    }
    return guarded([&] {
        *out = ptelm::accuracy(std::vector<int>(predicted, predicted + count),
                               std::vector<int>(actual, actual + count));
    });
}

ptelm_status ptelm_experiment_create(const char* config_path, ptelm_experiment** out) {
    if (config_path == nullptr || out == nullptr) return fail_invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        auto experiment = new ptelm_experiment{};
        try {
            experiment->config = ptelm::load_config(config_path);
        } catch (...) {
            delete experiment;
            throw;
        }
        *out = experiment;
    });
}

ptelm_status ptelm_experiment_set(ptelm_experiment* experiment, const char* key,
                                  const char* value) {
    if (experiment == nullptr || key == nullptr || value == nullptr) {
        return fail_invalid("null argument");
    }
    return guarded([&] {
        ptelm::apply_config_override(experiment->config, key, value);
        experiment->has_result = false;
    });
}

ptelm_status ptelm_experiment_run(ptelm_experiment* experiment) {
    if (experiment == nullptr) return fail_invalid("null experiment");
    return guarded([&] {
        experiment->result = ptelm::run_experiment(experiment->config);
        experiment->has_result = true;
    });
}

ptelm_status ptelm_experiment_sweep(ptelm_experiment* experiment, const char* param,
                                    const double* grid, size_t count) {
    if (experiment == nullptr || param == nullptr || grid == nullptr) {
        return fail_invalid("null argument");
    }
    return guarded([&] {
        ptelm::sensitivity_sweep(experiment->config, param,
                                 std::vector<double>(grid, grid + count));
    });
}

ptelm_status ptelm_experiment_write_splits(ptelm_experiment* experiment, size_t trial_index) {
    if (experiment == nullptr) return fail_invalid("null experiment");
    return guarded([&] { ptelm::write_split_manifests(experiment->config, trial_index); });
}

ptelm_status ptelm_experiment_method_count(const ptelm_experiment* experiment, size_t* count) {
    if (experiment == nullptr || count == nullptr) return fail_invalid("null argument");
    *count = experiment->config.methods.size();
    g_last_error.clear();
    return PTELM_OK;
}

ptelm_status ptelm_experiment_method_name(const ptelm_experiment* experiment, size_t index,
                                          const char** name) {
    if (experiment == nullptr || name == nullptr) return fail_invalid("null argument");
    if (index >= experiment->config.methods.size()) {
        return fail_invalid("method index out of range");
    }
    *name = ptelm::to_string(experiment->config.methods[index]);
    g_last_error.clear();
    return PTELM_OK;
}

ptelm_status ptelm_experiment_mean_accuracy(const ptelm_experiment* experiment,
                                            const char* method, double* out) {
    return aggregate_value(experiment, method, true, out);
}

ptelm_status ptelm_experiment_stddev_accuracy(const ptelm_experiment* experiment,
                                              const char* method, double* out) {
    return aggregate_value(experiment, method, false, out);
}

void ptelm_experiment_free(ptelm_experiment* experiment) {
    delete experiment;
}

} // extern "C"

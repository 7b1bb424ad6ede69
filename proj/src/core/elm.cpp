#include "elm.hpp"

#include <cmath>

#include "rng.hpp"

namespace ptelm {

Activation activation_from_string(const std::string& name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    raise(ErrorKind::invalid_config, "unknown activation '" + name + "'");
}

const char* to_string(Activation activation) {
    switch (activation) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    }
    return "sigmoid";
}

HiddenLayer init_hidden_layer(std::size_t input_dim, std::size_t nodes,
                              Activation activation, std::uint64_t seed) {
    if (input_dim == 0 || nodes == 0) {
        raise(ErrorKind::invalid_dimension, "hidden layer needs positive input_dim and nodes");
    }
    HiddenLayer layer;
    layer.activation = activation;
    layer.input_weights = DenseMatrix(input_dim, nodes);
    layer.biases.resize(nodes);
    RandomStream stream(seed);
    for (double& w : layer.input_weights.values()) w = stream.uniform(-1.0, 1.0);
    for (double& b : layer.biases) b = stream.uniform(-1.0, 1.0);
    return layer;
}

namespace {

double apply_activation(Activation activation, double z) {
    switch (activation) {
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::tanh: return std::tanh(z);
    case Activation::relu: return z > 0.0 ? z : 0.0;
    }
    return z;
}

} // namespace

DenseMatrix hidden_map(const HiddenLayer& layer, const DenseMatrix& inputs) {
    if (inputs.cols() != layer.input_dim()) {
        raise(ErrorKind::dimension_mismatch,
              "hidden_map: input has " + std::to_string(inputs.cols()) +
                  " features, layer expects " + std::to_string(layer.input_dim()));
    }
    if (inputs.empty()) return DenseMatrix::zero_rows(layer.nodes());
    DenseMatrix h = matmul(inputs, layer.input_weights);
    for (std::size_t i = 0; i < h.rows(); ++i) {
        double* row = h.row_ptr(i);
        for (std::size_t j = 0; j < h.cols(); ++j) {
            row[j] = apply_activation(layer.activation, row[j] + layer.biases[j]);
        }
    }
    return h;
}

DenseMatrix one_hot(const std::vector<int>& labels, int class_count) {
    if (class_count < 1) {
        raise(ErrorKind::invalid_dimension, "one_hot: class_count must be positive");
    }
    if (labels.empty()) return DenseMatrix::zero_rows(static_cast<std::size_t>(class_count));
    DenseMatrix y(labels.size(), static_cast<std::size_t>(class_count));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count) {
            raise(ErrorKind::label_out_of_range,
                  "one_hot: label " + std::to_string(labels[i]) + " outside [0, " +
                      std::to_string(class_count) + ")");
        }
        y(i, static_cast<std::size_t>(labels[i])) = 1.0;
    }
    return y;
}

DenseMatrix train_elm(const DenseMatrix& hidden, const DenseMatrix& targets, double lambda) {
    if (hidden.empty()) {
        raise(ErrorKind::empty_domain, "train_elm: no training samples");
    }
    if (hidden.rows() != targets.rows()) {
        raise(ErrorKind::dimension_mismatch,
              "train_elm: " + std::to_string(hidden.rows()) + " hidden rows vs " +
                  std::to_string(targets.rows()) + " target rows");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        raise(ErrorKind::invalid_range, "train_elm: lambda must be positive and finite");
    }
    DenseMatrix lhs = gram(hidden);
    add_scaled_identity_in_place(lhs, 1.0 / lambda);
    return solve_spd(lhs, matmul_transposed_left(hidden, targets));
}

std::vector<int> predict_labels(const DenseMatrix& scores) {
    std::vector<int> labels(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        const double* row = scores.row_ptr(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < scores.cols(); ++j) {
            if (row[j] > row[best]) best = j; // strict: ties keep the lowest index
        }
        labels[i] = static_cast<int>(best);
    }
    return labels;
}

std::vector<int> predict(const HiddenLayer& layer, const DenseMatrix& output_weights,
                         const DenseMatrix& inputs) {
    if (output_weights.rows() != layer.nodes()) {
        raise(ErrorKind::dimension_mismatch,
              "predict: output weights have " + std::to_string(output_weights.rows()) +
                  " rows, layer has " + std::to_string(layer.nodes()) + " nodes");
    }
    return predict_labels(matmul(hidden_map(layer, inputs), output_weights));
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.size() != actual.size()) {
        raise(ErrorKind::dimension_mismatch, "accuracy: label vectors differ in length");
    }
    if (predicted.empty()) {
        raise(ErrorKind::empty_domain, "accuracy: no labels to compare");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == actual[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

ElmModel fit_elm(const DenseMatrix& inputs, const std::vector<int>& labels, int class_count,
                 std::size_t nodes, Activation activation, double lambda, std::uint64_t seed) {
    if (inputs.rows() != labels.size()) {
        raise(ErrorKind::dimension_mismatch, "fit_elm: sample and label counts differ");
    }
    ElmModel model;
    model.class_count = class_count;
    model.layer = init_hidden_layer(inputs.cols(), nodes, activation, seed);
    model.output_weights =
        train_elm(hidden_map(model.layer, inputs), one_hot(labels, class_count), lambda);
    return model;
}

std::vector<int> predict(const ElmModel& model, const DenseMatrix& inputs) {
    return predict(model.layer, model.output_weights, inputs);
}

} // namespace ptelm

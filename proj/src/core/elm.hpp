#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace ptelm {

enum class Activation { sigmoid, tanh, relu };

Activation activation_from_string(const std::string& name);
const char* to_string(Activation activation);

// Random feature map of an extreme learning machine: fixed input weights and
// biases, never trained. Drawn once per model from a seeded stream.
struct HiddenLayer {
    DenseMatrix input_weights;  // input_dim x nodes
    std::vector<double> biases; // nodes
    Activation activation = Activation::sigmoid;

    std::size_t nodes() const { return biases.size(); }
    std::size_t input_dim() const { return input_weights.rows(); }
};

// Weights and biases are uniform on [-1, 1), drawn from a single stream
// seeded with `seed`: all of input_weights in row-major order, then the
// biases. Keeping the draw order fixed is what makes models reproducible
// across platforms.
HiddenLayer init_hidden_layer(std::size_t input_dim, std::size_t nodes,
                              Activation activation, std::uint64_t seed);

// Applies the layer to a batch of inputs (rows are samples):
// g(X W + 1 b^T), one column per hidden node.
DenseMatrix hidden_map(const HiddenLayer& layer, const DenseMatrix& inputs);

// One-hot target matrix with entries in {0, 1}; labels must lie in
// [0, class_count). An empty label vector yields a zero-row matrix.
DenseMatrix one_hot(const std::vector<int>& labels, int class_count);

// Regularized least-squares output weights
//   beta = (H^T H + I/lambda)^-1 H^T Y,
// the closed-form minimizer of ||H beta - Y||_F^2 + ||beta||_F^2 / lambda.
// Larger lambda means weaker regularization.
DenseMatrix train_elm(const DenseMatrix& hidden, const DenseMatrix& targets, double lambda);

// Row-wise argmax; ties resolve to the lowest class index.
std::vector<int> predict_labels(const DenseMatrix& scores);

std::vector<int> predict(const HiddenLayer& layer, const DenseMatrix& output_weights,
                         const DenseMatrix& inputs);

// Fraction of positions where the two label vectors agree. Vectors must be
// non-empty and of equal length.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual);

// Convenience bundle: feature map plus trained output weights.
struct ElmModel {
    HiddenLayer layer;
    DenseMatrix output_weights; // nodes x class_count
    int class_count = 0;
};

ElmModel fit_elm(const DenseMatrix& inputs, const std::vector<int>& labels, int class_count,
                 std::size_t nodes, Activation activation, double lambda, std::uint64_t seed);

std::vector<int> predict(const ElmModel& model, const DenseMatrix& inputs);

} // namespace ptelm

#include "transfer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ptelm {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        raise(ErrorKind::invalid_config, std::string(name) + " must be positive and finite");
    }
}

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        raise(ErrorKind::invalid_range, std::string(name) + " must be non-negative and finite");
    }
}

// Shape checks shared by the weight-update entry points. Hs must be
// non-empty; Ht may have zero rows (no target samples).
void check_transfer_shapes(const DenseMatrix& hs, const DenseMatrix& ys,
                           const DenseMatrix& ht, const DenseMatrix& yt,
                           const DenseMatrix& projection) {
    if (hs.empty()) {
        raise(ErrorKind::empty_domain, "transfer solve: no source samples");
    }
    if (hs.rows() != ys.rows() || ht.rows() != yt.rows()) {
        raise(ErrorKind::dimension_mismatch, "transfer solve: sample/target row mismatch");
    }
    if (ys.cols() != yt.cols()) {
        raise(ErrorKind::class_mismatch, "transfer solve: source and target class counts differ");
    }
    const std::size_t nodes = hs.cols();
    if (ht.cols() != nodes || projection.rows() != nodes || projection.cols() != nodes) {
        raise(ErrorKind::dimension_mismatch, "transfer solve: hidden dimensions disagree");
    }
}

struct WeightSystem {
    DenseMatrix base; // lambda1 Hs^T Hs + M^T Ht^T Ht M + lambda3 M^T M
    DenseMatrix rhs;  // lambda1 Hs^T Ys + M^T Ht^T Yt
};

// Both update_source_weights and the inner loop assemble the system through
// this one function so that, given the same inputs, they produce the same
// floating-point results bit for bit.
WeightSystem build_weight_system(const DenseMatrix& hs, const DenseMatrix& ht,
                                 const DenseMatrix& projection,
                                 const DenseMatrix& ys, const DenseMatrix& yt,
                                 const PtelmHyperparams& hp) {
    check_transfer_shapes(hs, ys, ht, yt, projection);
    require_nonnegative(hp.lambda1, "lambda1");
    require_nonnegative(hp.lambda2, "lambda2");
    require_nonnegative(hp.lambda3, "lambda3");

    WeightSystem sys;
    sys.base = gram(hs);
    scale_in_place(sys.base, hp.lambda1);
    if (!ht.empty()) {
        // M^T (Ht^T Ht) M
        DenseMatrix gt_m = matmul(gram(ht), projection);
        add_in_place(sys.base, matmul_transposed_left(projection, gt_m));
    }
    if (hp.lambda3 != 0.0) {
        add_scaled_in_place(sys.base, gram(projection), hp.lambda3);
    }

    sys.rhs = matmul_transposed_left(hs, ys);
    scale_in_place(sys.rhs, hp.lambda1);
    if (!ht.empty()) {
        add_in_place(sys.rhs, matmul_transposed_left(projection, matmul_transposed_left(ht, yt)));
    }
    return sys;
}

DenseMatrix solve_weight_system(const WeightSystem& sys, const std::vector<double>& reweight,
                                double lambda2) {
    DenseMatrix lhs = sys.base;
    if (lambda2 != 0.0) {
        if (reweight.size() != lhs.rows()) {
            raise(ErrorKind::dimension_mismatch,
                  "source weight solve: reweight length does not match hidden nodes");
        }
        for (std::size_t i = 0; i < lhs.rows(); ++i) {
            lhs(i, i) += lambda2 * reweight[i];
        }
    }
    return solve_spd(lhs, sys.rhs);
}

// Fit terms of the objective (everything except the row-sparsity term).
double fit_terms(const DenseMatrix& hs, const DenseMatrix& ys,
                 const DenseMatrix& ht, const DenseMatrix& yt,
                 const DenseMatrix& source_weights, const DenseMatrix& projection,
                 const PtelmHyperparams& hp) {
    DenseMatrix target_weights = matmul(projection, source_weights);
    double value = 0.0;
    if (!ht.empty()) {
        double r = frobenius_norm(subtract(matmul(ht, target_weights), yt));
        value += 0.5 * r * r;
    }
    double s = frobenius_norm(subtract(matmul(hs, source_weights), ys));
    value += 0.5 * hp.lambda1 * s * s;
    double t = frobenius_norm(target_weights);
    value += 0.5 * hp.lambda3 * t * t;
    return value;
}

} // namespace

void PtelmHyperparams::validate_for_training() const {
    require_positive(lambda1, "lambda1");
    require_positive(lambda2, "lambda2");
    require_positive(lambda3, "lambda3");
    require_positive(epsilon, "epsilon");
    require_positive(delta, "delta");
    require_positive(inner_tol, "inner_tol");
    require_positive(outer_tol, "outer_tol");
    if (hidden_nodes == 0) {
        raise(ErrorKind::invalid_config, "hidden_nodes must be positive");
    }
    if (inner_max_iters == 0 || outer_max_iters == 0) {
        raise(ErrorKind::invalid_config, "iteration limits must be positive");
    }
}

double transfer_objective(const DenseMatrix& hs, const DenseMatrix& ys,
                          const DenseMatrix& ht, const DenseMatrix& yt,
                          const DenseMatrix& source_weights, const DenseMatrix& projection,
                          const PtelmHyperparams& hp) {
    check_transfer_shapes(hs, ys, ht, yt, projection);
    return fit_terms(hs, ys, ht, yt, source_weights, projection, hp) +
           0.5 * hp.lambda2 * l21_norm(source_weights);
}

double smoothed_l21(const DenseMatrix& m, double epsilon) {
    require_positive(epsilon, "epsilon");
    double sum = 0.0;
    for (double r : row_norms(m)) {
        sum += r - 0.5 * epsilon * std::log((2.0 * r + epsilon) / epsilon);
    }
    return sum;
}

std::vector<double> l21_reweight(const DenseMatrix& m, double epsilon) {
    require_positive(epsilon, "epsilon");
    std::vector<double> weights = row_norms(m);
    for (double& w : weights) w = 1.0 / (2.0 * w + epsilon);
    return weights;
}

DenseMatrix l21_subgradient(const DenseMatrix& m, double epsilon) {
    std::vector<double> weights = l21_reweight(m, epsilon);
    DenseMatrix d(weights.size(), weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) d(i, i) = weights[i];
    return d;
}

DenseMatrix update_source_weights(const DenseMatrix& hs, const DenseMatrix& ht,
                                  const DenseMatrix& projection,
                                  const DenseMatrix& ys, const DenseMatrix& yt,
                                  const DenseMatrix& subgradient,
                                  const PtelmHyperparams& hp) {
    WeightSystem sys = build_weight_system(hs, ht, projection, ys, yt, hp);
    const std::size_t nodes = hs.cols();
    if (subgradient.rows() != nodes || subgradient.cols() != nodes) {
        raise(ErrorKind::dimension_mismatch, "update_source_weights: subgradient shape mismatch");
    }
    std::vector<double> reweight(nodes, 1.0);
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = 0; j < nodes; ++j) {
            if (i == j) continue;
            if (subgradient(i, j) != 0.0) {
                raise(ErrorKind::invalid_argument,
                      "update_source_weights: subgradient must be diagonal");
            }
        }
        reweight[i] = subgradient(i, i);
        if (hp.lambda2 != 0.0 && !(reweight[i] > 0.0)) {
            raise(ErrorKind::invalid_range,
                  "update_source_weights: subgradient diagonal must be positive");
        }
    }
    return solve_weight_system(sys, reweight, hp.lambda2);
}

SourceSolve solve_source_weights(const DenseMatrix& hs, const DenseMatrix& ht,
                                 const DenseMatrix& projection,
                                 const DenseMatrix& ys, const DenseMatrix& yt,
                                 const PtelmHyperparams& hp) {
    if (hp.inner_max_iters == 0) {
        raise(ErrorKind::invalid_config, "inner_max_iters must be positive");
    }
    require_positive(hp.epsilon, "epsilon");
    require_positive(hp.inner_tol, "inner_tol");
    WeightSystem sys = build_weight_system(hs, ht, projection, ys, yt, hp);

    SourceSolve result;
    std::vector<double> reweight(hs.cols(), 1.0); // identity reweighting to start
    for (std::size_t k = 0; k < hp.inner_max_iters; ++k) {
        DenseMatrix next = solve_weight_system(sys, reweight, hp.lambda2);
        result.surrogate_trace.push_back(
            fit_terms(hs, ys, ht, yt, next, projection, hp) +
            0.5 * hp.lambda2 * smoothed_l21(next, hp.epsilon));
        // lambda2 == 0 makes the system independent of the reweighting, so
        // the first solve is already the fixed point.
        bool stop = hp.lambda2 == 0.0;
        if (!stop && k > 0) {
            double change = frobenius_norm(subtract(next, result.weights));
            stop = change < hp.inner_tol * (1.0 + frobenius_norm(result.weights));
        }
        result.weights = std::move(next);
        result.iterations = k + 1;
        if (stop) break;
        reweight = l21_reweight(result.weights, hp.epsilon);
    }
    return result;
}

DenseMatrix update_projection(const DenseMatrix& ht, const DenseMatrix& yt,
                              const DenseMatrix& source_weights, double lambda3, double delta) {
    require_nonnegative(lambda3, "lambda3");
    require_nonnegative(delta, "delta");
    if (ht.rows() != yt.rows()) {
        raise(ErrorKind::dimension_mismatch, "update_projection: target row mismatch");
    }
    const std::size_t nodes = ht.cols();
    if (source_weights.rows() != nodes || source_weights.cols() != yt.cols()) {
        raise(ErrorKind::dimension_mismatch, "update_projection: weight shape mismatch");
    }

    DenseMatrix lhs = gram(ht);
    add_scaled_identity_in_place(lhs, lambda3);

    DenseMatrix weights_t = transpose(source_weights);
    DenseMatrix weight_gram = gram(weights_t); // B B^T, rank <= classes
    double trace = 0.0;
    for (std::size_t i = 0; i < weight_gram.rows(); ++i) trace += weight_gram(i, i);
    add_scaled_identity_in_place(weight_gram, delta * trace / static_cast<double>(nodes));

    // M = lhs^-1 (Ht^T Yt B^T) weight_gram^-1, solved one side at a time.
    DenseMatrix cross = ht.empty() ? DenseMatrix(nodes, nodes)
                                   : matmul(matmul_transposed_left(ht, yt), weights_t);
    DenseMatrix left = solve_spd(lhs, cross);
    return transpose(solve_spd(weight_gram, transpose(left)));
}

PtelmModel train_ptelm(const DenseMatrix& source_features, const std::vector<int>& source_labels,
                       const DenseMatrix& target_features, const std::vector<int>& target_labels,
                       const PtelmHyperparams& hp, std::uint64_t seed) {
    hp.validate_for_training();
    if (source_features.empty() || source_features.rows() != source_labels.size()) {
        raise(ErrorKind::empty_domain,
              "train_ptelm: source samples and labels must be non-empty and match");
    }
    if (target_features.empty() || target_features.rows() != target_labels.size()) {
        raise(ErrorKind::empty_domain,
              "train_ptelm: target samples and labels must be non-empty and match");
    }

    int max_label = -1;
    for (int label : source_labels) max_label = std::max(max_label, label);
    for (int label : target_labels) max_label = std::max(max_label, label);
    const int class_count = max_label + 1;
    std::vector<bool> in_source(static_cast<std::size_t>(class_count), false);
    std::vector<bool> in_target(static_cast<std::size_t>(class_count), false);
    for (int label : source_labels) {
        if (label < 0) raise(ErrorKind::label_out_of_range, "train_ptelm: negative source label");
        in_source[static_cast<std::size_t>(label)] = true;
    }
    for (int label : target_labels) {
        if (label < 0) raise(ErrorKind::label_out_of_range, "train_ptelm: negative target label");
        in_target[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < class_count; ++c) {
        if (!in_source[static_cast<std::size_t>(c)] || !in_target[static_cast<std::size_t>(c)]) {
            raise(ErrorKind::class_mismatch,
                  "train_ptelm: class " + std::to_string(c) +
                      " must appear in both source and target labels");
        }
    }

    PtelmModel model;
    model.hyperparams = hp;
    model.class_count = class_count;
    model.source_layer =
        init_hidden_layer(source_features.cols(), hp.hidden_nodes, hp.activation, seed);
    model.shared_layer = source_features.cols() == target_features.cols();
    model.target_layer = model.shared_layer
                             ? model.source_layer
                             : init_hidden_layer(target_features.cols(), hp.hidden_nodes,
                                                 hp.activation, seed ^ 0x9e3779b97f4a7c15ULL);

    DenseMatrix hs = hidden_map(model.source_layer, source_features);
    DenseMatrix ht = hidden_map(model.target_layer, target_features);
    DenseMatrix ys = one_hot(source_labels, class_count);
    DenseMatrix yt = one_hot(target_labels, class_count);

    model.projection = DenseMatrix::identity(hp.hidden_nodes);
    double previous = 0.0;
    for (std::size_t round = 0; round < hp.outer_max_iters; ++round) {
        model.source_weights =
            solve_source_weights(hs, ht, model.projection, ys, yt, hp).weights;
        model.projection = update_projection(ht, yt, model.source_weights, hp.lambda3, hp.delta);
        double value =
            transfer_objective(hs, ys, ht, yt, model.source_weights, model.projection, hp);
        model.objective_trace.push_back(value);
        if (round > 0) {
            double decrease = (previous - value) / (1.0 + std::abs(previous));
            if (decrease < hp.outer_tol) break;
        }
        previous = value;
    }
    model.target_weights = matmul(model.projection, model.source_weights);
    return model;
}

std::vector<int> predict_target(const PtelmModel& model, const DenseMatrix& inputs) {
    return predict(model.target_layer, model.target_weights, inputs);
}

} // namespace ptelm

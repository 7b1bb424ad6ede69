#pragma once

#include <cstdint>
#include <vector>

#include "elm.hpp"
#include "matrix.hpp"

namespace ptelm {

// Hyperparameters of the parameter-transfer solver.
//
// The objective being minimized over source weights B (nodes x classes) and
// projection M (nodes x nodes) is
//
//   F(B, M) = 1/2 ||Ht M B - Yt||_F^2        target fit through the bridge
//           + lambda1/2 ||Hs B - Ys||_F^2    source fit
//           + lambda2/2 ||B||_2,1            row sparsity (node pruning)
//           + lambda3/2 ||M B||_F^2          target-weight shrinkage
//
// epsilon smooths the row norms inside the reweighted inner solve; delta
// scales the ridge added to B B^T when updating M (that Gram has rank at
// most the class count, so it is always singular for nodes > classes).
struct PtelmHyperparams {
    double lambda1 = 1.0;
    double lambda2 = 30.0;
    double lambda3 = 10.0;
    std::size_t hidden_nodes = 500;
    Activation activation = Activation::sigmoid;
    double epsilon = 1e-8;
    double delta = 1e-8;
    std::size_t inner_max_iters = 30;
    double inner_tol = 1e-5;
    std::size_t outer_max_iters = 10;
    double outer_tol = 1e-6;

    // Training requires every real hyperparameter strictly positive; the
    // algebraic pieces below are less strict (they accept zero lambdas so
    // the degenerate reductions can be exercised directly).
    void validate_for_training() const;
};

// Value of the transfer objective F(B, M) above. Ht/Yt may have zero rows
// (no target samples), in which case the target fit term vanishes.
double transfer_objective(const DenseMatrix& hs, const DenseMatrix& ys,
                          const DenseMatrix& ht, const DenseMatrix& yt,
                          const DenseMatrix& source_weights, const DenseMatrix& projection,
                          const PtelmHyperparams& hp);

// Smooth stand-in for ||B||_2,1: sum over rows of
//   phi(r) = r - (epsilon/2) ln((2r + epsilon)/epsilon),  r = ||row||_2.
// phi is concave as a function of r^2 with derivative 1/(2r + epsilon)
// there, which is exactly the reweighting factor below — so each inner
// solve minimizes a true quadratic majorizer of the smoothed objective and
// the smoothed objective cannot increase. phi(r) -> r as epsilon -> 0.
double smoothed_l21(const DenseMatrix& m, double epsilon);

// Reweighting factors d_i = 1 / (2 ||row_i||_2 + epsilon).
std::vector<double> l21_reweight(const DenseMatrix& m, double epsilon);

// The same factors as an explicit diagonal matrix: with it, lambda2 D B is
// the (smoothed) subgradient of the row-sparsity term at B.
DenseMatrix l21_subgradient(const DenseMatrix& m, double epsilon);

// One reweighted least-squares step for the source weights: solves
//   (lambda1 Hs^T Hs + M^T Ht^T Ht M + lambda2 D + lambda3 M^T M) B
//     = lambda1 Hs^T Ys + M^T Ht^T Yt
// for diagonal D with positive entries (ignored when lambda2 == 0). This is
// the stationarity condition of the majorized objective at fixed M.
DenseMatrix update_source_weights(const DenseMatrix& hs, const DenseMatrix& ht,
                                  const DenseMatrix& projection,
                                  const DenseMatrix& ys, const DenseMatrix& yt,
                                  const DenseMatrix& subgradient,
                                  const PtelmHyperparams& hp);

struct SourceSolve {
    DenseMatrix weights;
    // Smoothed objective after each reweighted solve; non-increasing by the
    // majorize-minimize argument above.
    std::vector<double> surrogate_trace;
    std::size_t iterations = 0;
};

// Full inner loop at fixed M: starts from the identity reweighting, solves,
// re-derives the weights from the new iterate, and repeats until the
// relative weight change ||B_new - B_old||_F / (1 + ||B_old||_F) falls
// below inner_tol or inner_max_iters is reached. With lambda2 == 0 the
// system does not depend on the reweighting, so the first solve is already
// the fixed point and the loop stops after one iteration. The first iterate
// is bit-identical to update_source_weights with the identity subgradient.
SourceSolve solve_source_weights(const DenseMatrix& hs, const DenseMatrix& ht,
                                 const DenseMatrix& projection,
                                 const DenseMatrix& ys, const DenseMatrix& yt,
                                 const PtelmHyperparams& hp);

// Closed-form projection update at fixed source weights:
//   M = (Ht^T Ht + lambda3 I)^-1 Ht^T Yt B^T (B B^T + delta_eff I)^-1
// with delta_eff = delta * trace(B B^T) / nodes. The ridge makes the
// right-hand Gram invertible; it perturbs the stationarity condition of the
// exact minimizer by O(delta).
DenseMatrix update_projection(const DenseMatrix& ht, const DenseMatrix& yt,
                              const DenseMatrix& source_weights, double lambda3, double delta);

struct PtelmModel {
    HiddenLayer source_layer;
    HiddenLayer target_layer; // same draw as source_layer when dims match
    bool shared_layer = true;
    DenseMatrix source_weights; // nodes x classes
    DenseMatrix projection;     // nodes x nodes
    DenseMatrix target_weights; // projection * source_weights, recomputed
    PtelmHyperparams hyperparams;
    int class_count = 0;
    // Transfer objective after each outer (solve weights, update projection)
    // round; non-increasing up to the delta-sized projection ridge.
    std::vector<double> objective_trace;
};

// Alternating minimization: M starts at the identity, then rounds of
// solve_source_weights / update_projection until the relative decrease of
// the objective falls below outer_tol or outer_max_iters is reached.
// Both domains must be non-empty and carry the same dense label set
// {0, ..., c-1}. When feature dimensions match, source and target share one
// hidden layer seeded with `seed`; otherwise the target layer is drawn from
// a stream seeded with seed ^ 0x9e3779b97f4a7c15.
PtelmModel train_ptelm(const DenseMatrix& source_features, const std::vector<int>& source_labels,
                       const DenseMatrix& target_features, const std::vector<int>& target_labels,
                       const PtelmHyperparams& hp, std::uint64_t seed);

std::vector<int> predict_target(const PtelmModel& model, const DenseMatrix& inputs);

} // namespace ptelm

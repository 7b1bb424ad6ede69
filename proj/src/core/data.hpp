#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace ptelm {

// A labeled domain: feature rows plus dense integer labels in [0, class_count).
struct DomainDataset {
    std::string name;
    DenseMatrix features;    // N x d
    std::vector<int> labels; // N, values in [0, class_count)
    int class_count = 0;
};

// Checks the invariants: label/feature row agreement, label range, and that
// every class occurs at least once. Empty datasets (zero rows) are only
// legal as the test half of a source-domain split.
void validate_dataset(const DomainDataset& ds, bool allow_empty = false);

struct LoadedCsv {
    DomainDataset dataset;
    // Raw label values in ascending order; raw label_values[i] was remapped
    // to dense label i.
    std::vector<long long> label_values;
};

// Reads a comma-separated numeric file. All columns except `label_column`
// (0-based; negative counts from the end, -1 = last) become features in file
// order; the label column must hold integers and is remapped to a dense
// [0, c) range.
LoadedCsv load_csv(const std::filesystem::path& path, bool has_header = false,
                   long label_column = -1);

// Writes features plus a trailing label column. Doubles are printed in
// shortest round-trip form, so save followed by load reproduces the matrix
// bit for bit.
void save_csv(const DenseMatrix& features, const std::vector<int>& labels,
              const std::filesystem::path& path);

struct Standardized {
    DenseMatrix data;
    std::vector<double> mean;
    // Per-column population standard deviation (divisor N) actually used as
    // the divisor; columns with raw std <= 1e-12 are centered only and
    // recorded with std 1.
    std::vector<double> stddev;
};

// Column-wise zero-mean, unit-variance transform (population convention).
Standardized standardize(const DenseMatrix& x);

// Principal component basis fitted on one matrix and applicable to others
// living in the same feature space.
struct PcaModel {
    std::vector<double> mean;     // d, column means of the fit matrix
    DenseMatrix components;       // d x k, orthonormal columns
    std::vector<double> spectrum; // k squared singular values, nonincreasing
    double total_variance = 0.0;  // squared Frobenius norm of the centered fit matrix
    std::size_t numerical_rank = 0;
    // True when k exceeded the numerical rank: the trailing components are
    // zero columns and their spectrum entries are 0.
    bool truncated_past_rank = false;
};

// Top-k right singular directions of the column-centered x (deterministic
// Jacobi eigensolver on whichever of X^T X or X X^T is smaller). Requires
// 1 <= k <= min(N, d). Sign convention: the largest-magnitude entry of each
// component is positive (lowest index on ties).
PcaModel pca_fit(const DenseMatrix& x, std::size_t k);

// (x - mean) * components; rows map independently.
DenseMatrix pca_transform(const PcaModel& model, const DenseMatrix& x);

struct PcaResult {
    DenseMatrix transformed; // N x k
    PcaModel model;
};

PcaResult pca_fit_transform(const DenseMatrix& x, std::size_t k);

struct SplitSpec {
    std::size_t source_per_class = 0;
    std::size_t target_labeled_per_class = 0;
    std::uint64_t trial_seed = 0;
};

enum class SplitRole { source, target };

struct DomainSplit {
    DomainDataset train;
    // For a target domain: every row not drawn into train. For a source
    // domain: empty (the protocol never evaluates on source data).
    DomainDataset test;
    // Selected row indices per class, ascending — the reproducibility
    // manifest of the split.
    std::vector<std::vector<std::size_t>> train_indices;
    std::vector<std::size_t> test_indices;
};

// Draws exactly per-class counts (source_per_class or
// target_labeled_per_class according to `role`) without replacement from
// each class, deterministically from spec.trial_seed.
DomainSplit sample_split(const DomainDataset& ds, const SplitSpec& spec, SplitRole role);

} // namespace ptelm

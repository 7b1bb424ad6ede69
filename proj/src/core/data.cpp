#include "data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "rng.hpp"

namespace ptelm {

void validate_dataset(const DomainDataset& ds, bool allow_empty) {
    if (ds.features.rows() != ds.labels.size()) {
        raise(ErrorKind::dimension_mismatch,
              "dataset '" + ds.name + "': feature rows and label count differ");
    }
    if (ds.class_count < 1) {
        raise(ErrorKind::invalid_dimension, "dataset '" + ds.name + "': class_count must be positive");
    }
    if (ds.features.empty()) {
        if (allow_empty) return;
        raise(ErrorKind::empty_domain, "dataset '" + ds.name + "' has no samples");
    }
    std::vector<bool> present(static_cast<std::size_t>(ds.class_count), false);
    for (int label : ds.labels) {
        if (label < 0 || label >= ds.class_count) {
            raise(ErrorKind::label_out_of_range,
                  "dataset '" + ds.name + "': label " + std::to_string(label) + " outside [0, " +
                      std::to_string(ds.class_count) + ")");
        }
        present[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < ds.class_count; ++c) {
        if (!present[static_cast<std::size_t>(c)]) {
            raise(ErrorKind::class_mismatch,
                  "dataset '" + ds.name + "': class " + std::to_string(c) + " has no samples");
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_field(std::string_view field, std::size_t line, std::size_t column) {
    field = trim(field);
    double value = 0.0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size() || field.empty()) {
        raise(ErrorKind::parse_error,
              "cannot parse '" + std::string(field) + "' as a number (line " +
                  std::to_string(line) + ", column " + std::to_string(column) + ")");
    }
    if (!std::isfinite(value)) {
        raise(ErrorKind::parse_error,
              "non-finite value (line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ")");
    }
    return value;
}

void split_fields(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
}

} // namespace

LoadedCsv load_csv(const std::filesystem::path& path, bool has_header, long label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorKind::io_error, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();

    std::vector<std::vector<double>> feature_rows;
    std::vector<long long> raw_labels;
    std::size_t column_count = 0;
    std::size_t label_index = 0;
    std::vector<std::string_view> fields;

    std::size_t line_number = 0;
    std::size_t pos = 0;
    bool header_pending = has_header;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line(content.data() + pos,
                              (nl == std::string::npos ? content.size() : nl) - pos);
        pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }

        split_fields(line, fields);
        if (column_count == 0) {
            column_count = fields.size();
            if (column_count < 2) {
                raise(ErrorKind::parse_error,
                      "line " + std::to_string(line_number) +
                          ": need at least one feature column plus the label column");
            }
            long resolved = label_column < 0
                                ? static_cast<long>(column_count) + label_column
                                : label_column;
            if (resolved < 0 || resolved >= static_cast<long>(column_count)) {
                raise(ErrorKind::invalid_config,
                      "label column " + std::to_string(label_column) + " outside the " +
                          std::to_string(column_count) + " columns of '" + path.string() + "'");
            }
            label_index = static_cast<std::size_t>(resolved);
        } else if (fields.size() != column_count) {
            raise(ErrorKind::ragged_rows,
                  "line " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(column_count));
        }

        std::vector<double> row;
        row.reserve(column_count - 1);
        for (std::size_t j = 0; j < fields.size(); ++j) {
            double value = parse_field(fields[j], line_number, j + 1);
            if (j == label_index) {
                if (value != std::floor(value) || std::abs(value) > 9.0e15) {
                    raise(ErrorKind::parse_error,
                          "label is not an integer (line " + std::to_string(line_number) +
                              ", column " + std::to_string(j + 1) + ")");
                }
                raw_labels.push_back(static_cast<long long>(value));
            } else {
                row.push_back(value);
            }
        }
        feature_rows.push_back(std::move(row));
    }

    if (feature_rows.empty()) {
        raise(ErrorKind::empty_file, "'" + path.string() + "' contains no data rows");
    }

    // Dense remap: distinct raw labels in ascending order become 0..c-1.
    std::map<long long, int> remap;
    for (long long raw : raw_labels) remap.emplace(raw, 0);
    LoadedCsv result;
    result.label_values.reserve(remap.size());
    for (auto& [raw, dense] : remap) {
        dense = static_cast<int>(result.label_values.size());
        result.label_values.push_back(raw);
    }

    const std::size_t features = column_count - 1;
    DenseMatrix x(feature_rows.size(), features);
    for (std::size_t i = 0; i < feature_rows.size(); ++i) {
        std::copy(feature_rows[i].begin(), feature_rows[i].end(), x.row_ptr(i));
    }
    result.dataset.name = path.stem().string();
    result.dataset.features = std::move(x);
    result.dataset.class_count = static_cast<int>(result.label_values.size());
    result.dataset.labels.reserve(raw_labels.size());
    for (long long raw : raw_labels) result.dataset.labels.push_back(remap[raw]);
    validate_dataset(result.dataset);
    return result;
}

namespace {

void append_double(std::string& out, double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    out.append(buf, end);
}

} // namespace

void save_csv(const DenseMatrix& features, const std::vector<int>& labels,
              const std::filesystem::path& path) {
    if (features.rows() != labels.size()) {
        raise(ErrorKind::dimension_mismatch, "save_csv: feature rows and label count differ");
    }
    std::string out;
    out.reserve(features.rows() * (features.cols() + 1) * 12);
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const double* row = features.row_ptr(i);
        for (std::size_t j = 0; j < features.cols(); ++j) {
            append_double(out, row[j]);
            out.push_back(',');
        }
        out += std::to_string(labels[i]);
        out.push_back('\n');
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << out)) {
        raise(ErrorKind::io_error, "cannot write '" + path.string() + "'");
    }
}

Standardized standardize(const DenseMatrix& x) {
    if (x.empty()) {
        raise(ErrorKind::empty_domain, "standardize: matrix has no rows");
    }
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Standardized result;
    result.mean.assign(d, 0.0);
    result.stddev.assign(d, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) result.mean[j] += row[j];
    }
    for (double& m : result.mean) m /= static_cast<double>(n);
    std::vector<double> variance(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) {
            double delta = row[j] - result.mean[j];
            variance[j] += delta * delta;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        double sd = std::sqrt(variance[j] / static_cast<double>(n));
        // Constant columns carry no information; divide by 1 so they map to
        // plain zeros instead of NaN.
        result.stddev[j] = sd > 1e-12 ? sd : 1.0;
    }
    result.data = DenseMatrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* src = x.row_ptr(i);
        double* dst = result.data.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) {
            dst[j] = (src[j] - result.mean[j]) / result.stddev[j];
        }
    }
    return result;
}

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix: a is destroyed,
// eigenvalues land on its diagonal, eigenvectors in the columns of v.
// Quadratic convergence makes ~15 sweeps plenty for the sizes used here.
void jacobi_eigen(DenseMatrix& a, DenseMatrix& v) {
    const std::size_t n = a.rows();
    v = DenseMatrix::identity(n);
    double scale = frobenius_norm(a);
    if (scale == 0.0) return;
    const double tol = 1e-14 * scale;
    const std::size_t max_sweeps = 64;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (std::sqrt(2.0 * off) <= tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol / static_cast<double>(n)) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a(p, j);
                    const double aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
}

DenseMatrix center_columns(const DenseMatrix& x, const std::vector<double>& mean) {
    DenseMatrix centered = x;
    for (std::size_t i = 0; i < centered.rows(); ++i) {
        double* row = centered.row_ptr(i);
        for (std::size_t j = 0; j < centered.cols(); ++j) row[j] -= mean[j];
    }
    return centered;
}

} // namespace

PcaModel pca_fit(const DenseMatrix& x, std::size_t k) {
    if (x.empty()) {
        raise(ErrorKind::empty_domain, "pca_fit: matrix has no rows");
    }
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (k < 1 || k > std::min(n, d)) {
        raise(ErrorKind::invalid_dimension,
              "pca_fit: k = " + std::to_string(k) + " outside [1, min(" + std::to_string(n) +
                  ", " + std::to_string(d) + ")]");
    }

    PcaModel model;
    model.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += row[j];
    }
    for (double& m : model.mean) m /= static_cast<double>(n);
    DenseMatrix centered = center_columns(x, model.mean);
    double total = frobenius_norm(centered);
    model.total_variance = total * total;

    // Eigendecompose whichever Gram matrix is smaller; both carry the same
    // nonzero spectrum (the squared singular values of the centered data).
    const bool feature_route = d <= n;
    DenseMatrix sym = feature_route ? gram(centered) : [&] {
        DenseMatrix g(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                double dot = 0.0;
                const double* ri = centered.row_ptr(i);
                const double* rj = centered.row_ptr(j);
                for (std::size_t l = 0; l < d; ++l) dot += ri[l] * rj[l];
                g(i, j) = dot;
                g(j, i) = dot;
            }
        }
        return g;
    }();

    DenseMatrix vectors;
    jacobi_eigen(sym, vectors);
    const std::size_t order_n = sym.rows();
    std::vector<std::size_t> order(order_n);
    for (std::size_t i = 0; i < order_n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sym(a, a) != sym(b, b)) return sym(a, a) > sym(b, b);
        return a < b; // deterministic order for repeated eigenvalues
    });

    double top = std::max(sym(order[0], order[0]), 0.0);
    const double rank_tol = top * 1e-12;
    model.numerical_rank = 0;
    for (std::size_t i = 0; i < order_n; ++i) {
        if (sym(order[i], order[i]) > rank_tol && sym(order[i], order[i]) > 0.0) {
            ++model.numerical_rank;
        }
    }
    model.numerical_rank = std::min(model.numerical_rank, std::min(n, d));
    model.truncated_past_rank = k > model.numerical_rank;

    model.components = DenseMatrix(d, k);
    model.spectrum.assign(k, 0.0);
    for (std::size_t c = 0; c < k && c < model.numerical_rank; ++c) {
        const std::size_t idx = order[c];
        const double eigenvalue = sym(idx, idx);
        model.spectrum[c] = eigenvalue;
        if (feature_route) {
            for (std::size_t j = 0; j < d; ++j) model.components(j, c) = vectors(j, idx);
        } else {
            // Right singular vector from the left one: v = X^T u / sigma.
            const double inv_sigma = 1.0 / std::sqrt(eigenvalue);
            for (std::size_t i = 0; i < n; ++i) {
                const double u = vectors(i, idx) * inv_sigma;
                if (u == 0.0) continue;
                const double* row = centered.row_ptr(i);
                for (std::size_t j = 0; j < d; ++j) model.components(j, c) += u * row[j];
            }
        }
        // Sign convention: largest-magnitude entry positive (lowest index
        // wins ties), so decompositions are reproducible across routes.
        std::size_t peak = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (std::abs(model.components(j, c)) > std::abs(model.components(peak, c))) peak = j;
        }
        if (model.components(peak, c) < 0.0) {
            for (std::size_t j = 0; j < d; ++j) model.components(j, c) = -model.components(j, c);
        }
    }
    return model;
}

DenseMatrix pca_transform(const PcaModel& model, const DenseMatrix& x) {
    if (x.cols() != model.mean.size()) {
        raise(ErrorKind::dimension_mismatch,
              "pca_transform: input has " + std::to_string(x.cols()) + " features, model has " +
                  std::to_string(model.mean.size()));
    }
    if (x.empty()) return DenseMatrix::zero_rows(model.components.cols());
    return matmul(center_columns(x, model.mean), model.components);
}

PcaResult pca_fit_transform(const DenseMatrix& x, std::size_t k) {
    PcaResult result;
    result.model = pca_fit(x, k);
    result.transformed = pca_transform(result.model, x);
    return result;
}

DomainSplit sample_split(const DomainDataset& ds, const SplitSpec& spec, SplitRole role) {
    validate_dataset(ds);
    const std::size_t per_class =
        role == SplitRole::source ? spec.source_per_class : spec.target_labeled_per_class;
    if (per_class == 0) {
        raise(ErrorKind::invalid_range, "sample_split: per-class count must be positive");
    }

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.class_count));
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    }

    DomainSplit split;
    split.train_indices.resize(by_class.size());
    std::vector<bool> taken(ds.labels.size(), false);
    RandomStream stream(spec.trial_seed);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& pool = by_class[c];
        if (pool.size() < per_class) {
            raise(ErrorKind::insufficient_class_samples,
                  "dataset '" + ds.name + "': class " + std::to_string(c) + " has " +
                      std::to_string(pool.size()) + " samples, split needs " +
                      std::to_string(per_class));
        }
        stream.shuffle(pool);
        auto& chosen = split.train_indices[c];
        chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(per_class));
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t idx : chosen) taken[idx] = true;
    }

    std::vector<std::size_t> train_rows;
    train_rows.reserve(per_class * by_class.size());
    for (std::size_t i = 0; i < taken.size(); ++i) {
        if (taken[i]) train_rows.push_back(i);
    }
    split.train.name = ds.name + "/train";
    split.train.class_count = ds.class_count;
    split.train.features = take_rows(ds.features, train_rows);
    split.train.labels.reserve(train_rows.size());
    for (std::size_t i : train_rows) split.train.labels.push_back(ds.labels[i]);

    split.test.name = ds.name + "/test";
    split.test.class_count = ds.class_count;
    if (role == SplitRole::target) {
        for (std::size_t i = 0; i < taken.size(); ++i) {
            if (!taken[i]) split.test_indices.push_back(i);
        }
    }
    split.test.features = take_rows(ds.features, split.test_indices);
    for (std::size_t i : split.test_indices) split.test.labels.push_back(ds.labels[i]);
    return split;
}

} // namespace ptelm

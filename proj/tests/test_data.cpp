#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "core/data.hpp"
#include "core/rng.hpp"

using namespace ptelm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "ptelm_data_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::invalid_argument;
}

} // namespace

TEST_CASE("loading a small file with label remapping") {
    fs::path path = temp_file("small.csv");
    write_text(path, "0.5,1.25,9\n-2,0.75,5\n3.5,4.5,9\n");
    LoadedCsv loaded = load_csv(path);
    CHECK(loaded.dataset.name == "small");
    REQUIRE(loaded.dataset.features.rows() == 3);
    REQUIRE(loaded.dataset.features.cols() == 2);
    CHECK(loaded.dataset.features(1, 0) == -2.0);
    CHECK(loaded.dataset.features(2, 1) == 4.5);
    // Raw labels {9, 5, 9} remap densely: 5 -> 0, 9 -> 1.
    CHECK(loaded.dataset.labels == std::vector<int>{1, 0, 1});
    CHECK(loaded.dataset.class_count == 2);
    CHECK(loaded.label_values == std::vector<long long>{5, 9});
}

TEST_CASE("header rows and label column positions") {
    fs::path path = temp_file("headered.csv");
    write_text(path, "a,b,c\n7,0.5,1.5\n7,2.5,3.5\n8,4.5,5.5\n");
    LoadedCsv loaded = load_csv(path, true, 0);
    REQUIRE(loaded.dataset.features.cols() == 2);
    CHECK(loaded.dataset.features(0, 0) == 0.5);
    CHECK(loaded.dataset.labels == std::vector<int>{0, 0, 1});

    // Negative indices count from the end; -3 is column 0 here.
    LoadedCsv same = load_csv(path, true, -3);
    CHECK(same.dataset.labels == loaded.dataset.labels);

    CHECK(kind_of([&] { load_csv(path, true, 3); }) == ErrorKind::invalid_config);
}

TEST_CASE("saving and reloading reproduces every bit") {
    DenseMatrix x = random_uniform_matrix(150, 60, 12345, -5.0, 5.0);
    // Include awkward values that expose printf-style rounding.
    x(0, 0) = 0.1;
    x(1, 1) = 1.0 / 3.0;
    x(2, 2) = 1e-300;
    x(3, 3) = -12345678.901234567;
    RandomStream stream(3);
    std::vector<int> labels;
    for (std::size_t i = 0; i < x.rows(); ++i) labels.push_back(int(stream.below(4)));
    fs::path path = temp_file("round_trip.csv");
    save_csv(x, labels, path);
    LoadedCsv loaded = load_csv(path);
    REQUIRE(loaded.dataset.features.rows() == x.rows());
    REQUIRE(loaded.dataset.features.cols() == x.cols());
    CHECK(loaded.dataset.features.values() == x.values());
    CHECK(loaded.dataset.labels == labels);
}

TEST_CASE("malformed files are reported with their position") {
    fs::path bad_field = temp_file("bad_field.csv");
    write_text(bad_field, "1.5,2.5,0\n1.0,oops,1\n");
    CHECK(kind_of([&] { load_csv(bad_field); }) == ErrorKind::parse_error);
    try {
        load_csv(bad_field);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }

    fs::path ragged = temp_file("ragged.csv");
    write_text(ragged, "1,2,0\n1,2,3,0\n");
    CHECK(kind_of([&] { load_csv(ragged); }) == ErrorKind::ragged_rows);

    fs::path empty = temp_file("empty.csv");
    write_text(empty, "");
    CHECK(kind_of([&] { load_csv(empty); }) == ErrorKind::empty_file);

    fs::path fractional_label = temp_file("fractional.csv");
    write_text(fractional_label, "1,2,0.5\n");
    CHECK(kind_of([&] { load_csv(fractional_label); }) == ErrorKind::parse_error);

    CHECK(kind_of([&] { load_csv(temp_file("missing.csv")); }) == ErrorKind::io_error);
}

TEST_CASE("standardizing a two-point column") {
    DenseMatrix x(2, 1, {1.0, 3.0});
    Standardized s = standardize(x);
    CHECK(s.mean[0] == 2.0);
    CHECK(s.stddev[0] == 1.0); // population convention over {1, 3}
    CHECK(s.data(0, 0) == -1.0);
    CHECK(s.data(1, 0) == 1.0);
}

TEST_CASE("constant columns are centered but not scaled") {
    DenseMatrix x(3, 2, {5.0, 1.0, 5.0, 2.0, 5.0, 3.0});
    Standardized s = standardize(x);
    CHECK(s.stddev[0] == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(s.data(i, 0) == 0.0);
    CHECK(s.data(0, 1) < 0.0);
}

TEST_CASE("standardized columns have zero mean and unit variance") {
    DenseMatrix x = random_uniform_matrix(100, 10, 77, -3.0, 9.0);
    Standardized s = standardize(x);
    for (std::size_t j = 0; j < 10; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 100; ++i) mean += s.data(i, j);
        mean /= 100.0;
        double var = 0.0;
        for (std::size_t i = 0; i < 100; ++i) var += (s.data(i, j) - mean) * (s.data(i, j) - mean);
        var /= 100.0;
        CHECK(std::abs(mean) <= 1e-10);
        CHECK(std::abs(var - 1.0) <= 1e-10);
    }
    // Standardizing again is the identity up to rounding.
    Standardized twice = standardize(s.data);
    for (std::size_t i = 0; i < s.data.values().size(); ++i)
        CHECK(std::abs(twice.data.values()[i] - s.data.values()[i]) <= 1e-10);
}

TEST_CASE("principal components are orthonormal and capture variance in order") {
    DenseMatrix x = random_uniform_matrix(200, 30, 5, -1.0, 1.0);
    PcaModel model = pca_fit(x, 5);
    REQUIRE(model.components.rows() == 30);
    REQUIRE(model.components.cols() == 5);

    DenseMatrix vtv = gram(model.components);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-8);

    REQUIRE(model.spectrum.size() == 5);
    for (std::size_t j = 1; j < 5; ++j) CHECK(model.spectrum[j] <= model.spectrum[j - 1] + 1e-9);

    // Each spectrum entry is the captured squared norm of the centered data
    // along its component.
    DenseMatrix centered = x;
    for (std::size_t i = 0; i < centered.rows(); ++i)
        for (std::size_t j = 0; j < centered.cols(); ++j) centered(i, j) -= model.mean[j];
    DenseMatrix projected = matmul(centered, model.components);
    double captured_total = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
        double captured = 0.0;
        for (std::size_t i = 0; i < projected.rows(); ++i)
            captured += projected(i, j) * projected(i, j);
        CHECK(captured == doctest::Approx(model.spectrum[j]).epsilon(1e-8));
        captured_total += captured;
    }
    CHECK(captured_total <= model.total_variance * (1.0 + 1e-12));

    // No random unit direction captures more than the leading component.
    RandomStream stream(6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(30);
        double norm = 0.0;
        for (double& v : u) {
            v = stream.gaussian();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        double captured = 0.0;
        for (std::size_t i = 0; i < centered.rows(); ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < 30; ++j) dot += centered(i, j) * u[j] / norm;
            captured += dot * dot;
        }
        CHECK(captured <= model.spectrum[0] * (1.0 + 1e-10));
    }
}

TEST_CASE("a planted two-dimensional subspace is recovered exactly") {
    // Rows live in span{e1+e2, e3} after centering; two components suffice.
    const std::size_t n = 60;
    DenseMatrix x(n, 4);
    RandomStream stream(8);
    for (std::size_t i = 0; i < n; ++i) {
        double a = stream.uniform(-2.0, 2.0);
        double b = stream.uniform(-1.0, 1.0);
        x(i, 0) = a;
        x(i, 1) = a;
        x(i, 2) = b;
        x(i, 3) = 7.0; // constant offset disappears after centering
    }
    PcaResult result = pca_fit_transform(x, 2);
    CHECK(result.model.numerical_rank == 2);
    CHECK_FALSE(result.model.truncated_past_rank);

    // Reconstruction from two components matches the centered data.
    DenseMatrix back = matmul(result.transformed, transpose(result.model.components));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(back(i, 0) - (x(i, 0) - result.model.mean[0])) <= 1e-10);
        CHECK(std::abs(back(i, 2) - (x(i, 2) - result.model.mean[2])) <= 1e-10);
        CHECK(std::abs(back(i, 3)) <= 1e-10);
    }
}

TEST_CASE("components past the numerical rank are zero-filled") {
    DenseMatrix x(10, 3);
    RandomStream stream(9);
    for (std::size_t i = 0; i < 10; ++i) {
        double a = stream.uniform(-1.0, 1.0);
        x(i, 0) = a;
        x(i, 1) = 2.0 * a;
        x(i, 2) = -a;
    }
    PcaModel model = pca_fit(x, 3);
    CHECK(model.numerical_rank == 1);
    CHECK(model.truncated_past_rank);
    CHECK(model.spectrum[1] == 0.0);
    CHECK(model.spectrum[2] == 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(model.components(i, 1) == 0.0);
        CHECK(model.components(i, 2) == 0.0);
    }
}

TEST_CASE("the wide-matrix eigensolver route is internally consistent") {
    // 6 x 40 has more features than samples, which exercises the
    // sample-side Gram route; the invariants checked are the same as for
    // the feature-side route.
    DenseMatrix wide = random_uniform_matrix(6, 40, 10, -1.0, 1.0);
    PcaModel model = pca_fit(wide, 4);
    REQUIRE(model.components.rows() == 40);
    REQUIRE(model.components.cols() == 4);

    DenseMatrix vtv = gram(model.components);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-8);

    DenseMatrix centered = wide;
    for (std::size_t i = 0; i < centered.rows(); ++i)
        for (std::size_t j = 0; j < centered.cols(); ++j) centered(i, j) -= model.mean[j];
    DenseMatrix projected = matmul(centered, model.components);
    for (std::size_t j = 0; j < 4; ++j) {
        double captured = 0.0;
        for (std::size_t i = 0; i < projected.rows(); ++i)
            captured += projected(i, j) * projected(i, j);
        CHECK(captured == doctest::Approx(model.spectrum[j]).epsilon(1e-8));
    }
}

TEST_CASE("component signs follow the largest-entry convention") {
    DenseMatrix x = random_uniform_matrix(50, 8, 11, -1.0, 1.0);
    PcaModel model = pca_fit(x, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            if (std::abs(model.components(i, j)) > std::abs(best))
                best = model.components(i, j);
        }
        CHECK(best > 0.0);
    }
}

TEST_CASE("transforms are affine in the fitted mean") {
    DenseMatrix x = random_uniform_matrix(30, 6, 12, 0.0, 2.0);
    PcaResult result = pca_fit_transform(x, 3);
    DenseMatrix again = pca_transform(result.model, x);
    CHECK(result.transformed.values() == again.values());

    // A single row equal to the mean maps to the origin.
    DenseMatrix mean_row(1, 6);
    for (std::size_t j = 0; j < 6; ++j) mean_row(0, j) = result.model.mean[j];
    DenseMatrix origin = pca_transform(result.model, mean_row);
    for (double v : origin.values()) CHECK(std::abs(v) <= 1e-12);

    CHECK(kind_of([&] { pca_fit(x, 7); }) == ErrorKind::invalid_dimension);
    CHECK(kind_of([&] { pca_fit(x, 0); }) == ErrorKind::invalid_dimension);
    CHECK(kind_of([&] { pca_transform(result.model, DenseMatrix(1, 5)); }) ==
          ErrorKind::dimension_mismatch);
}

namespace {

DomainDataset ten_class_pool() {
    DomainDataset ds;
    ds.name = "pool";
    const std::size_t per_class = 12;
    ds.class_count = 10;
    ds.features = DenseMatrix(per_class * 10, 3);
    RandomStream stream(1);
    for (std::size_t i = 0; i < per_class * 10; ++i) {
        ds.labels.push_back(int(i / per_class));
        for (std::size_t j = 0; j < 3; ++j) ds.features(i, j) = stream.uniform(-1.0, 1.0);
    }
    // Interleave classes so index order does not follow class order.
    RandomStream shuffler(2);
    std::vector<std::size_t> perm(ds.labels.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    shuffler.shuffle(perm);
    DomainDataset shuffled = ds;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled.labels[i] = ds.labels[perm[i]];
        for (std::size_t j = 0; j < 3; ++j) shuffled.features(i, j) = ds.features(perm[i], j);
    }
    return shuffled;
}

} // namespace

TEST_CASE("splits draw the requested counts and partition the data") {
    DomainDataset pool = ten_class_pool();
    SplitSpec spec;
    spec.source_per_class = 8;
    spec.target_labeled_per_class = 2;
    spec.trial_seed = 0;

    DomainSplit source = sample_split(pool, spec, SplitRole::source);
    CHECK(source.train.features.rows() == 80);
    CHECK(source.train.labels.size() == 80);
    CHECK(source.test.features.rows() == 0); // source rows are never evaluated
    REQUIRE(source.train_indices.size() == 10);
    for (const auto& chosen : source.train_indices) {
        CHECK(chosen.size() == 8);
        for (std::size_t i = 1; i < chosen.size(); ++i) CHECK(chosen[i] > chosen[i - 1]);
    }

    DomainSplit target = sample_split(pool, spec, SplitRole::target);
    CHECK(target.train.features.rows() == 20);
    CHECK(target.test.features.rows() == 100);

    // Train and test indices partition the pool.
    std::set<std::size_t> seen;
    for (const auto& chosen : target.train_indices)
        for (std::size_t idx : chosen) CHECK(seen.insert(idx).second);
    for (std::size_t idx : target.test_indices) CHECK(seen.insert(idx).second);
    CHECK(seen.size() == pool.labels.size());

    // Selected indices carry the class they were drawn for.
    for (std::size_t c = 0; c < 10; ++c)
        for (std::size_t idx : target.train_indices[c]) CHECK(pool.labels[idx] == int(c));

    // Split rows reproduce the pool rows they reference.
    std::size_t row = 0;
    std::vector<std::size_t> flat;
    for (const auto& chosen : target.train_indices)
        flat.insert(flat.end(), chosen.begin(), chosen.end());
    std::sort(flat.begin(), flat.end());
    for (std::size_t idx : flat) {
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(target.train.features(row, j) == pool.features(idx, j));
        CHECK(target.train.labels[row] == pool.labels[idx]);
        ++row;
    }
}

TEST_CASE("splits are deterministic in the seed and change with it") {
    DomainDataset pool = ten_class_pool();
    SplitSpec spec;
    spec.source_per_class = 5;
    spec.target_labeled_per_class = 3;
    spec.trial_seed = 42;
    DomainSplit a = sample_split(pool, spec, SplitRole::target);
    DomainSplit b = sample_split(pool, spec, SplitRole::target);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);
    CHECK(a.train.features.values() == b.train.features.values());

    spec.trial_seed = 43;
    DomainSplit c = sample_split(pool, spec, SplitRole::target);
    CHECK(a.train_indices != c.train_indices);
}

TEST_CASE("asking for more samples than a class has fails loudly") {
    DomainDataset pool = ten_class_pool();
    SplitSpec spec;
    spec.source_per_class = 13; // pool holds 12 per class
    spec.trial_seed = 1;
    CHECK(kind_of([&] { sample_split(pool, spec, SplitRole::source); }) ==
          ErrorKind::insufficient_class_samples);

    spec.source_per_class = 0;
    CHECK(kind_of([&] { sample_split(pool, spec, SplitRole::source); }) ==
          ErrorKind::invalid_range);
}

TEST_CASE("dataset validation catches labeling mistakes") {
    DomainDataset ds;
    ds.name = "bad";
    ds.features = DenseMatrix(2, 2, {1, 2, 3, 4});
    ds.labels = {0, 2};
    ds.class_count = 3; // class 1 never occurs
    CHECK(kind_of([&] { validate_dataset(ds); }) == ErrorKind::class_mismatch);
    ds.labels = {0, 3};
    CHECK(kind_of([&] { validate_dataset(ds); }) == ErrorKind::label_out_of_range);
    ds.labels = {0};
    CHECK(kind_of([&] { validate_dataset(ds); }) == ErrorKind::dimension_mismatch);
}

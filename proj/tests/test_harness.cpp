#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/experiment.hpp"
#include "core/version.hpp"
#include "support/synthetic.hpp"

using namespace ptelm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "ptelm_harness_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    return lines;
}

// Small, easy experiment: 2 classes would defeat the three-angle layout, so
// keep 3 classes with modest pools and strong separation.
struct Fixture {
    fs::path dir;
    ExperimentConfig cfg;

    explicit Fixture(const std::string& name, double sigma = 0.4) {
        dir = fresh_dir(name);
        DomainDataset source =
            testsupport::make_gaussian_domain("source", {20, 20, 20}, 0.0, 101, sigma);
        DomainDataset target = testsupport::make_gaussian_domain(
            "target", {15, 15, 15}, testsupport::kRotationDeg, 102, sigma);
        testsupport::write_domain_csv(source, dir / "source.csv");
        testsupport::write_domain_csv(target, dir / "target.csv");

        cfg.source_path = dir / "source.csv";
        cfg.target_path = dir / "target.csv";
        cfg.trials = 3;
        cfg.split.source_per_class = 15;
        cfg.split.target_labeled_per_class = 3;
        cfg.hyperparams.hidden_nodes = 25;
        cfg.hyperparams.outer_max_iters = 4;
        cfg.elm_lambda = 10.0;
        cfg.base_seed = 7;
        cfg.output_dir = dir / "report";
    }
};

std::map<std::string, std::string> snapshot_reports(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files[fs::relative(entry.path(), dir).string()] = read_text(entry.path());
        }
    }
    return files;
}

} // namespace

TEST_CASE("config files parse with comments, defaults, and overrides") {
    fs::path dir = fresh_dir("config_parse");
    fs::path path = dir / "exp.conf";
    write_text(path,
               "# experiment description\n"
               "source = s.csv\n"
               "target = t.csv\n"
               "\n"
               "trials = 5\n"
               "methods = elm_t, ptelm\n"
               "lambda2 = 12.5\n"
               "base_seed = 99\n"
               "output_dir = out\n");
    ExperimentConfig cfg = load_config(path);
    CHECK(cfg.source_path == fs::path("s.csv"));
    CHECK(cfg.target_path == fs::path("t.csv"));
    CHECK(cfg.trials == 5);
    REQUIRE(cfg.methods.size() == 2);
    CHECK(cfg.methods[0] == Method::elm_t);
    CHECK(cfg.methods[1] == Method::ptelm);
    CHECK(cfg.hyperparams.lambda2 == 12.5);
    CHECK(cfg.base_seed == 99);
    CHECK(cfg.output_dir == fs::path("out"));

    // Untouched keys keep their defaults.
    CHECK(cfg.hyperparams.lambda1 == 1.0);
    CHECK(cfg.hyperparams.lambda3 == 10.0);
    CHECK(cfg.hyperparams.hidden_nodes == 500);
    CHECK(cfg.elm_lambda == 1.0);
    CHECK(cfg.label_column == -1);
    CHECK_FALSE(cfg.csv_header);
    CHECK_FALSE(cfg.pca_dims.has_value());

    apply_config_override(cfg, "lambda3", "2.5");
    CHECK(cfg.hyperparams.lambda3 == 2.5);
    apply_config_override(cfg, "pca_dims", "40");
    REQUIRE(cfg.pca_dims.has_value());
    CHECK(*cfg.pca_dims == 40);
}

TEST_CASE("bad config files are rejected with the offending line") {
    fs::path dir = fresh_dir("config_bad");

    fs::path unknown = dir / "unknown.conf";
    write_text(unknown, "source = s.csv\nmystery = 1\n");
    CHECK_THROWS_AS(load_config(unknown), Error);

    fs::path duplicate = dir / "dup.conf";
    write_text(duplicate, "trials = 2\ntrials = 3\n");
    try {
        load_config(duplicate);
        FAIL("expected duplicate-key rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_config);
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }

    fs::path missing_eq = dir / "noeq.conf";
    write_text(missing_eq, "trials 3\n");
    CHECK_THROWS_AS(load_config(missing_eq), Error);

    write_text(dir / "badnum.conf", "lambda1 = fast\n");
    CHECK_THROWS_AS(load_config(dir / "badnum.conf"), Error);

    CHECK_THROWS_AS(load_config(dir / "absent.conf"), Error);
}

TEST_CASE("the report directory falls back to the environment") {
    fs::path dir = fresh_dir("config_env");
    fs::path path = dir / "min.conf";
    write_text(path, "source = s.csv\ntarget = t.csv\n");

    ::setenv("PTELM_OUTPUT_DIR", "/tmp/ptelm_env_reports", 1);
    CHECK(load_config(path).output_dir == fs::path("/tmp/ptelm_env_reports"));
    ::unsetenv("PTELM_OUTPUT_DIR");
    CHECK(load_config(path).output_dir == fs::path("ptelm_report"));
}

TEST_CASE("config validation rejects inconsistent settings") {
    Fixture fixture("validate");
    validate_config(fixture.cfg); // the fixture itself is fine

    ExperimentConfig cfg = fixture.cfg;
    cfg.trials = 0;
    CHECK_THROWS_AS(validate_config(cfg), Error);

    cfg = fixture.cfg;
    cfg.methods = {Method::elm_s, Method::elm_s};
    CHECK_THROWS_AS(validate_config(cfg), Error);

    cfg = fixture.cfg;
    cfg.methods.clear();
    CHECK_THROWS_AS(validate_config(cfg), Error);

    cfg = fixture.cfg;
    cfg.split.target_labeled_per_class = 0;
    CHECK_THROWS_AS(validate_config(cfg), Error);

    cfg = fixture.cfg;
    cfg.elm_lambda = 0.0;
    CHECK_THROWS_AS(validate_config(cfg), Error);

    cfg = fixture.cfg;
    cfg.hyperparams.lambda2 = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), Error);

    cfg = fixture.cfg;
    cfg.source_path = fixture.dir / "no_such.csv";
    CHECK_THROWS_AS(validate_config(cfg), Error);
}

TEST_CASE("confusion matrices from hand-checked label vectors") {
    Confusion perfect = confusion_matrix({0, 1, 2, 1}, {0, 1, 2, 1}, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(perfect[i][j] == (i == j ? (i == 1 ? 2 : 1) : 0));

    // Everything predicted as class 0 lands in the first column.
    Confusion column = confusion_matrix({0, 0, 0}, {0, 1, 2}, 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(column[i][0] == 1);
        CHECK(column[i][1] == 0);
        CHECK(column[i][2] == 0);
    }

    // Row sums count the true class occurrences.
    Confusion mixed = confusion_matrix({1, 2, 0, 1, 1}, {0, 2, 0, 1, 2}, 3);
    long long row0 = mixed[0][0] + mixed[0][1] + mixed[0][2];
    long long row2 = mixed[2][0] + mixed[2][1] + mixed[2][2];
    CHECK(row0 == 2);
    CHECK(row2 == 2);
    CHECK(mixed[0][1] == 1);

    CHECK_THROWS_AS(confusion_matrix({3}, {0}, 3), Error);
    CHECK_THROWS_AS(confusion_matrix({0, 0}, {0}, 3), Error);
}

TEST_CASE("a trivially separable target is classified perfectly") {
    Fixture fixture("separable", 0.1);
    fixture.cfg.methods = {Method::elm_t};
    TrialResult trial = run_trial(fixture.cfg, 0);
    REQUIRE(trial.accuracy.size() == 1);
    CHECK(trial.accuracy[0] == 1.0);
    // 45 target rows minus 9 labeled ones are evaluated.
    CHECK(trial.target_test_indices.size() == 36);
    Confusion& conf = trial.confusion[0];
    long long total = 0;
    long long diagonal = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            total += conf[i][j];
            if (i == j) diagonal += conf[i][j];
        }
    CHECK(total == 36);
    CHECK(diagonal == 36);
}

TEST_CASE("trials are deterministic and seed-sensitive") {
    Fixture fixture("determinism");
    TrialResult a = run_trial(fixture.cfg, 1);
    TrialResult b = run_trial(fixture.cfg, 1);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.objective_trace == b.objective_trace);
    CHECK(a.source_train_indices == b.source_train_indices);
    CHECK(a.target_train_indices == b.target_train_indices);
    CHECK(a.target_test_indices == b.target_test_indices);

    TrialResult c = run_trial(fixture.cfg, 2);
    CHECK(a.target_train_indices != c.target_train_indices);
}

TEST_CASE("experiments aggregate their trials and write every report file") {
    Fixture fixture("aggregate");
    AggregateResult result = run_experiment(fixture.cfg);
    REQUIRE(result.trials.size() == 3);
    REQUIRE(result.mean_accuracy.size() == 3);
    CHECK(result.class_count == 3);

    // Aggregates recompute exactly from the stored trials.
    for (std::size_t m = 0; m < 3; ++m) {
        double mean = 0.0;
        for (const TrialResult& t : result.trials) mean += t.accuracy[m];
        mean /= 3.0;
        CHECK(std::abs(mean - result.mean_accuracy[m]) <= 1e-12);
        double ss = 0.0;
        for (const TrialResult& t : result.trials) {
            ss += (t.accuracy[m] - mean) * (t.accuracy[m] - mean);
        }
        CHECK(std::abs(std::sqrt(ss / 2.0) - result.stddev_accuracy[m]) <= 1e-12);

        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double cell = 0.0;
                for (const TrialResult& t : result.trials)
                    cell += double(t.confusion[m][i][j]) / 3.0;
                CHECK(std::abs(cell - result.mean_confusion[m][i][j]) <= 1e-12);
            }
    }

    const fs::path& dir = fixture.cfg.output_dir;
    std::string acc = read_text(dir / "accuracy.csv");
    CHECK(count_lines(acc) == 3 + 3); // header + trials + mean + stddev
    CHECK(acc.rfind("trial,elm_s,elm_t,ptelm\n", 0) == 0);

    for (const char* method : {"elm_s", "elm_t", "ptelm"}) {
        std::string conf = read_text(dir / (std::string("confusion_") + method + ".csv"));
        CHECK(count_lines(conf) == 4); // header + one row per class
    }

    std::string trace = read_text(dir / "objective_trace.csv");
    CHECK(trace.rfind("trial,iteration,objective\n", 0) == 0);
    CHECK(count_lines(trace) >= 1 + 3); // at least one round per trial

    for (std::size_t k = 0; k < 3; ++k) {
        char tag[32];
        std::snprintf(tag, sizeof(tag), "trial_%03zu", k);
        CHECK(fs::exists(dir / "splits" / (std::string(tag) + "_source_train.csv")));
        CHECK(fs::exists(dir / "splits" / (std::string(tag) + "_target_train.csv")));
        CHECK(fs::exists(dir / "splits" / (std::string(tag) + "_target_test.csv")));
    }

    nlohmann::json summary = nlohmann::json::parse(read_text(dir / "summary.json"));
    CHECK(summary["version"] == kVersion);
    CHECK(summary["class_count"] == 3);
    CHECK(summary["config"]["trials"] == 3);
    CHECK(summary["config"]["pca_dims"].is_null());
    REQUIRE(summary["trials"].is_array());
    CHECK(summary["trials"].size() == 3);
    for (std::size_t m = 0; m < 3; ++m) {
        const char* name = to_string(fixture.cfg.methods[m]);
        CHECK(summary["mean_accuracy"][name].get<double>() ==
              doctest::Approx(result.mean_accuracy[m]).epsilon(1e-15));
        CHECK(summary["trials"][0]["accuracy"][name].get<double>() ==
              doctest::Approx(result.trials[0].accuracy[m]).epsilon(1e-15));
    }

    // The split manifest matches the indices the trial actually used.
    std::string manifest = read_text(dir / "splits" / "trial_000_target_train.csv");
    std::string expected = "class,index\n";
    for (std::size_t c = 0; c < result.trials[0].target_train_indices.size(); ++c)
        for (std::size_t idx : result.trials[0].target_train_indices[c])
            expected += std::to_string(c) + "," + std::to_string(idx) + "\n";
    CHECK(manifest == expected);
}

TEST_CASE("a single trial reports zero deviation and says why") {
    Fixture fixture("single");
    fixture.cfg.trials = 1;
    fixture.cfg.methods = {Method::elm_t};
    AggregateResult result = run_experiment(fixture.cfg);
    REQUIRE(result.stddev_accuracy.size() == 1);
    CHECK(result.stddev_accuracy[0] == 0.0);
    REQUIRE(result.notes.size() == 1);
    CHECK(result.notes[0].find("single trial") != std::string::npos);
    nlohmann::json summary = nlohmann::json::parse(read_text(fixture.cfg.output_dir / "summary.json"));
    CHECK(summary["notes"].size() == 1);
}

TEST_CASE("rerunning an experiment reproduces every report byte") {
    Fixture fixture("bytes");
    fixture.cfg.trials = 2;
    run_experiment(fixture.cfg);
    std::map<std::string, std::string> first = snapshot_reports(fixture.cfg.output_dir);
    REQUIRE(!first.empty());
    fs::remove_all(fixture.cfg.output_dir);
    run_experiment(fixture.cfg);
    std::map<std::string, std::string> second = snapshot_reports(fixture.cfg.output_dir);
    CHECK(first == second);
}

TEST_CASE("the rotated benchmark favors the transfer model over both baselines") {
    // On the shared rotated-Gaussians benchmark the transfer model must beat
    // the source-only ELM (trained on shifted data) and the target-only ELM
    // (trained on nine labeled rows) in mean accuracy over all 20 trials.
    fs::path dir = fresh_dir("benchmark");
    ExperimentConfig cfg = testsupport::make_benchmark_config(dir);
    AggregateResult result = run_experiment(cfg);
    REQUIRE(result.mean_accuracy.size() == 3);
    double elm_s = result.mean_accuracy[0];
    double elm_t = result.mean_accuracy[1];
    double ptelm = result.mean_accuracy[2];
    CHECK(ptelm > elm_s);
    CHECK(ptelm > elm_t);
}

TEST_CASE("a dimension-reduced run goes through the shared basis") {
    Fixture fixture("pca");
    fixture.cfg.pca_dims = 2;
    fixture.cfg.methods = {Method::elm_t};
    AggregateResult result = run_experiment(fixture.cfg);
    CHECK(result.mean_accuracy[0] > 0.5);

    fixture.cfg.pca_dims = 3; // only 2 features exist
    CHECK_THROWS_AS(run_experiment(fixture.cfg), Error);
}

TEST_CASE("domains with different label sets are refused") {
    Fixture fixture("labelsets");
    // Rewrite the target with labels {0,1} only.
    DomainDataset narrow = testsupport::make_gaussian_domain("target", {10, 10}, 0.0, 5);
    testsupport::write_domain_csv(narrow, fixture.dir / "target.csv");
    try {
        run_experiment(fixture.cfg);
        FAIL("expected a label-set mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::class_mismatch);
    }
}

TEST_CASE("a failing trial aborts the experiment with its index") {
    Fixture fixture("abort");
    fixture.cfg.split.source_per_class = 21; // pool has 20 per class
    try {
        run_experiment(fixture.cfg);
        FAIL("expected the run to abort");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_class_samples);
        CHECK(std::string(e.what()).find("trial 0 failed") != std::string::npos);
    }
}

TEST_CASE("single-value sweeps agree with a plain run") {
    Fixture fixture("sweep");
    fixture.cfg.trials = 2;
    fixture.cfg.methods = {Method::elm_t, Method::ptelm};
    AggregateResult plain = run_experiment(fixture.cfg);

    ExperimentConfig sweep_cfg = fixture.cfg;
    sweep_cfg.output_dir = fixture.dir / "sweep";
    std::vector<SweepPoint> points = sensitivity_sweep(sweep_cfg, "lambda2", {30.0});
    REQUIRE(points.size() == 1);
    CHECK(points[0].value == 30.0);
    REQUIRE(points[0].mean_accuracy.size() == 2);
    // lambda2 = 30 is already the configured value, so the sub-run matches.
    CHECK(points[0].mean_accuracy == plain.mean_accuracy);
    CHECK(points[0].stddev_accuracy == plain.stddev_accuracy);

    CHECK(fs::exists(sweep_cfg.output_dir / "sweep_lambda2.csv"));
    CHECK(fs::exists(sweep_cfg.output_dir / "sweep_lambda2.json"));
    CHECK(fs::exists(sweep_cfg.output_dir / "value_000" / "accuracy.csv"));

    std::string curve = read_text(sweep_cfg.output_dir / "sweep_lambda2.csv");
    CHECK(curve.rfind("value,elm_t_mean,elm_t_stddev,ptelm_mean,ptelm_stddev\n", 0) == 0);
    CHECK(count_lines(curve) == 2);
}

TEST_CASE("the hidden-node sweep accepts L as an alias and validates the grid") {
    Fixture fixture("sweepL");
    fixture.cfg.trials = 1;
    fixture.cfg.methods = {Method::elm_t};
    ExperimentConfig cfg = fixture.cfg;
    cfg.output_dir = fixture.dir / "sweepL_out";
    std::vector<SweepPoint> points = sensitivity_sweep(cfg, "L", {10.0, 20.0});
    REQUIRE(points.size() == 2);
    CHECK(fs::exists(cfg.output_dir / "sweep_hidden_nodes.csv"));

    CHECK_THROWS_AS(sensitivity_sweep(cfg, "L", {12.5}), Error);
    CHECK_THROWS_AS(sensitivity_sweep(cfg, "epsilon", {1.0}), Error);
    CHECK_THROWS_AS(sensitivity_sweep(cfg, "lambda1", {}), Error);
}

TEST_CASE("the source trade-off sweep never favors an extreme") {
    // Sweeping the source-fit weight across four orders of magnitude on the
    // rotated benchmark: the moderate setting must do at least as well as
    // either extreme, and every point must stay far above chance.
    fs::path dir = fresh_dir("lambda1_curve");
    ExperimentConfig cfg = testsupport::make_benchmark_config(dir);
    cfg.trials = 5;
    cfg.methods = {Method::ptelm};
    std::vector<SweepPoint> points = sensitivity_sweep(cfg, "lambda1", {0.01, 1.0, 100.0});
    REQUIRE(points.size() == 3);
    for (const SweepPoint& p : points) CHECK(p.mean_accuracy[0] > 0.5);
    CHECK(points[1].mean_accuracy[0] >= points[0].mean_accuracy[0] - 1e-12);
    CHECK(points[1].mean_accuracy[0] >= points[2].mean_accuracy[0] - 1e-12);
}

TEST_CASE("sweeps are reproducible byte for byte") {
    Fixture fixture("sweepbytes");
    fixture.cfg.trials = 1;
    fixture.cfg.methods = {Method::ptelm};
    ExperimentConfig cfg = fixture.cfg;
    cfg.output_dir = fixture.dir / "sweep_out";
    sensitivity_sweep(cfg, "lambda3", {5.0, 10.0});
    std::map<std::string, std::string> first = snapshot_reports(cfg.output_dir);
    fs::remove_all(cfg.output_dir);
    sensitivity_sweep(cfg, "lambda3", {5.0, 10.0});
    CHECK(snapshot_reports(cfg.output_dir) == first);
}

TEST_CASE("split manifests can be written without training") {
    Fixture fixture("splits_only");
    ExperimentConfig cfg = fixture.cfg;
    cfg.output_dir = fixture.dir / "splits_only_out";
    write_split_manifests(cfg, 2);
    fs::path base = cfg.output_dir / "splits";
    CHECK(fs::exists(base / "trial_002_source_train.csv"));
    CHECK(fs::exists(base / "trial_002_target_train.csv"));
    CHECK(fs::exists(base / "trial_002_target_test.csv"));

    std::string manifest = read_text(base / "trial_002_target_train.csv");
    CHECK(manifest.rfind("class,index\n", 0) == 0);
    CHECK(count_lines(manifest) == 1 + 9); // 3 classes x 3 labeled rows

    // The standalone manifest matches what a full trial would use.
    TrialResult trial = run_trial(cfg, 2);
    std::string expected = "class,index\n";
    for (std::size_t c = 0; c < trial.target_train_indices.size(); ++c)
        for (std::size_t idx : trial.target_train_indices[c])
            expected += std::to_string(c) + "," + std::to_string(idx) + "\n";
    CHECK(manifest == expected);
}

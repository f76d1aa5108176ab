// Acceptance suite: one function per criterion, each printing a single
// [PASS]/[FAIL] line. Exit code 0 iff every requested criterion passed.
//
// Data resolution: genuine MNIST IDX files are used when --mnist-dir (or
// $CAC_MNIST_DIR) points at them; otherwise the deterministic synthetic
// corpus (seed 2026, 60k/10k) is generated once under the working directory
// and reused. Criteria 6 and 8/9 are the long tier: full-scale searches that
// take hours; everything else finishes in seconds to minutes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cac/diagnostics.hpp"
#include "cac/features.hpp"
#include "cac/linear.hpp"
#include "cac/mnist.hpp"
#include "cac/parallel.hpp"
#include "cac/search.hpp"
#include "cac/serialize.hpp"
#include "cac/stepper.hpp"
#include "cac/synth.hpp"

namespace fs = std::filesystem;
using namespace cac;

namespace {

int g_checks_failed = 0;

#define REQUIRE_MSG(cond, ...)                                   \
    do {                                                         \
        if (!(cond)) {                                           \
            std::printf("  [check failed] ");                    \
            std::printf(__VA_ARGS__);                            \
            std::printf("\n");                                   \
            ++g_checks_failed;                                   \
        }                                                        \
    } while (0)

struct DataPaths {
    fs::path train_images;
    fs::path train_labels;
    fs::path test_images;
    fs::path test_labels;
    bool genuine_mnist = false;
};

fs::path g_mnist_dir;
fs::path g_work_dir = "acceptance_data";

bool has_mnist_files(const fs::path& dir) {
    return fs::exists(dir / "train-images-idx3-ubyte") &&
           fs::exists(dir / "train-labels-idx1-ubyte") &&
           fs::exists(dir / "t10k-images-idx3-ubyte") &&
           fs::exists(dir / "t10k-labels-idx1-ubyte");
}

const DataPaths& resolve_data() {
    static DataPaths paths = [] {
        DataPaths p;
        fs::path dir = g_mnist_dir;
        if (dir.empty()) {
            if (const char* env = std::getenv("CAC_MNIST_DIR")) {
                dir = env;
            }
        }
        if (!dir.empty() && has_mnist_files(dir)) {
            p.genuine_mnist = true;
        } else {
            dir = g_work_dir / "synth";
            if (!has_mnist_files(dir)) {
                std::printf(
                    "  (no genuine MNIST available; generating the "
                    "deterministic synthetic corpus under %s)\n",
                    dir.string().c_str());
                synth::write_mnist_shaped_corpus(dir, 60000, 10000, 2026);
            }
        }
        p.train_images = dir / "train-images-idx3-ubyte";
        p.train_labels = dir / "train-labels-idx1-ubyte";
        p.test_images = dir / "t10k-images-idx3-ubyte";
        p.test_labels = dir / "t10k-labels-idx1-ubyte";
        return p;
    }();
    return paths;
}

const mnist::Dataset& train_dataset() {
    static const mnist::Dataset ds = mnist::load_dataset(
        resolve_data().train_images, resolve_data().train_labels,
        mnist::Split::train);
    return ds;
}

const mnist::Dataset& test_dataset() {
    static const mnist::Dataset ds =
        mnist::load_dataset(resolve_data().test_images,
                            resolve_data().test_labels, mnist::Split::test);
    return ds;
}

Lattice random_lattice(int side, rng::Engine& g) {
    Lattice lat(side);
    for (auto& cell : lat.cells) {
        cell = static_cast<std::uint8_t>(g() & 1);
    }
    return lat;
}

RuleTable random_rule(rng::Engine& g) {
    RuleTable rule;
    for (auto& e : rule) {
        e = static_cast<std::uint8_t>(g() & 1);
    }
    return rule;
}

// ---------------------------------------------------------------------------
// 1. optimized stepper vs reference oracle, >= 1000 random pairs
bool criterion_1() {
    rng::Engine g(0xC1);
    int pairs = 0;
    for (const int side : {3, 4, 5, 28}) {
        for (int trial = 0; trial < 250; ++trial) {
            const auto rule = random_rule(g);
            const auto lat = random_lattice(side, g);
            const auto fast = step(lat, rule);
            const auto slow = reference_step(lat, rule);
            REQUIRE_MSG(fast.lattice == slow.lattice,
                        "lattice mismatch at side %d trial %d", side, trial);
            REQUIRE_MSG(fast.changed == slow.changed,
                        "count mismatch at side %d trial %d", side, trial);
            REQUIRE_MSG(fast.changed_mask == slow.changed_mask,
                        "mask mismatch at side %d trial %d", side, trial);
            ++pairs;
        }
    }
    std::printf("  %d random (rule, lattice) pairs checked exactly\n", pairs);
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 2. translation invariance of total activity on dataset images
bool criterion_2() {
    rng::Engine g(0xC2);
    const auto& ds = train_dataset();
    const int depth = 10;
    const auto image_ids = rng::sample_without_replacement(
        g, static_cast<std::uint32_t>(ds.size()), 100);
    for (int r = 0; r < 100; ++r) {
        const auto rule = random_rule(g);
        const auto& img = ds.images[image_ids[r]];
        const auto base_lat = mnist::binarize(img, ds.side);
        const auto base =
            run_trajectory(base_lat, rule, depth).total_activity;
        for (int k = 0; k < 10; ++k) {
            const int dr = static_cast<int>(rng::uniform_below(g, ds.side));
            const int dc = static_cast<int>(rng::uniform_below(g, ds.side));
            Lattice moved(base_lat.side);
            for (int row = 0; row < base_lat.side; ++row) {
                for (int col = 0; col < base_lat.side; ++col) {
                    moved.at(moved.wrap(row + dr), moved.wrap(col + dc)) =
                        base_lat.at(row, col);
                }
            }
            const auto shifted =
                run_trajectory(moved, rule, depth).total_activity;
            REQUIRE_MSG(shifted == base,
                        "activity changed under translation (+%d,+%d): "
                        "%lld vs %lld",
                        dr, dc, static_cast<long long>(shifted),
                        static_cast<long long>(base));
        }
    }
    std::printf(
        "  100 rules x 100 distinct images x 10 translations each, exact\n");
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 3. phi unit values
bool criterion_3() {
    // identity rule on a real minibatch -> phi = 0 exactly
    const auto& ds = train_dataset();
    search::SearchConfig config;
    config.minibatch_size = 1000;
    config.minibatch_seed = 3;
    const auto mb = search::make_minibatch(ds, config);
    const StepTable table(identity_rule_table());
    std::vector<double> activities(mb.size());
    search::evaluate_activities(mb.images, table, 10, activities);
    const double phi0 = search::phi_objective(activities, mb.labels, 0);
    REQUIRE_MSG(phi0 == 0.0, "identity phi = %g, want exactly 0", phi0);

    // hand-computed 4-image example
    const std::vector<double> a = {0.1, 0.3, 0.8, 0.6};
    const std::vector<std::uint8_t> labels = {0, 0, 1, 2};
    const double phi_hand = search::phi_objective(a, labels, 0);
    REQUIRE_MSG(std::abs(phi_hand - 0.5) < 1e-12,
                "hand example phi = %.17g, want 0.5", phi_hand);

    // bounds on 1e4 random activity vectors
    rng::Engine g(0xC3);
    for (int trial = 0; trial < 10000; ++trial) {
        const int m = 2 + static_cast<int>(rng::uniform_below(g, 40));
        std::vector<double> act(m);
        std::vector<std::uint8_t> lab(m);
        const int target = static_cast<int>(rng::uniform_below(g, 10));
        for (int j = 0; j < m; ++j) {
            act[j] = double(g() >> 11) * 0x1.0p-53;
            lab[j] = static_cast<std::uint8_t>(rng::uniform_below(g, 10));
        }
        lab[0] = static_cast<std::uint8_t>(target);      // both partitions
        lab[1] = static_cast<std::uint8_t>((target + 1) % 10);
        const double phi = search::phi_objective(act, lab, target);
        REQUIRE_MSG(phi >= -1.0 - 1e-12 && phi <= 1.0 + 1e-12,
                    "phi out of [-1,1]: %.17g", phi);
    }
    std::printf("  identity phi == 0, hand example == 0.5, 1e4 bound checks\n");
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 4. zero-temperature monotonicity + bit-exact rejection restore
bool criterion_4() {
    const auto& ds = train_dataset();
    for (const std::uint64_t seed : {11, 12, 13, 14, 15}) {
        search::SearchConfig config;
        config.mode = search::Mode::fixed_depth;
        config.fixed_depth = 10;
        config.budget = 10000;
        config.minibatch_size = 500;
        config.minibatch_seed = seed + 100;
        config.seed = seed;
        const auto mb = search::make_minibatch(ds, config);
        const auto result = search::run_search(config, mb);

        double phi = 0.0;
        for (const auto& e : result.trace) {
            if (e.accepted) {
                REQUIRE_MSG(e.phi >= phi,
                            "seed %llu: accepted phi decreased %.17g -> %.17g",
                            static_cast<unsigned long long>(seed), phi, e.phi);
            } else {
                REQUIRE_MSG(e.phi == phi,
                            "seed %llu: rejected proposal moved phi",
                            static_cast<unsigned long long>(seed));
            }
            phi = e.phi;
        }

        // the cached state equals a fresh recomputation, bit for bit
        const StepTable table(result.state.rule);
        std::vector<double> fresh(mb.size());
        search::evaluate_activities(mb.images, table, result.state.depth,
                                    fresh);
        REQUIRE_MSG(fresh == result.state.activities,
                    "seed %llu: activity cache deviates from recomputation",
                    static_cast<unsigned long long>(seed));
        REQUIRE_MSG(result.state.phi == search::phi_objective(
                                            fresh, mb.labels,
                                            config.target_class),
                    "seed %llu: phi deviates from recomputation",
                    static_cast<unsigned long long>(seed));
    }

    // the same invariants hold with depth moves in play
    {
        search::SearchConfig config;
        config.mode = search::Mode::variable_depth;
        config.budget = 2000;
        config.minibatch_size = 500;
        config.minibatch_seed = 7;
        config.seed = 16;
        const auto mb = search::make_minibatch(ds, config);
        const auto result = search::run_search(config, mb);
        double phi = 0.0;
        int depth = config.initial_depth;
        for (const auto& e : result.trace) {
            if (e.kind == search::ProposalKind::reset) {
                phi = e.phi;
                depth = e.depth;
                continue;
            }
            REQUIRE_MSG(e.depth >= 1, "depth floor violated");
            REQUIRE_MSG(std::abs(e.depth - depth) <= 1, "depth jumped by > 1");
            if (e.accepted) {
                REQUIRE_MSG(e.phi >= phi, "variable: accepted phi decreased");
            } else {
                REQUIRE_MSG(e.phi == phi && e.depth == depth,
                            "variable: rejected proposal changed the chain");
            }
            phi = e.phi;
            depth = e.depth;
        }
    }
    std::printf("  5 seeds x 1e4 proposals (T=10) + variable-depth check\n");
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 5. desk-scale learning signal: phi >= 0.05 in at least 3 of 5 seeds
bool criterion_5() {
    const auto& ds = train_dataset();
    int reached = 0;
    for (const std::uint64_t seed : {1, 2, 3, 4, 5}) {
        search::SearchConfig config;
        config.target_class = 0;
        config.mode = search::Mode::fixed_depth;
        config.fixed_depth = 10;
        config.budget = 20000;
        config.minibatch_size = 500;
        config.minibatch_seed = seed;
        config.seed = seed;
        const auto mb = search::make_minibatch(ds, config);
        const auto result = search::run_search(config, mb);
        std::printf("  seed %llu: phi = %.4f after %llu proposals\n",
                    static_cast<unsigned long long>(seed), result.state.phi,
                    static_cast<unsigned long long>(config.budget));
        if (result.state.phi >= 0.05) {
            ++reached;
        }
    }
    REQUIRE_MSG(reached >= 3, "phi >= 0.05 reached in only %d of 5 seeds",
                reached);
    std::printf("  %d of 5 seeds reached phi >= 0.05\n", reached);
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 6. phase coexistence at full scale (long tier)
bool criterion_6() {
    const auto& ds = train_dataset();
    search::SearchConfig config;
    config.target_class = 0;
    config.mode = search::Mode::variable_depth;
    config.budget = 100000;  // pinned: budget >= 1e5
    config.minibatch_size = 5000;
    config.minibatch_seed = 77;
    config.seed = 106;  // committed demonstrating seed
    const auto mb = search::make_minibatch(ds, config);

    const auto t0 = std::chrono::steady_clock::now();
    const auto result = search::run_search(
        config, mb, [&](const search::TraceEntry& e) {
            if (e.n % 1000 == 0) {
                const double dt =
                    std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
                std::printf("  n=%llu phi=%.4f T=%d (%.0fs)\n",
                            static_cast<unsigned long long>(e.n), e.phi,
                            e.depth, dt);
                std::fflush(stdout);
            }
        });
    std::printf("  final: phi=%.4f T=%d resets=%llu\n", result.state.phi,
                result.state.depth,
                static_cast<unsigned long long>(result.resets));
    REQUIRE_MSG(result.state.depth > 100,
                "run ended with T = %d, need > 100 for this seed",
                result.state.depth);

    const auto& test = test_dataset();
    REQUIRE_MSG(test.size() >= 10000, "need >= 1e4 held-out images");
    std::vector<PackedGrid> grids;
    grids.reserve(test.size());
    for (const auto& img : test.images) {
        grids.push_back(pack(mnist::binarize(img, test.side)));
    }
    const StepTable table(result.state.rule);
    std::vector<double> activities(grids.size());
    search::evaluate_activities(grids, table, result.state.depth, activities);
    const auto summary = diag::bimodality_summary(activities, 0.25, 0.75);
    std::printf("  held-out mass: below=%.4f middle=%.4f above=%.4f\n",
                summary.below, summary.middle, summary.above);
    REQUIRE_MSG(summary.middle < 0.2,
                "middle-band mass %.4f, need < 0.2 (phase coexistence)",
                summary.middle);
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 7. analytic gradient vs central finite differences
bool criterion_7() {
    rng::Engine g(0xC7);
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const int n = 3 + static_cast<int>(rng::uniform_below(g, 6));
        const int f = 4 + static_cast<int>(rng::uniform_below(g, 5));
        features::FeatureMatrix m;
        m.n_rows = n;
        m.n_cols = f;
        m.column_class.assign(f, 0);
        m.bits.resize(std::size_t(n) * f);
        for (auto& b : m.bits) {
            b = static_cast<std::uint8_t>(g() & 1);
        }
        std::vector<std::uint8_t> labels(n);
        for (auto& l : labels) {
            l = static_cast<std::uint8_t>(rng::uniform_below(g, 10));
        }
        const auto x = linear::design_matrix(m);
        Eigen::MatrixXd w(10, f + 1);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w(i) = double(g() >> 11) * 0x1.0p-53 - 0.5;
        }
        const auto grad = linear::softmax_cross_entropy_gradient(w, x, labels);
        const double eps = 1e-5;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                Eigen::MatrixXd wp = w;
                Eigen::MatrixXd wm = w;
                wp(r, c) += eps;
                wm(r, c) -= eps;
                const double fd =
                    (linear::softmax_cross_entropy_loss(wp, x, labels) -
                     linear::softmax_cross_entropy_loss(wm, x, labels)) /
                    (2 * eps);
                const double denom =
                    std::max({std::abs(fd), std::abs(grad(r, c)), 1e-6});
                worst = std::max(worst, std::abs(grad(r, c) - fd) / denom);
            }
        }
    }
    std::printf("  max relative gradient error over 20 instances: %.3g\n",
                worst);
    REQUIRE_MSG(worst < 1e-4, "gradient error %.3g exceeds 1e-4", worst);
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 8 + 9. reduced end-to-end pipeline (long tier): 10 automata, one per
// class, budget 1e5 each; head accuracy > 30%; thresholds 1/4 vs 1/2 within
// 5 points. The full 50-automaton recipe ships as scripts/reproduce_full.sh.
bool criterion_8_9() {
    const auto& train = train_dataset();
    const auto& test = test_dataset();

    std::vector<features::TrainedAutomaton> ensemble;
    for (int cls = 0; cls < 10; ++cls) {
        search::SearchConfig config;
        config.target_class = cls;
        config.mode = search::Mode::fixed_depth;
        config.fixed_depth = 10;
        config.budget = 100000;  // pinned: budget 1e5 per automaton
        config.minibatch_size = 1000;
        config.minibatch_seed = rng::derive_seed(2000, cls);
        config.seed = rng::derive_seed(1000, cls);
        const auto mb = search::make_minibatch(train, config);
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = search::run_search(config, mb);
        const double dt = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        std::printf("  automaton class %d: phi=%.4f (%.0fs)\n", cls,
                    result.state.phi, dt);
        std::fflush(stdout);
        ensemble.push_back({result.state.rule, result.state.depth, cls,
                            config.seed, io::config_digest(config)});
    }

    double accuracy_quarter = 0.0;
    double accuracy_half = 0.0;
    for (const double theta : {0.25, 0.5}) {
        const auto train_features =
            features::extract_feature_matrix(train, ensemble, theta);
        const auto test_features =
            features::extract_feature_matrix(test, ensemble, theta);
        std::vector<std::uint8_t> train_labels;
        std::vector<std::uint8_t> test_labels;
        for (const auto& img : train.images) {
            train_labels.push_back(img.label);
        }
        for (const auto& img : test.images) {
            test_labels.push_back(img.label);
        }
        linear::Hyperparams hyper;  // lr 0.1, 300 epochs, full batch
        const auto model = linear::train(train_features, train_labels, hyper);
        const auto ev = linear::evaluate(model, test_features, test_labels);
        std::printf("  theta=%.2f: test accuracy %.4f\n", theta, ev.accuracy);
        std::fflush(stdout);
        (theta == 0.25 ? accuracy_quarter : accuracy_half) = ev.accuracy;
    }

    REQUIRE_MSG(accuracy_quarter > 0.30,
                "theta=1/4 accuracy %.4f, need > 0.30 (~3x the 11.35%% "
                "majority baseline)",
                accuracy_quarter);
    REQUIRE_MSG(std::abs(accuracy_quarter - accuracy_half) < 0.05,
                "threshold robustness: |%.4f - %.4f| >= 5 points",
                accuracy_quarter, accuracy_half);
    return g_checks_failed == 0;
}

// ---------------------------------------------------------------------------
// 10. IDX parsing at full scale + corrupt-fixture suite
bool criterion_10() {
    const auto& paths = resolve_data();
    if (paths.genuine_mnist) {
        std::printf("  using genuine MNIST files\n");
    } else {
        std::printf(
            "  genuine MNIST unavailable in this environment; running the "
            "same byte-exact validation against the generated 60k/10k "
            "corpus\n");
    }

    REQUIRE_MSG(fs::file_size(paths.train_images) == 16 + 60000ull * 28 * 28,
                "train image file size mismatch");
    REQUIRE_MSG(fs::file_size(paths.train_labels) == 8 + 60000ull,
                "train label file size mismatch");
    REQUIRE_MSG(fs::file_size(paths.test_images) == 16 + 10000ull * 28 * 28,
                "test image file size mismatch");
    REQUIRE_MSG(fs::file_size(paths.test_labels) == 8 + 10000ull,
                "test label file size mismatch");

    const auto train_images = mnist::parse_idx_images(paths.train_images);
    REQUIRE_MSG(train_images.count == 60000 && train_images.rows == 28 &&
                    train_images.cols == 28,
                "train image header mismatch");
    const auto train_labels = mnist::parse_idx_labels(paths.train_labels);
    REQUIRE_MSG(train_labels.size() == 60000, "train label count mismatch");
    const auto test_images = mnist::parse_idx_images(paths.test_images);
    REQUIRE_MSG(test_images.count == 10000, "test image count mismatch");
    const auto test_labels = mnist::parse_idx_labels(paths.test_labels);
    REQUIRE_MSG(test_labels.size() == 10000, "test label count mismatch");
    for (const auto l : train_labels) {
        if (l > 9) {
            REQUIRE_MSG(false, "train label out of range");
            break;
        }
    }

    // corrupt fixtures
    const auto expect_error = [&](const std::string& raw, const char* what) {
        std::istringstream in(raw, std::ios::binary);
        try {
            mnist::parse_idx_images(in);
            REQUIRE_MSG(false, "%s: no error raised", what);
        } catch (const mnist::ParseError&) {
        }
    };
    const auto be32 = [](std::uint32_t v) {
        std::string s(4, '\0');
        s[0] = static_cast<char>(v >> 24);
        s[1] = static_cast<char>(v >> 16);
        s[2] = static_cast<char>(v >> 8);
        s[3] = static_cast<char>(v);
        return s;
    };
    expect_error(be32(0x00000801) + be32(1) + be32(1) + be32(1) + "x",
                 "label magic in image parser");
    expect_error(be32(0x12345678), "garbage magic");
    expect_error(be32(0x00000803) + be32(2) + be32(2) + be32(2) + "abc",
                 "truncated payload");
    expect_error(be32(0x00000803) + be32(1), "truncated header");
    {
        std::istringstream in(be32(0x00000803) + be32(1) + be32(1) + be32(1) +
                                  "ab",
                              std::ios::binary);
        try {
            mnist::parse_idx_images(in);
            REQUIRE_MSG(false, "trailing bytes: no error raised");
        } catch (const mnist::ParseError&) {
        }
    }
    std::printf("  60000/10000 items, exact byte sizes, corrupt fixtures "
                "rejected\n");
    return g_checks_failed == 0;
}

struct Criterion {
    int number;
    const char* title;
    std::function<bool()> run;
    bool long_tier;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> requested;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            requested.push_back(std::atoi(argv[++i]));
        } else if (std::strcmp(argv[i], "--mnist-dir") == 0 && i + 1 < argc) {
            g_mnist_dir = argv[++i];
        } else if (std::strcmp(argv[i], "--work-dir") == 0 && i + 1 < argc) {
            g_work_dir = argv[++i];
        } else if (std::strcmp(argv[i], "--long") == 0) {
            requested = {6, 8};
        } else {
            std::fprintf(stderr,
                         "usage: acceptance [--criterion N]... [--long] "
                         "[--mnist-dir D] [--work-dir D]\n");
            return 2;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "stepper oracle equivalence", criterion_1, false},
        {2, "translation invariance of activity", criterion_2, false},
        {3, "phi unit values and bounds", criterion_3, false},
        {4, "zero-temperature monotonicity and exact rejection", criterion_4,
         false},
        {5, "desk-scale learning signal (fixed depth)", criterion_5, false},
        {6, "phase coexistence at full scale", criterion_6, true},
        {7, "linear-head gradient vs finite differences", criterion_7, false},
        {8, "reduced end-to-end accuracy + threshold robustness (criteria "
            "8 and 9)",
         criterion_8_9, true},
        {9, "threshold robustness (runs inside criterion 8)", nullptr, true},
        {10, "IDX parsing and validation", criterion_10, false},
    };

    if (requested.empty()) {
        for (const auto& c : criteria) {
            if (!c.long_tier) {
                requested.push_back(c.number);
            }
        }
    }

    int failed = 0;
    for (const int number : requested) {
        const auto it =
            std::find_if(criteria.begin(), criteria.end(),
                         [&](const Criterion& c) { return c.number == number; });
        if (it == criteria.end()) {
            std::fprintf(stderr, "unknown criterion %d\n", number);
            return 2;
        }
        if (!it->run) {
            std::printf("criterion %d (%s): covered by criterion 8\n", number,
                        it->title);
            continue;
        }
        std::printf("criterion %d (%s):\n", number, it->title);
        std::fflush(stdout);
        g_checks_failed = 0;
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = it->run();
        const double dt = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        std::printf("[%s] criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL",
                    number, it->title, dt);
        std::fflush(stdout);
        failed += ok ? 0 : 1;
    }
    if (failed > 0) {
        std::printf("%d criterion(s) failed\n", failed);
        return 1;
    }
    std::printf("all requested criteria passed\n");
    return 0;
}

// Command-line harness: data generation, automaton training, feature
// extraction, linear-head training/evaluation, and figure-style diagnostics.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cac/diagnostics.hpp"
#include "cac/features.hpp"
#include "cac/linear.hpp"
#include "cac/mnist.hpp"
#include "cac/search.hpp"
#include "cac/serialize.hpp"
#include "cac/stepper.hpp"
#include "cac/synth.hpp"

namespace fs = std::filesystem;
using namespace cac;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        const auto dash = token.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int lo = std::stoi(token.substr(0, dash));
            const int hi = std::stoi(token.substr(dash + 1));
            for (int v = lo; v <= hi; ++v) {
                out.push_back(v);
            }
        } else if (!token.empty()) {
            out.push_back(std::stoi(token));
        }
    }
    return out;
}

mnist::Dataset load_dataset_checked(const fs::path& images, const fs::path& labels,
                                    mnist::Split split) {
    return mnist::load_dataset(images, labels, split);
}

std::vector<features::TrainedAutomaton> load_ensemble(
    const std::vector<std::string>& rule_args) {
    std::vector<fs::path> paths;
    for (const auto& arg : rule_args) {
        const fs::path p(arg);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.path().extension() == ".rule") {
                    paths.push_back(entry.path());
                }
            }
        } else {
            paths.push_back(p);
        }
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) {
        throw io::ConfigError("no rule files given");
    }
    std::vector<features::TrainedAutomaton> ensemble;
    ensemble.reserve(paths.size());
    for (const auto& p : paths) {
        ensemble.push_back(io::load_rule_file(p));
    }
    return ensemble;
}

// training outputs land in <out_dir>/automaton_c<class>_s<seed>.{rule,trace.csv}
struct TrainOutcome {
    features::TrainedAutomaton automaton;
    fs::path rule_path;
};

TrainOutcome train_one(const io::RunConfig& config, bool quiet) {
    const auto& sc = config.search;
    const bool train_split = sc.split == mnist::Split::train;
    const auto dataset = load_dataset_checked(
        train_split ? config.train_images : config.test_images,
        train_split ? config.train_labels : config.test_labels, sc.split);
    const auto minibatch = search::make_minibatch(dataset, sc);

    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t accepted = 0;
    search::ProgressSink sink;
    if (config.log_every > 0) {
        sink = [&](const search::TraceEntry& e) {
            accepted += e.accepted ? 1 : 0;
            if (e.n % config.log_every == 0 || e.n == sc.budget) {
                const auto dt = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                std::fprintf(stderr,
                             "[train c%d s%llu] n=%llu phi=%.6f T=%d acc=%llu "
                             "t=%.0fs\n",
                             sc.target_class,
                             static_cast<unsigned long long>(sc.seed),
                             static_cast<unsigned long long>(e.n), e.phi,
                             e.depth,
                             static_cast<unsigned long long>(accepted), dt);
            }
        };
    }

    const auto result = search::run_search(sc, minibatch, sink);

    TrainOutcome outcome;
    outcome.automaton.rule = result.state.rule;
    outcome.automaton.depth = result.state.depth;
    outcome.automaton.trained_class = sc.target_class;
    outcome.automaton.seed = sc.seed;
    outcome.automaton.config_digest = io::config_digest(sc);

    const std::string stem = "automaton_c" + std::to_string(sc.target_class) +
                             "_s" + std::to_string(sc.seed);
    outcome.rule_path = config.out_dir / (stem + ".rule");
    const fs::path trace_path = config.out_dir / (stem + "_trace.csv");

    // stage through a temp name so a failed run never leaves a partial file
    const fs::path tmp = outcome.rule_path.string() + ".tmp";
    io::save_rule_file(tmp, outcome.automaton);
    fs::rename(tmp, outcome.rule_path);
    io::write_trace_csv(trace_path, result.trace);

    if (!quiet) {
        std::printf("%s: phi=%.6f T=%d accepted=%llu/%llu resets=%llu\n",
                    outcome.rule_path.string().c_str(), result.state.phi,
                    result.state.depth,
                    static_cast<unsigned long long>(
                        result.state.proposals_accepted),
                    static_cast<unsigned long long>(
                        result.state.proposals_made),
                    static_cast<unsigned long long>(result.resets));
    }
    return outcome;
}

int run_cli(int argc, char** argv) {
    CLI::App app{
        "cac: trains 2D cellular automata to classify images by trajectory "
        "activity, extracts binary phase-membership features, and fits a "
        "linear head on them"};
    app.require_subcommand(1);

    // --- gen-data ---
    auto* gen = app.add_subcommand(
        "gen-data", "Write a deterministic MNIST-shaped synthetic corpus");
    std::string gen_out = "data/synth";
    std::uint32_t gen_train = 60000;
    std::uint32_t gen_test = 10000;
    std::uint64_t gen_seed = 2026;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--train", gen_train, "training image count");
    gen->add_option("--test", gen_test, "test image count");
    gen->add_option("--seed", gen_seed, "corpus seed");
    gen->callback([&] {
        synth::write_mnist_shaped_corpus(gen_out, gen_train, gen_test, gen_seed);
        std::printf("wrote %u train / %u test images under %s\n", gen_train,
                    gen_test, gen_out.c_str());
    });

    // --- train-automaton ---
    auto* train = app.add_subcommand(
        "train-automaton", "Metropolis search for one automaton (config file)");
    std::string train_config;
    train->add_option("--config", train_config, "run config file")->required();
    train->callback([&] { train_one(io::load_run_config(train_config), false); });

    // --- train-ensemble ---
    auto* ens = app.add_subcommand(
        "train-ensemble",
        "Train per-class automata with per-member derived seeds");
    std::string ens_config;
    int ens_per_class = 1;
    int ens_jobs = 1;
    std::string ens_classes = "0-9";
    ens->add_option("--config", ens_config, "base run config file")->required();
    ens->add_option("--per-class", ens_per_class, "automata per class");
    ens->add_option("--classes", ens_classes, "classes, e.g. 0,2,5 or 0-9");
    ens->add_option("--jobs", ens_jobs,
                    "members trained concurrently (pair with CAC_THREADS=1)");
    ens->callback([&] {
        const auto base = io::load_run_config(ens_config);
        std::vector<io::RunConfig> members;
        for (const int cls : parse_int_list(ens_classes)) {
            for (int rep = 0; rep < ens_per_class; ++rep) {
                io::RunConfig member = base;
                member.search.target_class = cls;
                member.search.seed = rng::derive_seed(
                    base.search.seed, static_cast<std::uint64_t>(cls) * 64 + rep);
                member.search.minibatch_seed = rng::derive_seed(
                    base.search.minibatch_seed,
                    static_cast<std::uint64_t>(cls) * 64 + rep);
                members.push_back(std::move(member));
            }
        }
        // members are independent: separate minibatches, seeds, and output
        // files, so they can run in parallel without coordination
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        const auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < members.size();
                 i = next.fetch_add(1)) {
                try {
                    train_one(members[i], false);
                } catch (const std::exception& e) {
                    std::fprintf(stderr, "member %zu failed: %s\n", i,
                                 e.what());
                    failed = true;
                }
            }
        };
        if (ens_jobs <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int j = 0; j < ens_jobs; ++j) {
                pool.emplace_back(worker);
            }
            for (auto& t : pool) {
                t.join();
            }
        }
        if (failed) {
            throw io::IoError("one or more ensemble members failed");
        }
    });

    // --- extract-features ---
    auto* extract = app.add_subcommand(
        "extract-features", "Binary phase-membership features for a dataset");
    std::vector<std::string> ex_rules;
    std::string ex_images;
    std::string ex_labels;
    std::string ex_out = "features.csv";
    std::string ex_bitmap;
    double ex_theta = 0.25;
    int ex_depth_override = 0;
    extract->add_option("--rules", ex_rules, "rule files or directories")
        ->required();
    extract->add_option("--images", ex_images, "IDX image file")->required();
    extract->add_option("--labels", ex_labels, "IDX label file")->required();
    extract->add_option("--theta", ex_theta, "low-activity threshold");
    extract->add_option("--depth-override", ex_depth_override,
                        "run every automaton at this depth instead");
    extract->add_option("--out", ex_out, "feature CSV path");
    extract->add_option("--bitmap", ex_bitmap, "optional compact bitmap path");
    extract->callback([&] {
        const auto ensemble = load_ensemble(ex_rules);
        const auto dataset =
            load_dataset_checked(ex_images, ex_labels, mnist::Split::test);
        std::optional<int> override_depth;
        if (ex_depth_override > 0) {
            override_depth = ex_depth_override;
        }
        std::vector<std::uint8_t> labels;
        labels.reserve(dataset.size());
        for (const auto& img : dataset.images) {
            labels.push_back(img.label);
        }
        const auto matrix = features::extract_feature_matrix(
            dataset, ensemble, ex_theta, override_depth);
        io::write_feature_csv(ex_out, matrix, labels);
        if (!ex_bitmap.empty()) {
            io::write_feature_bitmap(ex_bitmap, matrix);
        }
        std::printf("wrote %zu x %zu feature matrix to %s\n", matrix.n_rows,
                    matrix.n_cols, ex_out.c_str());
    });

    // --- train-head ---
    auto* head = app.add_subcommand(
        "train-head", "Gradient-descent linear classifier on feature CSV");
    std::string head_features;
    std::string head_out = "model.txt";
    linear::Hyperparams hyper;
    head->add_option("--features", head_features, "training feature CSV")
        ->required();
    head->add_option("--lr", hyper.learning_rate, "learning rate");
    head->add_option("--epochs", hyper.epochs, "epochs");
    head->add_option("--batch", hyper.batch_size, "batch size (0 = full batch)");
    head->add_option("--seed", hyper.seed, "shuffle seed");
    head->add_option("--out", head_out, "model output path");
    head->callback([&] {
        const auto data = io::read_feature_csv(head_features);
        linear::TrainReport report;
        const auto model = linear::train(data.matrix, data.labels, hyper, &report);
        io::save_model(head_out, model);
        std::printf("trained on %zu samples: loss=%.6f train_acc=%.4f -> %s\n",
                    data.matrix.n_rows, report.final_loss,
                    report.train_accuracy, head_out.c_str());
    });

    // --- evaluate ---
    auto* eval = app.add_subcommand("evaluate",
                                    "Accuracy + confusion matrix of a model");
    std::string eval_model;
    std::vector<std::string> eval_features;
    std::string eval_confusion;
    std::string eval_report;
    eval->add_option("--model", eval_model, "model file")->required();
    eval->add_option("--features", eval_features,
                     "feature CSV (repeat to report several, e.g. the "
                     "theta=1/4 and theta=1/2 matrices)")
        ->required();
    eval->add_option("--confusion", eval_confusion,
                     "confusion CSV output (first feature file)");
    eval->add_option("--report", eval_report, "text report output");
    eval->callback([&] {
        const auto model = io::load_model(eval_model);
        std::ofstream report;
        if (!eval_report.empty()) {
            report.open(eval_report);
        }
        bool first = true;
        for (const auto& path : eval_features) {
            const auto data = io::read_feature_csv(path);
            const auto ev = linear::evaluate(model, data.matrix, data.labels);
            std::printf("%s: accuracy %.4f on %zu samples\n", path.c_str(),
                        ev.accuracy, data.matrix.n_rows);
            if (report.is_open()) {
                report << "features = " << path << "\n"
                       << "samples = " << data.matrix.n_rows << "\n"
                       << "accuracy = " << io::format_double(ev.accuracy)
                       << "\n";
            }
            if (first && !eval_confusion.empty()) {
                io::write_confusion_csv(eval_confusion, ev);
            }
            first = false;
        }
    });

    // --- trace ---
    auto* trace = app.add_subcommand(
        "trace", "Per-step and time-integrated activity for chosen images");
    std::string tr_rule;
    std::string tr_images;
    std::string tr_indices = "0";
    int tr_first = 0;
    int tr_tmax = 0;
    std::string tr_out = "traces.csv";
    trace->add_option("--rule", tr_rule, "rule file")->required();
    trace->add_option("--images", tr_images, "IDX image file")->required();
    trace->add_option("--indices", tr_indices, "image indices, e.g. 0,5,9-20");
    trace->add_option("--first", tr_first, "use the first N images instead");
    trace->add_option("--t-max", tr_tmax,
                      "trajectory length (default: the rule's depth)");
    trace->add_option("--out", tr_out, "output CSV");
    trace->callback([&] {
        const auto automaton = io::load_rule_file(tr_rule);
        const auto raw = mnist::parse_idx_images(tr_images);
        std::vector<std::uint32_t> ids;
        if (tr_first > 0) {
            for (int i = 0; i < tr_first; ++i) {
                ids.push_back(static_cast<std::uint32_t>(i));
            }
        } else {
            for (const int i : parse_int_list(tr_indices)) {
                ids.push_back(static_cast<std::uint32_t>(i));
            }
        }
        std::vector<Lattice> lattices;
        lattices.reserve(ids.size());
        for (const auto i : ids) {
            if (i >= raw.count) {
                throw io::ConfigError("image index out of range: " +
                                      std::to_string(i));
            }
            mnist::GrayscaleImage img;
            img.pixels.assign(raw.image(i), raw.image(i) + raw.rows * raw.cols);
            lattices.push_back(
                mnist::binarize(img, static_cast<int>(raw.rows)));
        }
        const int t_max = tr_tmax > 0 ? tr_tmax : automaton.depth;
        const auto series = diag::activity_traces(lattices, automaton, t_max);
        io::write_traces_csv(tr_out, ids, series);
        std::printf("wrote %zu trajectories (T=%d) to %s\n", series.size(),
                    t_max, tr_out.c_str());
    });

    // --- histogram ---
    auto* hist = app.add_subcommand(
        "histogram", "Per-class activity histogram over a dataset");
    std::string hg_rule;
    std::string hg_images;
    std::string hg_labels;
    int hg_tmax = 0;
    double hg_bin_width = 1.0 / 50.0;
    std::string hg_out = "histogram.csv";
    std::string hg_bimodality;
    double hg_lo = 0.25;
    double hg_hi = 0.75;
    hist->add_option("--rule", hg_rule, "rule file")->required();
    hist->add_option("--images", hg_images, "IDX image file")->required();
    hist->add_option("--labels", hg_labels, "IDX label file")->required();
    hist->add_option("--t-max", hg_tmax,
                     "trajectory length override (e.g. 3000 for the "
                     "long-trajectory diagnostic)");
    hist->add_option("--bin-width", hg_bin_width, "histogram bin width");
    hist->add_option("--out", hg_out, "output CSV");
    hist->add_option("--bimodality", hg_bimodality,
                     "also write a low/middle/high mass summary here");
    hist->add_option("--lo", hg_lo, "bimodality low threshold");
    hist->add_option("--hi", hg_hi, "bimodality high threshold");
    hist->callback([&] {
        const auto automaton = io::load_rule_file(hg_rule);
        const auto dataset =
            load_dataset_checked(hg_images, hg_labels, mnist::Split::test);
        const int depth = hg_tmax > 0 ? hg_tmax : automaton.depth;
        const StepTable table(automaton.rule);
        std::vector<PackedGrid> grids;
        grids.reserve(dataset.size());
        std::vector<std::uint8_t> labels;
        labels.reserve(dataset.size());
        for (const auto& img : dataset.images) {
            grids.push_back(pack(mnist::binarize(img, dataset.side)));
            labels.push_back(img.label);
        }
        std::vector<double> activities(grids.size());
        search::evaluate_activities(grids, table, depth, activities);
        io::write_histogram_csv(
            hg_out, diag::activity_histogram(activities, labels, hg_bin_width));
        if (!hg_bimodality.empty()) {
            const auto s = diag::bimodality_summary(activities, hg_lo, hg_hi);
            std::ofstream out(hg_bimodality);
            out << "below,middle,above\n"
                << io::format_double(s.below) << ','
                << io::format_double(s.middle) << ','
                << io::format_double(s.above) << "\n";
        }
        std::printf("wrote histogram (T=%d, %zu images) to %s\n", depth,
                    grids.size(), hg_out.c_str());
    });

    // --- snapshots ---
    auto* snap = app.add_subcommand(
        "snapshots", "Lattice + changed-cell snapshots at chosen steps");
    std::string sn_rule;
    std::string sn_images;
    int sn_index = 0;
    std::string sn_times = "0";
    std::string sn_prefix = "snapshot";
    snap->add_option("--rule", sn_rule, "rule file")->required();
    snap->add_option("--images", sn_images, "IDX image file")->required();
    snap->add_option("--index", sn_index, "image index");
    snap->add_option("--times", sn_times, "steps, e.g. 0,1,2,10-12");
    snap->add_option("--out-prefix", sn_prefix, "output path prefix");
    snap->callback([&] {
        const auto automaton = io::load_rule_file(sn_rule);
        const auto raw = mnist::parse_idx_images(sn_images);
        if (sn_index < 0 || static_cast<std::uint32_t>(sn_index) >= raw.count) {
            throw io::ConfigError("image index out of range");
        }
        mnist::GrayscaleImage img;
        img.pixels.assign(raw.image(sn_index),
                          raw.image(sn_index) + raw.rows * raw.cols);
        const auto lattice = mnist::binarize(img, static_cast<int>(raw.rows));
        const auto times = parse_int_list(sn_times);
        const auto frames = diag::snapshot_grid(lattice, automaton, times);
        std::ofstream txt(sn_prefix + ".txt");
        for (const auto& frame : frames) {
            const std::string base =
                sn_prefix + "_t" + std::to_string(frame.time);
            io::write_pbm(base + ".pbm", frame.lattice);
            io::write_pbm(base + "_mask.pbm", frame.changed_mask,
                          frame.lattice.side);
            txt << "t = " << frame.time << "\n"
                << io::render_text_grid(frame.lattice, frame.changed_mask)
                << "\n";
        }
        std::printf("wrote %zu snapshots under %s_t*.pbm\n", frames.size(),
                    sn_prefix.c_str());
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const io::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const mnist::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitData;
    } catch (const io::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cac/diagnostics.hpp"
#include "cac/features.hpp"
#include "cac/linear.hpp"
#include "cac/search.hpp"

namespace cac::io {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad or incomplete configuration (exit code 1 at the CLI, vs 2 for data).
class ConfigError : public IoError {
  public:
    using IoError::IoError;
};

std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t v);

// Full round-trip precision for doubles ("%.17g").
std::string format_double(double v);

// --- rule files -------------------------------------------------------------
// Versioned text file: a 512-character '0'/'1' string (entry index 0 first),
// depth, trained class, seed, and config digest. save(load(f)) is
// byte-identical for canonical files.
void save_rule_file(const std::filesystem::path& path,
                    const features::TrainedAutomaton& automaton);
features::TrainedAutomaton load_rule_file(const std::filesystem::path& path);

std::string rule_to_string(const RuleTable& rule);
RuleTable rule_from_string(std::string_view text);

// --- linear model files -----------------------------------------------------
void save_model(const std::filesystem::path& path, const linear::LinearModel& m);
linear::LinearModel load_model(const std::filesystem::path& path);

// --- key = value config files ----------------------------------------------
std::map<std::string, std::string> parse_key_values(
    const std::filesystem::path& path);

struct RunConfig {
    search::SearchConfig search;
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;
    std::filesystem::path out_dir = ".";
    std::uint64_t log_every = 1000;
};

// Throws IoError on unknown keys, bad values, or unresolvable data paths for
// the configured split.
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical text rendering of the search parameters; hashed into rule files
// so an automaton is traceable to the run that produced it.
std::string canonical_search_text(const search::SearchConfig& config);
inline std::string config_digest(const search::SearchConfig& config) {
    return hex64(fnv1a(canonical_search_text(config)));
}

// --- CSV --------------------------------------------------------------------
void write_trace_csv(const std::filesystem::path& path,
                     const search::SearchTrace& trace);

void write_histogram_csv(const std::filesystem::path& path,
                         const diag::ActivityHistogram& hist);

void write_traces_csv(const std::filesystem::path& path,
                      std::span<const std::uint32_t> trajectory_ids,
                      std::span<const diag::TraceSeries> series);

void write_confusion_csv(const std::filesystem::path& path,
                         const linear::Evaluation& evaluation);

// Feature CSV: image_index,label,then one column per ensemble member named
// a<k>_c<trained class>.
void write_feature_csv(const std::filesystem::path& path,
                       const features::FeatureMatrix& matrix,
                       std::span<const std::uint8_t> labels);

struct FeatureCsv {
    features::FeatureMatrix matrix;
    std::vector<std::uint8_t> labels;
};
FeatureCsv read_feature_csv(const std::filesystem::path& path);

// Compact bitmap: one header line "cac-feature-bitmap v1 <rows> <cols> <theta>"
// then row-major bits, MSB first, each row padded to a byte boundary.
void write_feature_bitmap(const std::filesystem::path& path,
                          const features::FeatureMatrix& matrix);
features::FeatureMatrix read_feature_bitmap(const std::filesystem::path& path);

// --- portable bitmaps and text grids ----------------------------------------
void write_pbm(const std::filesystem::path& path, const Lattice& lattice);
void write_pbm(const std::filesystem::path& path,
               std::span<const std::uint8_t> mask, int side);

// '.'=0, '#'=1; changed cells render as 'o' (now 0) / '@' (now 1)
std::string render_text_grid(const Lattice& lattice,
                             std::span<const std::uint8_t> changed_mask = {});

}  // namespace cac::io

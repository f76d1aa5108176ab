#include "cac/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cac::io {

namespace {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    return lines;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

// "key = value" on one line; used by rule and model files
std::pair<std::string, std::string> parse_kv_line(const std::string& line,
                                                  const std::string& file) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
        throw IoError(file + ": expected 'key = value', got '" + line + "'");
    }
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

std::uint64_t parse_u64(const std::string& value, const std::string& what) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw IoError("bad integer for " + what + ": '" + value + "'");
    }
}

int parse_int(const std::string& value, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw IoError("bad integer for " + what + ": '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw IoError("bad number for " + what + ": '" + value + "'");
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string rule_to_string(const RuleTable& rule) {
    std::string s(512, '0');
    for (int i = 0; i < 512; ++i) {
        s[i] = rule[i] ? '1' : '0';
    }
    return s;
}

RuleTable rule_from_string(std::string_view text) {
    if (text.size() != 512) {
        throw IoError("rule string must have exactly 512 characters, got " +
                      std::to_string(text.size()));
    }
    RuleTable rule;
    for (int i = 0; i < 512; ++i) {
        if (text[i] != '0' && text[i] != '1') {
            throw IoError("rule string has a non-binary character at position " +
                          std::to_string(i));
        }
        rule[i] = text[i] == '1' ? 1 : 0;
    }
    return rule;
}

void save_rule_file(const std::filesystem::path& path,
                    const features::TrainedAutomaton& automaton) {
    auto out = open_out(path);
    out << "cac-rule v1\n";
    out << "rule = " << rule_to_string(automaton.rule) << "\n";
    out << "depth = " << automaton.depth << "\n";
    out << "class = " << automaton.trained_class << "\n";
    out << "seed = " << automaton.seed << "\n";
    out << "config_digest = " << automaton.config_digest << "\n";
}

features::TrainedAutomaton load_rule_file(const std::filesystem::path& path) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty() || lines[0] != "cac-rule v1") {
        throw IoError(path.string() + ": not a cac-rule v1 file");
    }
    features::TrainedAutomaton automaton;
    bool have_rule = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) {
            continue;
        }
        const auto [key, value] = parse_kv_line(lines[i], path.string());
        if (key == "rule") {
            automaton.rule = rule_from_string(value);
            have_rule = true;
        } else if (key == "depth") {
            automaton.depth = parse_int(value, "depth");
        } else if (key == "class") {
            automaton.trained_class = parse_int(value, "class");
        } else if (key == "seed") {
            automaton.seed = parse_u64(value, "seed");
        } else if (key == "config_digest") {
            automaton.config_digest = value;
        } else {
            throw IoError(path.string() + ": unknown key '" + key + "'");
        }
    }
    if (!have_rule) {
        throw IoError(path.string() + ": missing rule entry");
    }
    if (automaton.depth < 1) {
        throw IoError(path.string() + ": depth must be >= 1");
    }
    if (automaton.trained_class < 0 || automaton.trained_class > 9) {
        throw IoError(path.string() + ": class must be in [0,9]");
    }
    return automaton;
}

void save_model(const std::filesystem::path& path,
                const linear::LinearModel& model) {
    auto out = open_out(path);
    out << "cac-linear-model v1\n";
    out << "classes = " << model.weights.rows() << "\n";
    out << "features = " << model.feature_count() << "\n";
    out << "learning_rate = " << format_double(model.hyper.learning_rate) << "\n";
    out << "epochs = " << model.hyper.epochs << "\n";
    out << "batch_size = " << model.hyper.batch_size << "\n";
    out << "seed = " << model.hyper.seed << "\n";
    out << "weights:\n";
    for (Eigen::Index r = 0; r < model.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.weights.cols(); ++c) {
            out << (c == 0 ? "" : " ") << format_double(model.weights(r, c));
        }
        out << "\n";
    }
}

linear::LinearModel load_model(const std::filesystem::path& path) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty() || lines[0] != "cac-linear-model v1") {
        throw IoError(path.string() + ": not a cac-linear-model v1 file");
    }
    linear::LinearModel model;
    int classes = 0;
    int feature_count = 0;
    std::size_t i = 1;
    for (; i < lines.size() && lines[i] != "weights:"; ++i) {
        if (trim(lines[i]).empty()) {
            continue;
        }
        const auto [key, value] = parse_kv_line(lines[i], path.string());
        if (key == "classes") {
            classes = parse_int(value, "classes");
        } else if (key == "features") {
            feature_count = parse_int(value, "features");
        } else if (key == "learning_rate") {
            model.hyper.learning_rate = parse_double(value, "learning_rate");
        } else if (key == "epochs") {
            model.hyper.epochs = parse_int(value, "epochs");
        } else if (key == "batch_size") {
            model.hyper.batch_size = parse_int(value, "batch_size");
        } else if (key == "seed") {
            model.hyper.seed = parse_u64(value, "seed");
        } else {
            throw IoError(path.string() + ": unknown key '" + key + "'");
        }
    }
    if (i >= lines.size()) {
        throw IoError(path.string() + ": missing weights section");
    }
    if (classes != 10) {
        throw IoError(path.string() + ": expected 10 classes");
    }
    if (feature_count < 1) {
        throw IoError(path.string() + ": bad feature count");
    }
    model.weights.resize(classes, feature_count + 1);
    ++i;  // skip "weights:"
    for (int r = 0; r < classes; ++r, ++i) {
        if (i >= lines.size()) {
            throw IoError(path.string() + ": truncated weights section");
        }
        std::istringstream row(lines[i]);
        for (int c = 0; c < feature_count + 1; ++c) {
            std::string token;
            if (!(row >> token)) {
                throw IoError(path.string() + ": short weight row " +
                              std::to_string(r));
            }
            model.weights(r, c) = parse_double(token, "weight");
        }
        std::string extra;
        if (row >> extra) {
            throw IoError(path.string() + ": long weight row " +
                          std::to_string(r));
        }
    }
    return model;
}

std::map<std::string, std::string> parse_key_values(
    const std::filesystem::path& path) {
    std::map<std::string, std::string> out;
    const auto lines = split_lines(read_text_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto [key, value] = parse_kv_line(line, path.string());
        if (out.count(key) != 0) {
            throw IoError(path.string() + ": duplicate key '" + key +
                          "' at line " + std::to_string(i + 1));
        }
        out[key] = value;
    }
    return out;
}

namespace {

RunConfig load_run_config_impl(const std::filesystem::path& path) {
    auto kv = parse_key_values(path);
    RunConfig config;
    const auto take = [&](const char* key) -> std::string {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            return "";
        }
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("target_class"); !v.empty()) {
        config.search.target_class = parse_int(v, "target_class");
    }
    if (auto v = take("mode"); !v.empty()) {
        if (v == "fixed") {
            config.search.mode = search::Mode::fixed_depth;
        } else if (v == "variable") {
            config.search.mode = search::Mode::variable_depth;
        } else {
            throw ConfigError("mode must be 'fixed' or 'variable', got '" + v + "'");
        }
    }
    if (auto v = take("fixed_depth"); !v.empty()) {
        config.search.fixed_depth = parse_int(v, "fixed_depth");
    }
    if (auto v = take("initial_depth"); !v.empty()) {
        config.search.initial_depth = parse_int(v, "initial_depth");
    }
    if (auto v = take("budget"); !v.empty()) {
        config.search.budget = parse_u64(v, "budget");
    }
    if (auto v = take("depth_cadence"); !v.empty()) {
        config.search.depth_cadence = parse_u64(v, "depth_cadence");
    }
    if (auto v = take("reset_cadence"); !v.empty()) {
        config.search.reset_cadence = parse_u64(v, "reset_cadence");
    }
    if (auto v = take("reset_trigger_depth"); !v.empty()) {
        config.search.reset_trigger_depth = parse_int(v, "reset_trigger_depth");
    }
    if (auto v = take("seed"); !v.empty()) {
        config.search.seed = parse_u64(v, "seed");
    }
    if (auto v = take("minibatch_size"); !v.empty()) {
        config.search.minibatch_size =
            static_cast<std::uint32_t>(parse_u64(v, "minibatch_size"));
    }
    if (auto v = take("minibatch_seed"); !v.empty()) {
        config.search.minibatch_seed = parse_u64(v, "minibatch_seed");
    }
    if (auto v = take("split"); !v.empty()) {
        if (v == "train") {
            config.search.split = mnist::Split::train;
        } else if (v == "test") {
            config.search.split = mnist::Split::test;
        } else {
            throw ConfigError("split must be 'train' or 'test', got '" + v + "'");
        }
    }
    if (auto v = take("train_images"); !v.empty()) {
        config.train_images = v;
    }
    if (auto v = take("train_labels"); !v.empty()) {
        config.train_labels = v;
    }
    if (auto v = take("test_images"); !v.empty()) {
        config.test_images = v;
    }
    if (auto v = take("test_labels"); !v.empty()) {
        config.test_labels = v;
    }
    if (auto v = take("out_dir"); !v.empty()) {
        config.out_dir = v;
    }
    if (auto v = take("log_every"); !v.empty()) {
        config.log_every = parse_u64(v, "log_every");
    }
    if (!kv.empty()) {
        throw ConfigError(path.string() + ": unknown config key '" +
                      kv.begin()->first + "'");
    }

    const bool train_split = config.search.split == mnist::Split::train;
    const auto& images = train_split ? config.train_images : config.test_images;
    const auto& labels = train_split ? config.train_labels : config.test_labels;
    if (images.empty() || labels.empty()) {
        throw ConfigError(path.string() +
                      ": image/label paths for the configured split are missing");
    }
    for (const auto& p : {images, labels}) {
        if (!std::filesystem::exists(p)) {
            throw ConfigError("configured data file does not exist: " + p.string());
        }
    }
    return config;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    try {
        return load_run_config_impl(path);
    } catch (const ConfigError&) {
        throw;
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

std::string canonical_search_text(const search::SearchConfig& c) {
    std::ostringstream out;
    out << "target_class=" << c.target_class
        << ";mode=" << (c.mode == search::Mode::fixed_depth ? "fixed" : "variable")
        << ";fixed_depth=" << c.fixed_depth
        << ";initial_depth=" << c.initial_depth << ";budget=" << c.budget
        << ";depth_cadence=" << c.depth_cadence
        << ";reset_cadence=" << c.reset_cadence
        << ";reset_trigger_depth=" << c.reset_trigger_depth << ";seed=" << c.seed
        << ";minibatch_size=" << c.minibatch_size
        << ";minibatch_seed=" << c.minibatch_seed
        << ";split=" << (c.split == mnist::Split::train ? "train" : "test");
    return out.str();
}

void write_trace_csv(const std::filesystem::path& path,
                     const search::SearchTrace& trace) {
    auto out = open_out(path);
    out << "n,kind,accepted,phi,T\n";
    for (const auto& e : trace) {
        out << e.n << ',' << search::to_string(e.kind) << ','
            << (e.accepted ? 1 : 0) << ',' << format_double(e.phi) << ','
            << e.depth << "\n";
    }
}

void write_histogram_csv(const std::filesystem::path& path,
                         const diag::ActivityHistogram& hist) {
    auto out = open_out(path);
    out << "class,bin_low,bin_high,count,mass\n";
    for (int cls = 0; cls < 10; ++cls) {
        if (hist.class_totals[cls] == 0) {
            continue;
        }
        for (int b = 0; b < hist.n_bins; ++b) {
            out << cls << ',' << format_double(b * hist.bin_width) << ','
                << format_double((b + 1) * hist.bin_width) << ','
                << hist.counts[cls][b] << ',' << format_double(hist.mass(cls, b))
                << "\n";
        }
    }
}

void write_traces_csv(const std::filesystem::path& path,
                      std::span<const std::uint32_t> trajectory_ids,
                      std::span<const diag::TraceSeries> series) {
    auto out = open_out(path);
    out << "trajectory_id,t,instantaneous_count,cumulative_a\n";
    for (std::size_t j = 0; j < series.size(); ++j) {
        for (std::size_t t = 0; t < series[j].instantaneous.size(); ++t) {
            out << trajectory_ids[j] << ',' << t + 1 << ','
                << series[j].instantaneous[t] << ','
                << format_double(series[j].cumulative_a[t]) << "\n";
        }
    }
}

void write_confusion_csv(const std::filesystem::path& path,
                         const linear::Evaluation& evaluation) {
    auto out = open_out(path);
    out << "true_class";
    for (int c = 0; c < 10; ++c) {
        out << ",pred_" << c;
    }
    out << "\n";
    for (int r = 0; r < 10; ++r) {
        out << r;
        for (int c = 0; c < 10; ++c) {
            out << ',' << evaluation.confusion[r][c];
        }
        out << "\n";
    }
}

void write_feature_csv(const std::filesystem::path& path,
                       const features::FeatureMatrix& matrix,
                       std::span<const std::uint8_t> labels) {
    if (labels.size() != matrix.n_rows) {
        throw IoError("write_feature_csv: label count mismatch");
    }
    auto out = open_out(path);
    out << "image_index,label";
    for (std::size_t k = 0; k < matrix.n_cols; ++k) {
        out << ",a" << k << "_c" << matrix.column_class[k];
    }
    out << "\n";
    for (std::size_t j = 0; j < matrix.n_rows; ++j) {
        out << j << ',' << int(labels[j]);
        for (std::size_t k = 0; k < matrix.n_cols; ++k) {
            out << ',' << int(matrix.at(j, k));
        }
        out << "\n";
    }
}

FeatureCsv read_feature_csv(const std::filesystem::path& path) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty()) {
        throw IoError(path.string() + ": empty feature file");
    }
    FeatureCsv out;
    // header: image_index,label,a<k>_c<class>...
    {
        std::istringstream header(lines[0]);
        std::string col;
        int idx = 0;
        while (std::getline(header, col, ',')) {
            if (idx >= 2) {
                const auto cpos = col.rfind("_c");
                if (col.empty() || col[0] != 'a' || cpos == std::string::npos) {
                    throw IoError(path.string() + ": bad feature column '" +
                                  col + "'");
                }
                out.matrix.column_class.push_back(
                    parse_int(col.substr(cpos + 2), "column class"));
            }
            ++idx;
        }
        if (idx < 3) {
            throw IoError(path.string() + ": no feature columns");
        }
    }
    out.matrix.n_cols = out.matrix.column_class.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) {
            continue;
        }
        std::istringstream row(lines[i]);
        std::string cell;
        std::getline(row, cell, ',');  // image index, unused
        if (!std::getline(row, cell, ',')) {
            throw IoError(path.string() + ": short row " + std::to_string(i));
        }
        out.labels.push_back(
            static_cast<std::uint8_t>(parse_int(cell, "label")));
        for (std::size_t k = 0; k < out.matrix.n_cols; ++k) {
            if (!std::getline(row, cell, ',')) {
                throw IoError(path.string() + ": short row " +
                              std::to_string(i));
            }
            const int bit = parse_int(cell, "feature bit");
            if (bit != 0 && bit != 1) {
                throw IoError(path.string() + ": non-binary feature at row " +
                              std::to_string(i));
            }
            out.matrix.bits.push_back(static_cast<std::uint8_t>(bit));
        }
        ++out.matrix.n_rows;
    }
    return out;
}

void write_feature_bitmap(const std::filesystem::path& path,
                          const features::FeatureMatrix& matrix) {
    auto out = open_out(path);
    out << "cac-feature-bitmap v1 " << matrix.n_rows << ' ' << matrix.n_cols
        << ' ' << format_double(matrix.theta) << "\n";
    const std::size_t row_bytes = (matrix.n_cols + 7) / 8;
    std::vector<std::uint8_t> row(row_bytes);
    for (std::size_t j = 0; j < matrix.n_rows; ++j) {
        std::fill(row.begin(), row.end(), 0);
        for (std::size_t k = 0; k < matrix.n_cols; ++k) {
            if (matrix.at(j, k)) {
                row[k / 8] |= static_cast<std::uint8_t>(0x80u >> (k % 8));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row_bytes));
    }
}

features::FeatureMatrix read_feature_bitmap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string header;
    std::getline(in, header);
    std::istringstream h(header);
    std::string tag;
    std::string version;
    features::FeatureMatrix matrix;
    h >> tag >> version >> matrix.n_rows >> matrix.n_cols >> matrix.theta;
    if (tag != "cac-feature-bitmap" || version != "v1" || !h) {
        throw IoError(path.string() + ": not a cac-feature-bitmap v1 file");
    }
    matrix.column_class.assign(matrix.n_cols, -1);  // classes live in the CSV
    matrix.bits.assign(matrix.n_rows * matrix.n_cols, 0);
    const std::size_t row_bytes = (matrix.n_cols + 7) / 8;
    std::vector<std::uint8_t> row(row_bytes);
    for (std::size_t j = 0; j < matrix.n_rows; ++j) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row_bytes));
        if (static_cast<std::size_t>(in.gcount()) != row_bytes) {
            throw IoError(path.string() + ": truncated bitmap at row " +
                          std::to_string(j));
        }
        for (std::size_t k = 0; k < matrix.n_cols; ++k) {
            matrix.bits[j * matrix.n_cols + k] =
                (row[k / 8] >> (7 - k % 8)) & 1u;
        }
    }
    return matrix;
}

void write_pbm(const std::filesystem::path& path, const Lattice& lattice) {
    write_pbm(path, lattice.cells, lattice.side);
}

void write_pbm(const std::filesystem::path& path,
               std::span<const std::uint8_t> mask, int side) {
    auto out = open_out(path);
    out << "P1\n" << side << ' ' << side << "\n";
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            out << (c == 0 ? "" : " ")
                << int(mask[static_cast<std::size_t>(r) * side + c]);
        }
        out << "\n";
    }
}

std::string render_text_grid(const Lattice& lattice,
                             std::span<const std::uint8_t> changed_mask) {
    std::string out;
    out.reserve(static_cast<std::size_t>(lattice.side + 1) * lattice.side);
    for (int r = 0; r < lattice.side; ++r) {
        for (int c = 0; c < lattice.side; ++c) {
            const bool on = lattice.at(r, c) != 0;
            const bool changed =
                !changed_mask.empty() && changed_mask[lattice.index(r, c)] != 0;
            out += changed ? (on ? '@' : 'o') : (on ? '#' : '.');
        }
        out += '\n';
    }
    return out;
}

}  // namespace cac::io

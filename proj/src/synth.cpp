#include "cac/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cac/rng.hpp"

namespace cac::synth {

namespace {

constexpr int kSide = 28;

struct Point {
    double x;
    double y;
};

using Stroke = std::vector<Point>;  // polyline

// Skeletons live in the 28x28 frame, y growing downward.
std::vector<Stroke> digit_skeleton(int digit) {
    auto ellipse = [](double cx, double cy, double rx, double ry, int n = 14) {
        Stroke s;
        for (int i = 0; i <= n; ++i) {
            const double a = 2.0 * M_PI * i / n;
            s.push_back({cx + rx * std::sin(a), cy - ry * std::cos(a)});
        }
        return s;
    };
    switch (digit) {
        case 0:
            return {ellipse(14, 14, 4.8, 7.6)};
        case 1:
            return {{{11.5, 8.5}, {15, 5}, {15, 23}}};
        case 2:
            return {{{9.5, 10},
                     {10.5, 7},
                     {14, 5.5},
                     {17.5, 7.5},
                     {18, 10.5},
                     {15.5, 14},
                     {12, 17},
                     {9.5, 20},
                     {9, 22},
                     {19, 22}}};
        case 3:
            return {{{9.5, 7.5},
                     {13, 5.5},
                     {16.5, 7},
                     {17.5, 10},
                     {15, 13},
                     {12.5, 13.5},
                     {16, 14.5},
                     {18, 17.5},
                     {16.5, 21},
                     {12.5, 22.5},
                     {9, 20.5}}};
        case 4:
            return {{{16.5, 5}, {9, 16.5}, {19.5, 16.5}}, {{16, 9.5}, {16, 23}}};
        case 5:
            return {{{18, 6},
                     {10.5, 6},
                     {9.5, 13},
                     {13, 11.5},
                     {16.5, 12.5},
                     {18.5, 16},
                     {17.5, 20},
                     {13, 22.5},
                     {9, 20.5}}};
        case 6:
            return {{{16.5, 5.5},
                     {12, 9},
                     {9.5, 14},
                     {9.5, 18.5},
                     {12, 22},
                     {15.5, 22},
                     {18, 19},
                     {17.5, 15.5},
                     {14.5, 13.5},
                     {11, 14.5},
                     {9.5, 17.5}}};
        case 7:
            return {{{9, 6}, {19, 6}, {13, 23}}};
        case 8:
            return {ellipse(14, 9.5, 3.9, 4.1, 12),
                    ellipse(14, 17.8, 4.7, 4.9, 12)};
        case 9:
            return {ellipse(13.8, 10, 4.3, 4.5, 12),
                    {{18.1, 10.5}, {17.4, 16.5}, {15.3, 22.5}}};
        default:
            throw std::invalid_argument("digit_skeleton: digit out of range");
    }
}

double dist_to_segment(double px, double py, const Point& a, const Point& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = a.x + t * dx - px;
    const double qy = a.y + t * dy - py;
    return std::sqrt(qx * qx + qy * qy);
}

double uniform_real(rng::Engine& g, double lo, double hi) {
    const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;  // [0, 1)
    return lo + u * (hi - lo);
}

}  // namespace

std::vector<std::uint8_t> render_digit(int digit, std::uint64_t seed) {
    rng::Engine g(seed);
    auto strokes = digit_skeleton(digit);

    const double slant = uniform_real(g, -0.18, 0.18);
    const double scale = uniform_real(g, 0.85, 1.08);
    const double tx = uniform_real(g, -2.2, 2.2);
    const double ty = uniform_real(g, -1.6, 1.6);
    const double width = uniform_real(g, 1.0, 1.75);
    const double peak = uniform_real(g, 190.0, 255.0);

    for (auto& stroke : strokes) {
        for (auto& p : stroke) {
            p.x += uniform_real(g, -0.8, 0.8);
            p.y += uniform_real(g, -0.8, 0.8);
            p.x = 14.0 + scale * (p.x - 14.0) + slant * (p.y - 14.0) + tx;
            p.y = 14.0 + scale * (p.y - 14.0) + ty;
        }
    }

    std::vector<std::uint8_t> pixels(kSide * kSide, 0);
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            double d = 1e9;
            for (const auto& stroke : strokes) {
                for (std::size_t i = 0; i + 1 < stroke.size(); ++i) {
                    d = std::min(d, dist_to_segment(c + 0.5, r + 0.5, stroke[i],
                                                    stroke[i + 1]));
                }
            }
            double v = 0.0;
            if (d <= width - 0.6) {
                v = peak;
            } else if (d < width + 0.8) {
                v = peak * (width + 0.8 - d) / 1.4;
            }
            pixels[r * kSide + c] = static_cast<std::uint8_t>(
                std::clamp(v, 0.0, 255.0));
        }
    }

    // grayscale junk: keeps the background busy below the binarization
    // threshold and roughens stroke edges
    for (auto& p : pixels) {
        const double noisy = p + uniform_real(g, -18.0, 18.0);
        p = static_cast<std::uint8_t>(std::clamp(noisy, 0.0, 255.0));
    }
    for (auto& p : pixels) {
        if (rng::uniform_below(g, 1000) < 2) {
            p = static_cast<std::uint8_t>(rng::uniform_below(g, 256));
        }
    }
    return pixels;
}

Corpus make_corpus(std::uint32_t count, std::uint64_t seed) {
    Corpus corpus;
    corpus.images.count = count;
    corpus.images.rows = kSide;
    corpus.images.cols = kSide;
    corpus.images.pixels.resize(std::size_t{count} * kSide * kSide);
    corpus.labels.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint64_t s = rng::derive_seed(seed, i);
        rng::Engine g(s);
        const int digit = static_cast<int>(rng::uniform_below(g, 10));
        corpus.labels[i] = static_cast<std::uint8_t>(digit);
        const auto img = render_digit(digit, rng::derive_seed(s, "glyph"));
        std::copy(img.begin(), img.end(),
                  corpus.images.pixels.begin() + std::size_t{i} * kSide * kSide);
    }
    return corpus;
}

void write_mnist_shaped_corpus(const std::filesystem::path& dir,
                               std::uint32_t train_count,
                               std::uint32_t test_count, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const auto write = [&](const Corpus& corpus, const char* images_name,
                           const char* labels_name) {
        std::ofstream img(dir / images_name, std::ios::binary);
        std::ofstream lab(dir / labels_name, std::ios::binary);
        if (!img || !lab) {
            throw std::runtime_error("cannot write corpus files in " +
                                     dir.string());
        }
        mnist::write_idx_images(img, corpus.images);
        mnist::write_idx_labels(lab, corpus.labels);
    };
    write(make_corpus(train_count, rng::derive_seed(seed, "train")),
          "train-images-idx3-ubyte", "train-labels-idx1-ubyte");
    write(make_corpus(test_count, rng::derive_seed(seed, "test")),
          "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte");
}

}  // namespace cac::synth

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cac/mnist.hpp"

namespace cac::synth {

// Deterministic handwritten-digit-like corpus in the exact MNIST container
// layout (28x28 grayscale, labels 0..9). Digits are rendered from jittered
// stroke skeletons, so class structure is real but every sample differs in
// shape, slant, thickness, position, and noise. Used wherever genuine MNIST
// files are not available.

struct Corpus {
    mnist::RawImages images;
    std::vector<std::uint8_t> labels;
};

// One 28x28 grayscale rendering of `digit` (0..9), jittered by `seed`.
std::vector<std::uint8_t> render_digit(int digit, std::uint64_t seed);

Corpus make_corpus(std::uint32_t count, std::uint64_t seed);

// Writes train/test IDX files with the standard MNIST file names into `dir`.
// Train and test draws come from disjoint seed streams.
void write_mnist_shaped_corpus(const std::filesystem::path& dir,
                               std::uint32_t train_count,
                               std::uint32_t test_count, std::uint64_t seed);

}  // namespace cac::synth

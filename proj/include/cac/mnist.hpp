#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cac/lattice.hpp"

namespace cac::mnist {

// Raised for malformed IDX input; the message names the byte offset.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kImageMagic = 0x00000803;  // unsigned byte, rank 3
inline constexpr std::uint32_t kLabelMagic = 0x00000801;  // unsigned byte, rank 1

struct RawImages {
    std::uint32_t count = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols, image-major

    const std::uint8_t* image(std::size_t i) const {
        return pixels.data() + i * rows * cols;
    }
};

// Parses a big-endian IDX image stream (magic 0x00000803).
RawImages parse_idx_images(std::istream& in);
RawImages parse_idx_images(const std::filesystem::path& path);

// Parses a big-endian IDX label stream (magic 0x00000801).
std::vector<std::uint8_t> parse_idx_labels(std::istream& in);
std::vector<std::uint8_t> parse_idx_labels(const std::filesystem::path& path);

// Writers for the same format; parsing then re-serializing is byte-identical.
void write_idx_images(std::ostream& out, const RawImages& images);
void write_idx_labels(std::ostream& out, const std::vector<std::uint8_t>& labels);

struct GrayscaleImage {
    std::vector<std::uint8_t> pixels;  // rows * cols intensities in [0, 255]
    std::uint8_t label = 0;
};

enum class Split { train, test };

struct Dataset {
    std::vector<GrayscaleImage> images;
    int side = 28;
    Split split = Split::train;

    std::size_t size() const { return images.size(); }
};

// Assembles images + labels into a Dataset; validates matching counts,
// square dimensions, and labels in [0,9].
Dataset assemble_dataset(const RawImages& images,
                         const std::vector<std::uint8_t>& labels, Split split);

Dataset load_dataset(const std::filesystem::path& image_path,
                     const std::filesystem::path& label_path, Split split);

// Cell = 1 iff 4*pixel > max_intensity (strict; integer pixels with
// max 255 never land on the 1/4 boundary).
Lattice binarize(const GrayscaleImage& image, int side,
                 int max_intensity = 255);
inline Lattice binarize(const GrayscaleImage& image) {
    return binarize(image, 28, 255);
}

// M distinct indices drawn uniformly without replacement, reproducible from
// the seed. Throws std::invalid_argument when M is out of range.
std::vector<std::uint32_t> sample_minibatch(const Dataset& dataset,
                                            std::uint32_t batch_size,
                                            std::uint64_t seed);

}  // namespace cac::mnist

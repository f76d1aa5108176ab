#include "cac/mnist.hpp"

#include <fstream>
#include <sstream>

#include "cac/rng.hpp"

namespace cac::mnist {

namespace {

std::uint32_t read_be32(std::istream& in, std::size_t offset, const char* what) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (in.gcount() != 4) {
        std::ostringstream msg;
        msg << "truncated IDX stream at byte " << offset + in.gcount()
            << " while reading " << what;
        throw ParseError(msg.str());
    }
    return (std::uint32_t{buf[0]} << 24) | (std::uint32_t{buf[1]} << 16) |
           (std::uint32_t{buf[2]} << 8) | std::uint32_t{buf[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {
        static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

void read_payload(std::istream& in, std::vector<std::uint8_t>& dst,
                  std::size_t expected, std::size_t header_bytes) {
    dst.resize(expected);
    in.read(reinterpret_cast<char*>(dst.data()),
            static_cast<std::streamsize>(expected));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != expected) {
        std::ostringstream msg;
        msg << "truncated IDX payload at byte " << header_bytes + got
            << ": expected " << expected << " data bytes, got " << got;
        throw ParseError(msg.str());
    }
    // a declared size smaller than the stream means the dimensions lie
    if (in.peek() != std::char_traits<char>::eof()) {
        std::ostringstream msg;
        msg << "IDX stream has trailing bytes after byte "
            << header_bytes + expected << "; dimensions do not match payload";
        throw ParseError(msg.str());
    }
}

}  // namespace

RawImages parse_idx_images(std::istream& in) {
    const std::uint32_t magic = read_be32(in, 0, "magic");
    if (magic != kImageMagic) {
        std::ostringstream msg;
        msg << "wrong magic for image file at byte 0: got 0x" << std::hex << magic
            << ", want 0x" << kImageMagic;
        throw ParseError(msg.str());
    }
    RawImages out;
    out.count = read_be32(in, 4, "image count");
    out.rows = read_be32(in, 8, "row count");
    out.cols = read_be32(in, 12, "column count");
    const std::size_t expected =
        std::size_t{out.count} * out.rows * out.cols;
    read_payload(in, out.pixels, expected, 16);
    return out;
}

RawImages parse_idx_images(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open image file: " + path.string());
    }
    return parse_idx_images(in);
}

std::vector<std::uint8_t> parse_idx_labels(std::istream& in) {
    const std::uint32_t magic = read_be32(in, 0, "magic");
    if (magic != kLabelMagic) {
        std::ostringstream msg;
        msg << "wrong magic for label file at byte 0: got 0x" << std::hex << magic
            << ", want 0x" << kLabelMagic;
        throw ParseError(msg.str());
    }
    const std::uint32_t count = read_be32(in, 4, "label count");
    std::vector<std::uint8_t> labels;
    read_payload(in, labels, count, 8);
    return labels;
}

std::vector<std::uint8_t> parse_idx_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open label file: " + path.string());
    }
    return parse_idx_labels(in);
}

void write_idx_images(std::ostream& out, const RawImages& images) {
    write_be32(out, kImageMagic);
    write_be32(out, images.count);
    write_be32(out, images.rows);
    write_be32(out, images.cols);
    out.write(reinterpret_cast<const char*>(images.pixels.data()),
              static_cast<std::streamsize>(images.pixels.size()));
}

void write_idx_labels(std::ostream& out, const std::vector<std::uint8_t>& labels) {
    write_be32(out, kLabelMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

Dataset assemble_dataset(const RawImages& images,
                         const std::vector<std::uint8_t>& labels, Split split) {
    if (images.count != labels.size()) {
        std::ostringstream msg;
        msg << "image/label count mismatch: " << images.count << " images vs "
            << labels.size() << " labels";
        throw ParseError(msg.str());
    }
    if (images.rows != images.cols) {
        std::ostringstream msg;
        msg << "non-square images: " << images.rows << "x" << images.cols;
        throw ParseError(msg.str());
    }
    Dataset ds;
    ds.side = static_cast<int>(images.rows);
    ds.split = split;
    ds.images.resize(images.count);
    const std::size_t n_pixels = std::size_t{images.rows} * images.cols;
    for (std::uint32_t i = 0; i < images.count; ++i) {
        if (labels[i] > 9) {
            std::ostringstream msg;
            msg << "label out of range at item " << i << ": "
                << int(labels[i]);
            throw ParseError(msg.str());
        }
        auto& img = ds.images[i];
        img.label = labels[i];
        img.pixels.assign(images.image(i), images.image(i) + n_pixels);
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& image_path,
                     const std::filesystem::path& label_path, Split split) {
    return assemble_dataset(parse_idx_images(image_path),
                            parse_idx_labels(label_path), split);
}

Lattice binarize(const GrayscaleImage& image, int side, int max_intensity) {
    Lattice lat(side);
    for (int i = 0; i < side * side; ++i) {
        lat.cells[i] = 4 * int(image.pixels[i]) > max_intensity ? 1 : 0;
    }
    return lat;
}

std::vector<std::uint32_t> sample_minibatch(const Dataset& dataset,
                                            std::uint32_t batch_size,
                                            std::uint64_t seed) {
    if (batch_size < 1 || batch_size > dataset.size()) {
        throw std::invalid_argument("sample_minibatch: size out of range");
    }
    rng::Engine g(seed);
    return rng::sample_without_replacement(
        g, static_cast<std::uint32_t>(dataset.size()), batch_size);
}

}  // namespace cac::mnist

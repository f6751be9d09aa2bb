#ifndef FUNDUSML_IMAGE_HPP
#define FUNDUSML_IMAGE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fundusml {

/// Row-major 8-bit image, 1 (gray) or 3 (RGB interleaved) channels.
struct Image {
    int width{0};
    int height{0};
    int channels{1};
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    std::uint8_t& at(int row, int col, int ch = 0) {
        return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
    }
    std::uint8_t at(int row, int col, int ch = 0) const {
        return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
    bool operator==(const Image&) const = default;
};

/// The four single-channel planes both pipelines consume.
struct ChannelSet {
    Image gray, red, green, blue;
};

struct ImageError : std::runtime_error {
    enum class Kind { FileNotFound, UnsupportedFormat, CorruptData, BadArgument };
    Kind kind;
    ImageError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

/// Decodes a PNG or JPEG file. 4-channel inputs drop alpha.
Image load_image(const std::string& path);

/// Bilinear resize, pixel-centers-aligned. Identity when sizes already match.
Image resize(const Image& img, int target_w, int target_h);

/// round(0.299 R + 0.587 G + 0.114 B), clamped to [0,255].
Image to_grayscale(const Image& img);

/// Raw R/G/B planes plus the grayscale conversion.
ChannelSet split_channels(const Image& img);

} // namespace fundusml

#endif

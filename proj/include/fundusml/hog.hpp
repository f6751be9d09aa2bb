#ifndef FUNDUSML_HOG_HPP
#define FUNDUSML_HOG_HPP

#include <vector>

#include "fundusml/image.hpp"

namespace fundusml::hog {

struct HogParams {
    int orientations{9};
    int cell_size{8};   // pixels per cell side
    int block_size{2};  // cells per block side
    double clip{0.2};   // L2-Hys clipping value
    double epsilon{1e-5}; // added inside the square root

    void validate() const;
    /// Descriptor length for a w x h image: (w/c - b + 1)(h/c - b + 1) b^2 o.
    std::size_t descriptor_length(int width, int height) const;
};

struct GradientPlanes {
    int width{0}, height{0};
    std::vector<double> gx, gy; // row-major, signed
};

/// Undivided central differences [-1, 0, 1]; one-sided at borders.
GradientPlanes gradients(const Image& img);

/// Per-cell unsigned-orientation histograms (cells_y x cells_x x orientations,
/// row-major). Each pixel votes its magnitude, linearly interpolated between
/// the two nearest bin centers at (i + 0.5) * 180 / o degrees.
std::vector<double> cell_histograms(const GradientPlanes& g, const HogParams& params);

/// L2-Hys over 2x2-cell blocks at stride 1 cell, blocks concatenated row-major.
std::vector<double> block_normalize(const std::vector<double>& cells, int cells_y, int cells_x,
                                    const HogParams& params);

/// Full pipeline: gradients -> cell_histograms -> block_normalize.
std::vector<double> hog_features(const Image& img, const HogParams& params = {});

} // namespace fundusml::hog

#endif

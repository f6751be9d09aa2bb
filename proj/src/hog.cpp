#include "fundusml/hog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fundusml::hog {

void HogParams::validate() const {
    if (orientations < 1 || cell_size < 1 || block_size < 1)
        throw std::invalid_argument("HogParams: orientations, cell_size, block_size must be >= 1");
}

std::size_t HogParams::descriptor_length(int width, int height) const {
    const int cx = width / cell_size, cy = height / cell_size;
    const int bx = cx - block_size + 1, by = cy - block_size + 1;
    if (bx < 1 || by < 1) return 0;
    return static_cast<std::size_t>(bx) * by * block_size * block_size * orientations;
}

GradientPlanes gradients(const Image& img) {
    if (img.channels != 1)
        throw ImageError(ImageError::Kind::BadArgument, "gradients needs a single-channel image");
    const int w = img.width, h = img.height;
    GradientPlanes g{w, h, std::vector<double>(img.pixel_count()),
                     std::vector<double>(img.pixel_count())};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
            const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
            g.gx[y * w + x] = static_cast<double>(img.at(y, xr)) - img.at(y, xl);
            g.gy[y * w + x] = static_cast<double>(img.at(yd, x)) - img.at(yu, x);
        }
    }
    return g;
}

std::vector<double> cell_histograms(const GradientPlanes& g, const HogParams& params) {
    params.validate();
    if (g.gx.size() != g.gy.size() ||
        g.gx.size() != static_cast<std::size_t>(g.width) * g.height)
        throw std::invalid_argument("cell_histograms: plane dimension mismatch");
    const int c = params.cell_size, o = params.orientations;
    const int cx = g.width / c, cy = g.height / c;
    std::vector<double> hist(static_cast<std::size_t>(cy) * cx * o, 0.0);
    const double bin_width = 180.0 / o;

    for (int y = 0; y < cy * c; ++y) {
        for (int x = 0; x < cx * c; ++x) {
            const double dx = g.gx[y * g.width + x], dy = g.gy[y * g.width + x];
            const double mag = std::hypot(dx, dy);
            if (mag == 0.0) continue;
            double theta = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
            theta = std::fmod(theta + 360.0, 180.0);
            // linear vote between the two nearest bin centers (i + 0.5) * bin_width
            double pos = theta / bin_width - 0.5;
            int b0 = static_cast<int>(std::floor(pos));
            const double frac = pos - b0;
            int b1 = b0 + 1;
            b0 = (b0 % o + o) % o;
            b1 = b1 % o;
            double* cell = &hist[(static_cast<std::size_t>(y / c) * cx + x / c) * o];
            cell[b0] += mag * (1.0 - frac);
            cell[b1] += mag * frac;
        }
    }
    return hist;
}

std::vector<double> block_normalize(const std::vector<double>& cells, int cells_y, int cells_x,
                                    const HogParams& params) {
    params.validate();
    const int b = params.block_size, o = params.orientations;
    if (cells_y < b || cells_x < b)
        throw std::invalid_argument("block_normalize: grid smaller than one block");
    const int by = cells_y - b + 1, bx = cells_x - b + 1;
    const int block_len = b * b * o;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(by) * bx * block_len);
    std::vector<double> block(block_len);

    for (int y = 0; y < by; ++y) {
        for (int x = 0; x < bx; ++x) {
            int k = 0;
            for (int dy = 0; dy < b; ++dy)
                for (int dx = 0; dx < b; ++dx)
                    for (int a = 0; a < o; ++a)
                        block[k++] =
                            cells[(static_cast<std::size_t>(y + dy) * cells_x + x + dx) * o + a];
            double ss = 0;
            for (double v : block) ss += v * v;
            double norm = std::sqrt(ss + params.epsilon);
            for (double& v : block) v = std::min(v / norm, params.clip);
            ss = 0;
            for (double v : block) ss += v * v;
            norm = std::sqrt(ss + params.epsilon);
            for (double& v : block) v /= norm;
            out.insert(out.end(), block.begin(), block.end());
        }
    }
    return out;
}

std::vector<double> hog_features(const Image& img, const HogParams& params) {
    GradientPlanes g = gradients(img);
    auto cells = cell_histograms(g, params);
    return block_normalize(cells, img.height / params.cell_size, img.width / params.cell_size,
                           params);
}

} // namespace fundusml::hog

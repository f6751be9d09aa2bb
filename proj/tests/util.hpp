#ifndef FUNDUSML_TESTS_UTIL_HPP
#define FUNDUSML_TESTS_UTIL_HPP

#include <initializer_list>
#include <random>
#include <vector>

#include "fundusml/image.hpp"

namespace testutil {

inline fundusml::Image make_image(const std::vector<std::vector<int>>& rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.front().size());
    fundusml::Image img(w, h, 1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) img.at(r, c) = static_cast<std::uint8_t>(rows[r][c]);
    return img;
}

inline fundusml::Image random_image(int w, int h, int max_value, std::mt19937_64& rng,
                                    int channels = 1) {
    fundusml::Image img(w, h, channels);
    std::uniform_int_distribution<int> pix(0, max_value);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(pix(rng));
    return img;
}

// the worked 5x5 example: five isolated minima, two merge events, three holes
inline fundusml::Image figure_grid() {
    return make_image({{1, 3, 2, 3, 1},
                       {2, 5, 3, 5, 3},
                       {1, 3, 1, 3, 3},
                       {4, 4, 5, 4, 4},
                       {1, 4, 4, 4, 4}});
}

} // namespace testutil

#endif

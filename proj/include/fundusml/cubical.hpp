#ifndef FUNDUSML_CUBICAL_HPP
#define FUNDUSML_CUBICAL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "fundusml/image.hpp"

namespace fundusml::cubical {

/// Sentinel death for essential classes; strictly greater than any grayscale level.
inline constexpr int kInfiniteDeath = 1 << 20;

struct PersistencePair {
    int birth;
    int death; // kInfiniteDeath for essential classes
    auto operator<=>(const PersistencePair&) const = default;
};

struct PersistenceDiagram {
    int dim{0};
    std::vector<PersistencePair> pairs;

    /// Number of classes alive at threshold t (birth <= t < death).
    int alive_at(int t) const {
        int n = 0;
        for (const auto& p : pairs) n += (p.birth <= t && t < p.death);
        return n;
    }
};

/// Active-pixel mask of the sublevel set {v <= t}, row-major.
std::vector<std::uint8_t> binarize(const Image& img, int t);

/// Sublevel-filtration persistence in dimensions 0 and 1 over the 256 integer
/// grayscale levels. Pixels are top cells of a cubical complex (T-construction):
/// components are 8-connected, holes are bounded 4-connected complement regions.
/// Zero-persistence pairs are dropped. Birth/death are grayscale intensities.
std::pair<PersistenceDiagram, PersistenceDiagram> compute_persistence(const Image& img);

} // namespace fundusml::cubical

#endif

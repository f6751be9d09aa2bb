#include "fundusml/cubical.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace fundusml::cubical {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

} // namespace

std::vector<std::uint8_t> binarize(const Image& img, int t) {
    if (img.channels != 1)
        throw ImageError(ImageError::Kind::BadArgument, "binarize needs a single-channel image");
    std::vector<std::uint8_t> mask(img.pixel_count());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = img.data[i] <= t;
    return mask;
}

std::pair<PersistenceDiagram, PersistenceDiagram> compute_persistence(const Image& img) {
    if (img.channels != 1)
        throw ImageError(ImageError::Kind::BadArgument,
                         "compute_persistence needs a single-channel image");
    const int w = img.width, h = img.height, n = w * h;
    PersistenceDiagram pd0{0, {}}, pd1{1, {}};

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return img.data[a] < img.data[b]; });

    // dim 0: grow sublevel sets, 8-connected, elder rule on component birth
    {
        UnionFind uf(n);
        std::vector<int> birth(n, -1); // valid at roots; -1 = not yet active
        for (int idx : order) {
            const int v = img.data[idx];
            birth[idx] = v;
            const int r = idx / w, c = idx % w;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int nr = r + dr, nc = c + dc;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    const int nb = nr * w + nc;
                    if (birth[nb] < 0) continue; // not active yet
                    int ra = uf.find(idx), rb = uf.find(nb);
                    if (ra == rb) continue;
                    if (birth[ra] > birth[rb]) std::swap(ra, rb); // rb is younger
                    if (birth[rb] < v) pd0.pairs.push_back({birth[rb], v});
                    uf.parent[rb] = ra;
                }
            }
        }
        int root = uf.find(0);
        pd0.pairs.push_back({birth[root], kInfiniteDeath});
    }

    // dim 1: complement union-find swept from high to low intensity.
    // A complement component's forward death is the max intensity it contains;
    // a merge while pixel of value v enters kills the shorter-lived side with
    // forward birth v. The virtual outside node never dies.
    {
        const int outside = n;
        UnionFind uf(n + 1);
        std::vector<int> death(n + 1, -1);
        death[outside] = std::numeric_limits<int>::max();
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int idx = *it;
            const int v = img.data[idx];
            if (v == 0) continue; // never enters the complement (t >= 0)
            death[idx] = v;
            const int r = idx / w, c = idx % w;
            auto link = [&](int nb) {
                int ra = uf.find(idx), rb = uf.find(nb);
                if (ra == rb) return;
                if (death[ra] < death[rb]) std::swap(ra, rb); // rb is shorter-lived
                if (v < death[rb]) pd1.pairs.push_back({v, death[rb]});
                uf.parent[rb] = ra;
            };
            if (r == 0 || r == h - 1 || c == 0 || c == w - 1) link(outside);
            const int dr4[] = {-1, 1, 0, 0}, dc4[] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                const int nr = r + dr4[k], nc = c + dc4[k];
                if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                const int nb = nr * w + nc;
                if (death[nb] >= 0) link(nb);
            }
        }
        // components never absorbed by the outside were separated down to t=0
        std::vector<char> done(n + 1, 0);
        for (int i = 0; i < n; ++i) {
            if (death[i] < 0) continue;
            int r = uf.find(i);
            if (r == outside || done[r]) continue;
            done[r] = 1;
            if (0 < death[r]) pd1.pairs.push_back({0, death[r]});
        }
    }

    std::sort(pd0.pairs.begin(), pd0.pairs.end());
    std::sort(pd1.pairs.begin(), pd1.pairs.end());
    return {pd0, pd1};
}

} // namespace fundusml::cubical

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fundusml/cubical.hpp"
#include "oracle.hpp"
#include "util.hpp"

using namespace fundusml;
using cubical::kInfiniteDeath;
using cubical::PersistencePair;
using testutil::make_image;

namespace {

Image rot90(const Image& img) {
    Image out(img.height, img.width, 1);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) out.at(c, img.height - 1 - r) = img.at(r, c);
    return out;
}

Image flip_h(const Image& img) {
    Image out(img.width, img.height, 1);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) out.at(r, img.width - 1 - c) = img.at(r, c);
    return out;
}

void check_against_oracle(const Image& img, int max_level) {
    auto [pd0, pd1] = cubical::compute_persistence(img);
    auto ref = oracle::diagrams(img, max_level);
    CHECK(pd0.pairs == ref.pd0);
    CHECK(pd1.pairs == ref.pd1);
}

} // namespace

TEST_CASE("binarize marks the sublevel set") {
    const Image img = make_image({{0, 3}, {5, 1}});
    const auto mask = cubical::binarize(img, 2);
    CHECK(mask == std::vector<std::uint8_t>{1, 0, 0, 1});
    const auto all = cubical::binarize(img, 255);
    CHECK(all == std::vector<std::uint8_t>{1, 1, 1, 1});
}

TEST_CASE("single pixel: one essential component, no holes") {
    const Image img = make_image({{7}});
    auto [pd0, pd1] = cubical::compute_persistence(img);
    CHECK(pd0.pairs == std::vector<PersistencePair>{{7, kInfiniteDeath}});
    CHECK(pd1.pairs.empty());
}

TEST_CASE("constant image") {
    const Image img(6, 4, 1, 42);
    auto [pd0, pd1] = cubical::compute_persistence(img);
    CHECK(pd0.pairs == std::vector<PersistencePair>{{42, kInfiniteDeath}});
    CHECK(pd1.pairs.empty());
}

TEST_CASE("ring around a bright center creates one hole") {
    const Image img = make_image({{1, 1, 1}, {1, 5, 1}, {1, 1, 1}});
    auto [pd0, pd1] = cubical::compute_persistence(img);
    CHECK(pd0.pairs == std::vector<PersistencePair>{{1, kInfiniteDeath}});
    CHECK(pd1.pairs == std::vector<PersistencePair>{{1, 5}});
}

TEST_CASE("worked 5x5 example: frozen diagrams") {
    auto [pd0, pd1] = cubical::compute_persistence(testutil::figure_grid());
    CHECK(pd0.pairs == std::vector<PersistencePair>{
                           {1, 2}, {1, 3}, {1, 3}, {1, 4}, {1, kInfiniteDeath}, {2, 3}});
    CHECK(pd1.pairs == std::vector<PersistencePair>{{3, 5}, {3, 5}, {4, 5}});
    CHECK(pd1.alive_at(2) == 0);
    CHECK(pd1.alive_at(3) == 2);
    CHECK(pd1.alive_at(4) == 3);
    CHECK(pd1.alive_at(5) == 0);
    CHECK(pd0.alive_at(1) == 5);
}

TEST_CASE("diagonal touch counts as connected, holes need 4-paths") {
    // two 0-pixels meeting only at a corner: one component (8-connectivity)
    const Image img = make_image({{0, 9}, {9, 0}});
    auto [pd0, pd1] = cubical::compute_persistence(img);
    CHECK(pd0.pairs == std::vector<PersistencePair>{{0, kInfiniteDeath}});
    // the two 9s connect to the outside diagonally only, so they bound nothing
    CHECK(pd1.pairs.empty());
}

TEST_CASE("matches flood-fill oracle on random images") {
    std::mt19937_64 rng(2024);
    for (int it = 0; it < 150; ++it) {
        const int w = 2 + static_cast<int>(rng() % 6);
        const int h = 2 + static_cast<int>(rng() % 6);
        check_against_oracle(testutil::random_image(w, h, 7, rng), 7);
    }
    for (int it = 0; it < 30; ++it)
        check_against_oracle(testutil::random_image(10, 10, 255, rng), 255);
}

TEST_CASE("diagrams invariant under rotation and flips") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 25; ++it) {
        const Image img = testutil::random_image(6, 5, 5, rng);
        auto base = cubical::compute_persistence(img);
        for (const Image& t : {rot90(img), rot90(rot90(img)), flip_h(img), flip_h(rot90(img))}) {
            auto other = cubical::compute_persistence(t);
            CHECK(base.first.pairs == other.first.pairs);
            CHECK(base.second.pairs == other.second.pairs);
        }
    }
}

TEST_CASE("diagrams shift with a constant intensity offset") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 20; ++it) {
        const Image img = testutil::random_image(5, 5, 6, rng);
        Image shifted = img;
        const int s = 40;
        for (auto& v : shifted.data) v = static_cast<std::uint8_t>(v + s);
        auto base = cubical::compute_persistence(img);
        auto moved = cubical::compute_persistence(shifted);
        auto shift = [&](std::vector<PersistencePair> pairs) {
            for (auto& p : pairs) {
                p.birth += s;
                if (p.death != kInfiniteDeath) p.death += s;
            }
            return pairs;
        };
        CHECK(shift(base.first.pairs) == moved.first.pairs);
        CHECK(shift(base.second.pairs) == moved.second.pairs);
    }
}

TEST_CASE("Euler characteristic equals b0 - b1 at every level") {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 60; ++it) {
        const int w = 2 + static_cast<int>(rng() % 5);
        const int h = 2 + static_cast<int>(rng() % 5);
        const Image img = testutil::random_image(w, h, 3, rng);
        auto [pd0, pd1] = cubical::compute_persistence(img);
        for (int t = 0; t <= 3; ++t)
            CHECK(oracle::euler_characteristic(img, t) == pd0.alive_at(t) - pd1.alive_at(t));
    }
}

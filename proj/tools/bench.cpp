#include <chrono>
#include <cstdio>
#include <random>
#include <thread>
#include <vector>

#include "fundusml/dataset.hpp"
#include "fundusml/ml.hpp"

using namespace fundusml;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Image> synthetic_images(int count, int size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pix(0, 255);
    std::vector<Image> images;
    for (int i = 0; i < count; ++i) {
        Image img(size, size, 3);
        for (auto& v : img.data) v = static_cast<std::uint8_t>(pix(rng));
        images.push_back(std::move(img));
    }
    return images;
}

std::vector<std::vector<double>> run_extract(const std::vector<Image>& images,
                                             const data::ExtractorConfig& config, int threads) {
    std::vector<std::vector<double>> out(images.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < static_cast<long>(images.size()); ++i)
        out[i] = data::extract_one(images[i], config);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    const int n_images = argc > 1 ? std::atoi(argv[1]) : 16;
    const int size = argc > 2 ? std::atoi(argv[2]) : 224;
    const int par = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    std::printf("benchmark: %d synthetic %dx%d images, %d threads vs serial\n", n_images, size,
                size, par);
    auto images = synthetic_images(n_images, size, 42);

    for (const char* kind : {"tda", "hog"}) {
        data::ExtractorConfig config;
        config.kind = data::feature_kind_from_name(kind);
        config.resize_to = size;

        auto t0 = Clock::now();
        auto serial = run_extract(images, config, 1);
        const double ts = seconds_since(t0);

        t0 = Clock::now();
        auto parallel = run_extract(images, config, par);
        const double tp = seconds_since(t0);

        const bool same = serial == parallel;
        std::printf("%-4s  serial %7.3fs  parallel %7.3fs  speedup %.2fx  identical=%s\n", kind,
                    ts, tp, ts / tp, same ? "yes" : "NO");
    }

    // forest training, per-tree parallelism
    {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> gauss;
        ml::Dataset ds;
        ds.num_classes = 2;
        ds.features = ml::Matrix(400, 64);
        for (auto& v : ds.features.a) v = gauss(rng);
        for (std::size_t i = 0; i < 400; ++i) ds.labels.push_back(ds.features(i, 0) > 0);

        ml::ModelSpec spec;
        spec.kind = ml::ModelKind::RandomForest;
        spec.threads = 1;
        auto t0 = Clock::now();
        auto m1 = ml::fit(spec, ds);
        const double ts = seconds_since(t0);

        spec.threads = par;
        t0 = Clock::now();
        auto m2 = ml::fit(spec, ds);
        const double tp = seconds_since(t0);

        const bool same = ml::serialize(m1) == ml::serialize(m2);
        std::printf("forest fit  serial %7.3fs  parallel %7.3fs  speedup %.2fx  identical=%s\n",
                    ts, tp, ts / tp, same ? "yes" : "NO");
    }
    return 0;
}

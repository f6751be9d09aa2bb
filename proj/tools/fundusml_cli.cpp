#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "fundusml/dataset.hpp"
#include "fundusml/report.hpp"

namespace fs = std::filesystem;
using namespace fundusml;

namespace {

std::string cache_dir() {
    if (const char* env = std::getenv("FUNDUSML_CACHE_DIR")) return env;
    return ".";
}

int hardware_threads() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological and HOG feature extraction with classical ML benchmarks "
                 "for retinal fundus images"};
    app.require_subcommand(1);

    std::string manifest, images_dir, kind = "tda", feature_path, out_dir = "results";
    std::string task = "binary";
    std::vector<std::string> model_names;
    std::uint64_t seed = 0;
    int threads = hardware_threads();
    int folds = 10;
    double coverage = 0.4;
    bool svg = false;

    auto* ingest_cmd = app.add_subcommand("ingest", "Validate a manifest against an image directory");
    ingest_cmd->add_option("manifest", manifest, "CSV with id and diagnosis columns")->required();
    ingest_cmd->add_option("images", images_dir, "directory of <id>.png/.jpg images")->required();

    auto* extract_cmd = app.add_subcommand("extract", "Extract features into a CSV cache");
    extract_cmd->add_option("manifest", manifest)->required();
    extract_cmd->add_option("images", images_dir)->required();
    extract_cmd->add_option("--kind", kind, "tda or hog")->check(CLI::IsMember({"tda", "hog"}));
    extract_cmd->add_option("--out", feature_path, "output CSV (default <cache>/<kind>_features.csv)");
    extract_cmd->add_option("--threads", threads);

    auto* bench_cmd = app.add_subcommand("benchmark", "Cross-validated model comparison");
    bench_cmd->add_option("features", feature_path, "feature CSV from extract")->required();
    bench_cmd->add_option("--task", task)->check(CLI::IsMember({"binary", "five"}));
    bench_cmd->add_option("--models", model_names, "subset of the seven model names");
    bench_cmd->add_option("--seed", seed);
    bench_cmd->add_option("--folds", folds);
    bench_cmd->add_option("--threads", threads);
    bench_cmd->add_option("--out", out_dir);
    bench_cmd->add_flag("--svg", svg, "also write ROC SVG plots");

    auto* betti_cmd = app.add_subcommand("analyze-betti", "Median Betti curves with confidence bands");
    betti_cmd->add_option("features", feature_path, "TDA feature CSV")->required();
    betti_cmd->add_option("--task", task)->check(CLI::IsMember({"binary", "five"}));
    betti_cmd->add_option("--coverage", coverage)->check(CLI::Range(0.01, 0.99));
    betti_cmd->add_option("--out", out_dir);
    betti_cmd->add_flag("--svg", svg, "also write band SVG plots");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest_cmd) {
            data::DatasetIndex index = data::ingest(manifest, images_dir);
            if (index.entries.empty()) std::cerr << "warning: manifest has no usable entries\n";
            std::vector<int> per_grade(5, 0);
            for (const auto& e : index.entries) ++per_grade[e.grade];
            std::cout << "entries: " << index.entries.size() << "\n";
            for (int g = 0; g < 5; ++g) std::cout << "grade " << g << ": " << per_grade[g] << "\n";
            for (const auto& id : index.missing_ids)
                std::cerr << "missing image for id " << id << "\n";
            return index.missing_ids.empty() ? 0 : 1;
        }
        if (*extract_cmd) {
            data::DatasetIndex index = data::ingest(manifest, images_dir);
            for (const auto& id : index.missing_ids)
                std::cerr << "missing image for id " << id << "\n";
            data::ExtractorConfig config;
            config.kind = data::feature_kind_from_name(kind);
            if (feature_path.empty())
                feature_path = (fs::path(cache_dir()) / (kind + "_features.csv")).string();
            data::ExtractResult res = data::extract(index, config, feature_path, threads);
            std::cout << "wrote " << res.file.ids.size() << " rows to " << feature_path
                      << " (skipped " << res.skipped_existing << " already present)\n";
            for (const auto& [id, why] : res.failures)
                std::cerr << "failed " << id << ": " << why << "\n";
            return res.failures.empty() ? 0 : 1;
        }
        if (*bench_cmd) {
            data::FeatureFile file = data::read_feature_file(feature_path);
            report::BenchmarkOptions opts;
            opts.binary = task == "binary";
            opts.seed = seed;
            opts.folds = folds;
            opts.threads = threads;
            opts.svg = svg;
            for (const auto& name : model_names) opts.models.push_back(ml::kind_from_name(name));
            report::run_benchmark(file, opts, out_dir);
            std::cout << "results written to " << out_dir << "\n";
            return 0;
        }
        if (*betti_cmd) {
            data::FeatureFile file = data::read_feature_file(feature_path);
            report::BettiBandOptions opts;
            opts.binary = task == "binary";
            opts.coverage = coverage;
            opts.svg = svg;
            report::analyze_betti(file, opts, out_dir);
            std::cout << "band CSVs written to " << out_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

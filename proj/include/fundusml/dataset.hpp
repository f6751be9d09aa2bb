#ifndef FUNDUSML_DATASET_HPP
#define FUNDUSML_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fundusml/hog.hpp"
#include "fundusml/ml.hpp"

namespace fundusml::data {

struct IndexEntry {
    std::string id;
    std::string image_path;
    int grade{0}; // 0..4
};

struct DatasetIndex {
    std::vector<IndexEntry> entries;
    std::vector<std::string> missing_ids; // manifest rows without a resolvable image
};

/// Reads a CSV manifest with id and diagnosis columns; images resolve as
/// <dir>/<id>.png, .jpg, or .jpeg in that order.
DatasetIndex ingest(const std::string& manifest_path, const std::string& images_dir);

enum class FeatureKind { Tda, Hog };

const char* feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string& name);

struct ExtractorConfig {
    FeatureKind kind{FeatureKind::Tda};
    int resize_to{224};
    hog::HogParams hog;

    /// Stable hash of every parameter that affects feature values.
    std::string fingerprint() const;
    std::size_t feature_dim() const;
};

struct FeatureFile {
    FeatureKind kind{FeatureKind::Tda};
    int version{1};
    std::string fingerprint;
    std::vector<std::string> ids;
    std::vector<int> labels;
    ml::Matrix features;
};

FeatureFile read_feature_file(const std::string& path);
void write_feature_file(const std::string& path, const FeatureFile& file);

/// Per-image feature vector: resize, then the selected extractor.
std::vector<double> extract_one(const Image& img, const ExtractorConfig& config);

struct ExtractResult {
    FeatureFile file;
    std::vector<std::pair<std::string, std::string>> failures; // id, reason
    std::size_t skipped_existing{0};
};

/// Extracts features for every index entry; rows sorted by sample id. When the
/// output file already exists with a matching fingerprint, present ids are
/// skipped and the merged file is rewritten. threads <= 1 runs serially.
ExtractResult extract(const DatasetIndex& index, const ExtractorConfig& config,
                      const std::string& out_path, int threads = 1);

/// binary: grade 0 -> class 0, grades 1-4 -> class 1; five_class: identity.
ml::Dataset to_ml_dataset(const FeatureFile& file, bool binary);

} // namespace fundusml::data

#endif

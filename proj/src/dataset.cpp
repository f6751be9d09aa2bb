#include "fundusml/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fundusml/betti.hpp"
#include "fundusml/image.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fundusml::data {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

DatasetIndex ingest(const std::string& manifest_path, const std::string& images_dir) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("ingest: cannot open manifest " + manifest_path);

    std::string line;
    if (!std::getline(in, line)) return {};
    auto header = split_csv_line(line);
    int id_col = -1, grade_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "id" || header[i] == "id_code") id_col = static_cast<int>(i);
        if (header[i] == "diagnosis" || header[i] == "grade") grade_col = static_cast<int>(i);
    }
    if (id_col < 0 || grade_col < 0)
        throw std::runtime_error("ingest: manifest needs id and diagnosis columns");

    DatasetIndex index;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) <= std::max(id_col, grade_col))
            throw std::runtime_error("ingest: short manifest row: " + line);
        const std::string& id = fields[id_col];
        const int grade = std::stoi(fields[grade_col]);
        if (grade < 0 || grade > 4)
            throw std::runtime_error("ingest: grade out of range [0,4] for id " + id);

        std::string path;
        for (const char* ext : {".png", ".jpg", ".jpeg"}) {
            fs::path candidate = fs::path(images_dir) / (id + ext);
            if (fs::exists(candidate)) {
                path = candidate.string();
                break;
            }
        }
        if (path.empty())
            index.missing_ids.push_back(id);
        else
            index.entries.push_back({id, path, grade});
    }
    return index;
}

const char* feature_kind_name(FeatureKind kind) {
    return kind == FeatureKind::Tda ? "tda" : "hog";
}

FeatureKind feature_kind_from_name(const std::string& name) {
    if (name == "tda") return FeatureKind::Tda;
    if (name == "hog") return FeatureKind::Hog;
    throw std::invalid_argument("unknown feature kind: " + name);
}

std::string ExtractorConfig::fingerprint() const {
    std::ostringstream ss;
    ss << feature_kind_name(kind) << "|resize=" << resize_to;
    if (kind == FeatureKind::Tda) {
        ss << "|grid=" << betti::kGridSize;
    } else {
        ss << "|o=" << hog.orientations << "|c=" << hog.cell_size << "|b=" << hog.block_size
           << "|clip=" << hog.clip << "|eps=" << hog.epsilon;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
    return buf;
}

std::size_t ExtractorConfig::feature_dim() const {
    if (kind == FeatureKind::Tda) return betti::kTdaDim;
    return hog.descriptor_length(resize_to, resize_to);
}

std::vector<double> extract_one(const Image& img, const ExtractorConfig& config) {
    Image resized = resize(img, config.resize_to, config.resize_to);
    if (config.kind == FeatureKind::Tda) {
        if (resized.channels == 1) {
            // single-channel input: use the same plane for all four channels
            ChannelSet cs{resized, resized, resized, resized};
            return betti::tda_features(cs);
        }
        return betti::tda_features(split_channels(resized));
    }
    Image gray = resized.channels == 1 ? resized : to_grayscale(resized);
    return hog::hog_features(gray, config.hog);
}

FeatureFile read_feature_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature file " + path);

    FeatureFile file;
    std::string line;
    std::size_t cols = 0;
    std::vector<double> values;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key, value;
            ss >> key >> value;
            if (key == "kind:") file.kind = feature_kind_from_name(value);
            else if (key == "version:") file.version = std::stoi(value);
            else if (key == "fingerprint:") file.fingerprint = value;
            continue;
        }
        if (!header_done) { // column-name row
            cols = split_csv_line(line).size() - 2;
            header_done = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != cols + 2)
            throw std::runtime_error("feature file row width mismatch in " + path);
        file.ids.push_back(fields[0]);
        file.labels.push_back(std::stoi(fields[1]));
        for (std::size_t i = 2; i < fields.size(); ++i) values.push_back(std::stod(fields[i]));
    }
    file.features = ml::Matrix(file.ids.size(), cols);
    file.features.a = std::move(values);
    return file;
}

void write_feature_file(const std::string& path, const FeatureFile& file) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write feature file " + path);
    out << "# kind: " << feature_kind_name(file.kind) << "\n";
    out << "# version: " << file.version << "\n";
    out << "# fingerprint: " << file.fingerprint << "\n";
    out << "id,label";
    char name[16];
    for (std::size_t j = 0; j < file.features.cols; ++j) {
        std::snprintf(name, sizeof name, ",f%04zu", j);
        out << name;
    }
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < file.ids.size(); ++i) {
        out << file.ids[i] << ',' << file.labels[i];
        for (std::size_t j = 0; j < file.features.cols; ++j) out << ',' << file.features(i, j);
        out << "\n";
    }
}

ExtractResult extract(const DatasetIndex& index, const ExtractorConfig& config,
                      const std::string& out_path, int threads) {
    ExtractResult result;
    result.file.kind = config.kind;
    result.file.fingerprint = config.fingerprint();

    std::vector<std::string> done_ids;
    FeatureFile existing;
    if (fs::exists(out_path)) {
        existing = read_feature_file(out_path);
        if (existing.kind != config.kind || existing.fingerprint != result.file.fingerprint)
            throw std::runtime_error("extract: existing file " + out_path +
                                     " has an incompatible parameter fingerprint");
        done_ids = existing.ids;
        std::sort(done_ids.begin(), done_ids.end());
    }

    std::vector<const IndexEntry*> todo;
    for (const auto& e : index.entries) {
        if (std::binary_search(done_ids.begin(), done_ids.end(), e.id))
            ++result.skipped_existing;
        else
            todo.push_back(&e);
    }

    const std::size_t dim = config.feature_dim();
    std::vector<std::vector<double>> rows(todo.size());
    std::vector<std::string> errors(todo.size());

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
    for (long i = 0; i < static_cast<long>(todo.size()); ++i) {
        try {
            rows[i] = extract_one(load_image(todo[i]->image_path), config);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    // merge existing + new, sorted by sample id
    std::vector<std::tuple<std::string, int, const std::vector<double>*>> merged;
    std::vector<std::vector<double>> existing_rows(existing.ids.size());
    for (std::size_t i = 0; i < existing.ids.size(); ++i) {
        existing_rows[i].assign(existing.features.row(i), existing.features.row(i) + existing.features.cols);
        merged.emplace_back(existing.ids[i], existing.labels[i], &existing_rows[i]);
    }
    for (std::size_t i = 0; i < todo.size(); ++i) {
        if (!errors[i].empty()) {
            result.failures.emplace_back(todo[i]->id, errors[i]);
            continue;
        }
        merged.emplace_back(todo[i]->id, todo[i]->grade, &rows[i]);
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });

    result.file.features = ml::Matrix(merged.size(), dim);
    for (std::size_t i = 0; i < merged.size(); ++i) {
        result.file.ids.push_back(std::get<0>(merged[i]));
        result.file.labels.push_back(std::get<1>(merged[i]));
        std::copy(std::get<2>(merged[i])->begin(), std::get<2>(merged[i])->end(),
                  result.file.features.a.begin() + i * dim);
    }
    write_feature_file(out_path, result.file);
    if (!result.failures.empty()) {
        std::ofstream err(out_path + ".errors.txt");
        for (const auto& [id, why] : result.failures) err << id << '\t' << why << "\n";
    }
    return result;
}

ml::Dataset to_ml_dataset(const FeatureFile& file, bool binary) {
    ml::Dataset ds;
    ds.features = file.features;
    ds.num_classes = binary ? 2 : 5;
    for (int grade : file.labels) ds.labels.push_back(binary ? (grade > 0 ? 1 : 0) : grade);
    return ds;
}

} // namespace fundusml::data

#include "fundusml/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "fundusml/betti.hpp"

namespace fundusml::report {

namespace fs = std::filesystem;

namespace {

void write_svg_polylines(const std::string& path,
                         const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series,
                         const std::string& x_label, const std::string& y_label) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double W = 640, H = 480, M = 50;
    auto sx = [&](double x) { return M + (x - xmin) / (xmax - xmin) * (W - 2 * M); };
    auto sy = [&](double y) { return H - M - (y - ymin) / (ymax - ymin) * (H - 2 * M); };
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2"};

    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << M << "' y1='" << H - M << "' x2='" << W - M << "' y2='" << H - M
        << "' stroke='black'/>\n";
    out << "<line x1='" << M << "' y1='" << M << "' x2='" << M << "' y2='" << H - M
        << "' stroke='black'/>\n";
    out << "<text x='" << W / 2 << "' y='" << H - 10 << "' font-size='13'>" << x_label
        << "</text>\n";
    out << "<text x='12' y='" << H / 2 << "' font-size='13' transform='rotate(-90 12 " << H / 2
        << ")'>" << y_label << "</text>\n";
    int ci = 0;
    for (const auto& [name, pts] : series) {
        out << "<polyline fill='none' stroke='" << colors[ci % 7] << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
        out << "'/>\n";
        out << "<text x='" << W - M + 4 << "' y='" << M + 16 * ci << "' font-size='11' fill='"
            << colors[ci % 7] << "'>" << name << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

} // namespace

std::vector<eval::MetricsReport> run_benchmark(const data::FeatureFile& file,
                                               const BenchmarkOptions& opts,
                                               const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<ml::ModelKind> models = opts.models;
    if (models.empty())
        models = {ml::ModelKind::Logistic, ml::ModelKind::RandomForest, ml::ModelKind::GradientBoost,
                  ml::ModelKind::Knn,      ml::ModelKind::DecisionTree, ml::ModelKind::Svm,
                  ml::ModelKind::ExtraTrees};

    ml::Dataset ds = data::to_ml_dataset(file, opts.binary);
    eval::FoldSplit folds = eval::stratified_folds(ds.labels, opts.folds, opts.seed);

    std::vector<eval::MetricsReport> reports;
    for (ml::ModelKind kind : models) {
        ml::ModelSpec spec;
        spec.kind = kind;
        spec.seed = opts.seed;
        spec.threads = opts.threads;
        eval::CvOptions cv;
        cv.threads = opts.threads;
        reports.push_back(eval::cross_validate(spec, ds, folds, cv));
    }

    std::ofstream metrics(fs::path(out_dir) / "metrics.csv");
    metrics << "model,acc_mean,acc_std,prec_mean,prec_std,rec_mean,rec_std,f1_mean,f1_std";
    if (opts.binary) metrics << ",auc_mean,auc_std";
    metrics << "\n";
    metrics.precision(10);

    std::ofstream radar(fs::path(out_dir) / "radar.csv");
    radar << "model,accuracy,precision,recall,f1";
    if (opts.binary) radar << ",auc";
    radar << "\n";
    radar.precision(10);

    std::ofstream summary(fs::path(out_dir) / "summary.txt");
    summary << "task: " << (opts.binary ? "binary" : "five_class") << "  folds: " << opts.folds
            << "  seed: " << opts.seed << "  samples: " << ds.labels.size() << "\n\n";

    for (const auto& r : reports) {
        metrics << r.model_name << ',' << r.mean.accuracy << ',' << r.stddev.accuracy << ','
                << r.mean.precision << ',' << r.stddev.precision << ',' << r.mean.recall << ','
                << r.stddev.recall << ',' << r.mean.f1 << ',' << r.stddev.f1;
        radar << r.model_name << ',' << r.mean.accuracy << ',' << r.mean.precision << ','
              << r.mean.recall << ',' << r.mean.f1;
        if (r.has_auc) {
            metrics << ',' << 100.0 * r.auc_mean << ',' << 100.0 * r.auc_stddev;
            radar << ',' << 100.0 * r.auc_mean;
        }
        metrics << "\n";
        radar << "\n";

        char line[256];
        std::snprintf(line, sizeof line,
                      "%-16s acc %6.2f +- %.2f  prec %6.2f +- %.2f  rec %6.2f +- %.2f  f1 %6.2f +- %.2f",
                      r.model_name.c_str(), r.mean.accuracy, r.stddev.accuracy, r.mean.precision,
                      r.stddev.precision, r.mean.recall, r.stddev.recall, r.mean.f1, r.stddev.f1);
        summary << line;
        if (r.has_auc) {
            std::snprintf(line, sizeof line, "  auc %5.1f", 100.0 * r.auc_mean);
            summary << line;
        }
        summary << "\n";

        std::ofstream cm(fs::path(out_dir) / ("confusion_" + r.model_name + ".csv"));
        cm << "fold,true,pred,count\n";
        for (int f = 0; f < r.fold_count; ++f)
            for (int t = 0; t < r.num_classes; ++t)
                for (int p = 0; p < r.num_classes; ++p)
                    cm << f << ',' << t << ',' << p << ',' << r.fold_confusions[f].at(t, p) << "\n";
        for (int t = 0; t < r.num_classes; ++t)
            for (int p = 0; p < r.num_classes; ++p)
                cm << "all," << t << ',' << p << ',' << r.pooled.at(t, p) << "\n";

        if (r.has_auc) {
            std::ofstream roc(fs::path(out_dir) / ("roc_" + r.model_name + ".csv"));
            roc << "fold,fpr,tpr\n";
            roc.precision(10);
            for (int f = 0; f < r.fold_count; ++f)
                for (const auto& p : r.fold_roc[f]) roc << f << ',' << p.fpr << ',' << p.tpr << "\n";
            if (opts.svg) {
                std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
                for (int f = 0; f < r.fold_count; ++f) {
                    std::vector<std::pair<double, double>> pts;
                    for (const auto& p : r.fold_roc[f]) pts.emplace_back(p.fpr, p.tpr);
                    series.emplace_back("fold " + std::to_string(f), std::move(pts));
                }
                write_svg_polylines((fs::path(out_dir) / ("roc_" + r.model_name + ".svg")).string(),
                                    series, "false positive rate", "true positive rate");
            }
        }
    }
    return reports;
}

void analyze_betti(const data::FeatureFile& file, const BettiBandOptions& opts,
                   const std::string& out_dir) {
    if (file.kind != data::FeatureKind::Tda)
        throw std::invalid_argument("analyze_betti: needs a TDA feature file");
    fs::create_directories(out_dir);

    static const char* channels[] = {"gray", "red", "green", "blue"};
    const auto grid = betti::default_grid();

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < file.labels.size(); ++i) {
        const int cls = opts.binary ? (file.labels[i] > 0 ? 1 : 0) : file.labels[i];
        by_class[cls].push_back(i);
    }

    for (int ch = 0; ch < 4; ++ch) {
        for (int dim = 0; dim < 2; ++dim) {
            const std::size_t offset = (static_cast<std::size_t>(ch) * 2 + dim) * betti::kGridSize;
            std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
            for (const auto& [cls, rows] : by_class) {
                std::vector<std::vector<double>> curves;
                for (std::size_t r : rows) {
                    const double* base = file.features.row(r) + offset;
                    curves.emplace_back(base, base + betti::kGridSize);
                }
                betti::CurveBand band = betti::median_band(curves, opts.coverage);

                char name[64];
                std::snprintf(name, sizeof name, "band_class%d_%s_b%d.csv", cls, channels[ch], dim);
                std::ofstream out(fs::path(out_dir) / name);
                out << "grid,median,lower,upper\n";
                out.precision(10);
                for (int i = 0; i < betti::kGridSize; ++i)
                    out << grid[i] << ',' << band.median[i] << ',' << band.lower[i] << ','
                        << band.upper[i] << "\n";

                if (opts.svg) {
                    std::vector<std::pair<double, double>> med, lo, hi;
                    for (int i = 0; i < betti::kGridSize; ++i) {
                        med.emplace_back(grid[i], band.median[i]);
                        lo.emplace_back(grid[i], band.lower[i]);
                        hi.emplace_back(grid[i], band.upper[i]);
                    }
                    series.emplace_back("class " + std::to_string(cls) + " median", std::move(med));
                    series.emplace_back("class " + std::to_string(cls) + " lower", std::move(lo));
                    series.emplace_back("class " + std::to_string(cls) + " upper", std::move(hi));
                }
            }
            if (opts.svg) {
                char name[64];
                std::snprintf(name, sizeof name, "band_%s_b%d.svg", channels[ch], dim);
                write_svg_polylines((fs::path(out_dir) / name).string(), series, "intensity",
                                    dim == 0 ? "components" : "holes");
            }
        }
    }
}

} // namespace fundusml::report

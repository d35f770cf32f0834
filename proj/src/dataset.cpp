#include "mcagg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "mcagg/errors.hpp"
#include "mcagg/linalg.hpp"

namespace mcagg {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    s = s.substr(b, e - b);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

bool parse_double(const std::string& text, double& value) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && std::isfinite(value);
}

}  // namespace

int Dataset::num_classes() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
}

Partition Dataset::ground_truth() const {
    if (!labels) throw InputError("dataset '" + name + "' has no ground-truth labels");
    return Partition{*labels, num_classes()};
}

void Dataset::validate() const {
    if (points.rows() < 2) throw InputError("dataset needs at least 2 points");
    if (points.cols() < 1) throw InputError("dataset needs at least 1 feature");
    if (!points.allFinite()) throw InputError("dataset contains NaN or Inf entries");
    if (labels) {
        if (labels->size() != num_points())
            throw InputError("label vector length does not match the number of points");
        for (int l : *labels)
            if (l < 0) throw InputError("negative class id");
    }
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        header = split_fields(line);
        break;
    }
    if (header.empty()) throw EmptyDataset(path.string() + " is empty");

    std::optional<std::size_t> label_idx;
    if (label_column) {
        const auto it = std::find(header.begin(), header.end(), *label_column);
        if (it == header.end())
            throw InputError("label column '" + *label_column + "' not found in " + path.string());
        label_idx = static_cast<std::size_t>(it - header.begin());
    }

    Dataset data;
    data.name = path.stem().string();
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != label_idx) data.feature_names.push_back(header[c]);
    const std::size_t n_features = data.feature_names.size();

    std::vector<double> values;
    std::vector<int> labels;
    std::map<std::string, int> class_ids;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw ParseError(line_no, fields.size(),
                             "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_idx) {
                const auto [it, inserted] =
                    class_ids.emplace(fields[c], static_cast<int>(class_ids.size()));
                if (inserted) data.class_names.push_back(fields[c]);
                labels.push_back(it->second);
                continue;
            }
            double v = 0.0;
            if (!parse_double(fields[c], v))
                throw ParseError(line_no, c + 1, "non-numeric feature value '" + fields[c] + "'");
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw EmptyDataset(path.string() + " has no data rows");

    data.points.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n_features));
    std::copy(values.begin(), values.end(), data.points.data());
    if (label_idx) data.labels = std::move(labels);
    data.validate();
    return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_csv(data, out);
}

void write_csv(const Dataset& data, std::ostream& out) {
    const std::size_t n = data.num_features();
    for (std::size_t c = 0; c < n; ++c) {
        if (c) out << ',';
        out << (c < data.feature_names.size() ? data.feature_names[c] : "x" + std::to_string(c + 1));
    }
    if (data.labels) out << ",class";
    out << '\n';
    const auto old_precision = out.precision(17);
    for (std::size_t i = 0; i < data.num_points(); ++i) {
        for (std::size_t c = 0; c < n; ++c) {
            if (c) out << ',';
            out << data.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        }
        if (data.labels) {
            const int l = (*data.labels)[i];
            out << ','
                << (static_cast<std::size_t>(l) < data.class_names.size() ? data.class_names[l]
                                                                          : std::to_string(l));
        }
        out << '\n';
    }
    out.precision(old_precision);
}

Dataset zscore_normalize(const Dataset& data) {
    data.validate();
    Dataset out = data;
    const double n = static_cast<double>(data.num_points());
    for (Eigen::Index c = 0; c < out.points.cols(); ++c) {
        auto col = out.points.col(c);
        const double mean = col.sum() / n;
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / n);
        if (sd > 0.0) {
            col /= sd;
        } else {
            col.setZero();
        }
    }
    return out;
}

Dataset pca_reduce(const Dataset& data, std::size_t dims) {
    data.validate();
    if (dims < 1 || dims > data.num_features())
        throw DimensionError("pca_reduce: dims must lie in [1, " +
                             std::to_string(data.num_features()) + "], got " +
                             std::to_string(dims));
    const Eigen::RowVectorXd mean = data.points.colwise().mean();
    const Matrix centered = data.points.rowwise() - mean;
    const Matrix cov =
        (centered.transpose() * centered) / static_cast<double>(data.num_points() - 1);
    const SymmetricEigen eig = jacobi_eigen(cov);

    Dataset out = data;
    out.points = centered * eig.vectors.leftCols(static_cast<Eigen::Index>(dims));
    out.feature_names.clear();
    for (std::size_t c = 0; c < dims; ++c) out.feature_names.push_back("pc" + std::to_string(c + 1));
    return out;
}

Dataset generate_circles(const CirclesParams& params) {
    if (params.points_per_circle < 1) throw InputError("points_per_circle must be >= 1");
    if (params.radii.empty()) throw InputError("at least one radius is required");
    if (params.noise_std < 0.0) throw InputError("noise_std must be non-negative");
    for (double r : params.radii)
        if (!(r >= 0.0)) throw InputError("radii must be non-negative");

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> noise(0.0, params.noise_std > 0.0 ? params.noise_std : 1.0);

    const std::size_t n = params.points_per_circle * params.radii.size();
    Dataset out;
    out.name = "circles";
    out.points.resize(static_cast<Eigen::Index>(n), 2);
    out.labels.emplace();
    out.labels->reserve(n);
    out.feature_names = {"x", "y"};
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < params.radii.size(); ++c) {
        out.class_names.push_back("ring" + std::to_string(c));
        const double r = params.radii[c];
        for (std::size_t p = 0; p < params.points_per_circle; ++p, ++row) {
            const double theta = angle(rng);
            double x = r * std::cos(theta);
            double y = r * std::sin(theta);
            if (params.noise_std > 0.0) {
                x += noise(rng);
                y += noise(rng);
            }
            out.points(row, 0) = x;
            out.points(row, 1) = y;
            out.labels->push_back(static_cast<int>(c));
        }
    }
    return out;
}

}  // namespace mcagg

#include "fnmf/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string_view>

#include "fnmf/errors.hpp"
#include "fnmf/log.hpp"
#include "text.hpp"

namespace fnmf {

void DataMatrix::validate() const {
    if (values.rows() < 1) throw DomainError("data matrix needs at least one feature");
    if (values.cols() < 2) throw DomainError("data matrix needs at least two samples");
    if (!values.allFinite()) throw DomainError("data matrix contains non-finite values");
    if ((values.array() < 0.0).any()) throw DomainError("data matrix contains negative values");
    if (labels && static_cast<Eigen::Index>(labels->size()) != values.cols())
        throw DomainError("label count does not match sample count");
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != values.rows())
        throw DomainError("feature name count does not match feature count");
}

namespace datasets {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename T>
bool parse_field(std::string_view field, T& out) {
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

double global_max(const Eigen::MatrixXd& M) { return M.size() == 0 ? 0.0 : M.maxCoeff(); }

} // namespace

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());

    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    std::string line;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (width == 0) {
            width = fields.size();
            if (options.label_column &&
                (*options.label_column < 0 || static_cast<std::size_t>(*options.label_column) >= width))
                throw FormatError("label column out of range", line_no);
            if (options.label_column && width < 2)
                throw FormatError("no feature columns besides the label", line_no);
        } else if (fields.size() != width) {
            throw FormatError("expected " + std::to_string(width) + " fields, found " +
                                  std::to_string(fields.size()),
                              line_no);
        }
        if (header_pending) {
            header_pending = false;
            for (std::size_t c = 0; c < fields.size(); ++c)
                if (!options.label_column || c != static_cast<std::size_t>(*options.label_column))
                    names.emplace_back(fields[c]);
            continue;
        }
        std::vector<double> row;
        row.reserve(width);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (options.label_column && c == static_cast<std::size_t>(*options.label_column)) {
                int label = 0;
                if (!parse_field(fields[c], label))
                    throw FormatError("label '" + std::string(fields[c]) + "' is not an integer", line_no, c + 1);
                labels.push_back(label);
                continue;
            }
            double v = 0.0;
            if (!parse_field(fields[c], v) || !std::isfinite(v))
                throw FormatError("field '" + std::string(fields[c]) + "' is not a number", line_no, c + 1);
            if (v < 0.0)
                throw DomainError("negative value " + std::string(fields[c]) + " at row " +
                                  std::to_string(line_no) + ", column " + std::to_string(c + 1));
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("no data rows in " + path.string());

    DataMatrix X;
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    const auto n = static_cast<Eigen::Index>(rows.size());
    X.values.resize(d, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            X.values(k, i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    if (options.label_column) X.labels = std::move(labels);
    X.feature_names = std::move(names);
    X.validate();
    return X;
}

void write_csv(const DataMatrix& X, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (!X.feature_names.empty()) {
        for (std::size_t k = 0; k < X.feature_names.size(); ++k) out << (k ? "," : "") << X.feature_names[k];
        if (X.labels) out << ",label";
        out << '\n';
    }
    for (Eigen::Index i = 0; i < X.samples(); ++i) {
        for (Eigen::Index k = 0; k < X.features(); ++k) out << (k ? "," : "") << detail::format_double(X.values(k, i));
        if (X.labels) out << ',' << (*X.labels)[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

void write_matrix_csv(const Eigen::MatrixXd& M, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) out << (c ? "," : "") << detail::format_double(M(r, c));
        out << '\n';
    }
}

DataMatrix normalize_unit_columns(const DataMatrix& X) {
    DataMatrix out = X;
    std::size_t zero_columns = 0;
    for (Eigen::Index i = 0; i < out.samples(); ++i) {
        const double norm = out.values.col(i).norm();
        if (norm == 0.0) {
            ++zero_columns;
            continue;
        }
        out.values.col(i) /= norm;
    }
    if (zero_columns > 0)
        warn(std::to_string(zero_columns) + " all-zero sample(s) left unnormalized");
    return out;
}

DataMatrix generate_three_gaussian(std::uint64_t seed, int samples_per_class) {
    if (samples_per_class < 1) throw DomainError("samples_per_class must be positive");
    constexpr double kMeans[3][2] = {{2.0, 2.0}, {5.0, 2.0}, {3.5, 5.0}};
    constexpr double kStd = 0.5;
    constexpr int kNoiseDims = 5;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, kStd);
    std::uniform_real_distribution<double> noise(0.0, 3.0);

    const Eigen::Index n = 3 * static_cast<Eigen::Index>(samples_per_class);
    DataMatrix X;
    X.values.resize(2 + kNoiseDims, n);
    X.labels.emplace();
    X.labels->reserve(static_cast<std::size_t>(n));
    Eigen::Index i = 0;
    for (int cls = 0; cls < 3; ++cls) {
        for (int s = 0; s < samples_per_class; ++s, ++i) {
            X.values(0, i) = std::max(0.0, kMeans[cls][0] + gauss(rng));
            X.values(1, i) = std::max(0.0, kMeans[cls][1] + gauss(rng));
            for (int k = 0; k < kNoiseDims; ++k) X.values(2 + k, i) = noise(rng);
            X.labels->push_back(cls);
        }
    }
    return X;
}

DataMatrix inject_noise_dims(const DataMatrix& X, int count, std::uint64_t seed) {
    if (count < 1) throw DomainError("noise dimension count must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(0.0, global_max(X.values));

    DataMatrix out = X;
    const Eigen::Index d = X.features();
    out.values.conservativeResize(d + count, Eigen::NoChange);
    for (Eigen::Index i = 0; i < out.samples(); ++i)
        for (Eigen::Index k = d; k < d + count; ++k) out.values(k, i) = noise(rng);
    if (!out.feature_names.empty())
        for (int k = 0; k < count; ++k) out.feature_names.push_back("noise_" + std::to_string(k));
    return out;
}

DataMatrix inject_block_occlusion(const DataMatrix& X, ImageShape shape, int block, std::uint64_t seed) {
    if (shape.height < 1 || shape.width < 1) throw DomainError("image shape must be positive");
    if (static_cast<Eigen::Index>(shape.height) * shape.width != X.features())
        throw DomainError("image shape does not match the feature dimension");
    if (block < 1 || block > std::min(shape.height, shape.width))
        throw DomainError("occlusion block must fit inside the image");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> top(0, shape.height - block);
    std::uniform_int_distribution<int> left(0, shape.width - block);
    std::uniform_real_distribution<double> noise(0.0, global_max(X.values));

    DataMatrix out = X;
    for (Eigen::Index i = 0; i < out.samples(); ++i) {
        const int r0 = top(rng);
        const int c0 = left(rng);
        for (int r = r0; r < r0 + block; ++r)
            for (int c = c0; c < c0 + block; ++c)
                out.values(static_cast<Eigen::Index>(r) * shape.width + c, i) = noise(rng);
    }
    return out;
}

} // namespace datasets
} // namespace fnmf

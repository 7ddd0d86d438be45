#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fnmf {

/// Nonnegative sample matrix, features along rows and samples along columns.
struct DataMatrix {
    Eigen::MatrixXd values;                 // d x n
    std::optional<std::vector<int>> labels; // length n when present
    std::vector<std::string> feature_names; // empty or length d

    Eigen::Index features() const { return values.rows(); }
    Eigen::Index samples() const { return values.cols(); }

    /// Throws DomainError unless d >= 1, n >= 2, all entries are finite and >= 0,
    /// and the label/feature-name lengths agree with the shape.
    void validate() const;
};

struct ImageShape {
    int height = 0;
    int width = 0;
};

namespace datasets {

struct CsvOptions {
    std::optional<int> label_column; // 0-based column index holding integer labels
    bool has_header = false;
};

/// Reads one sample per row and returns the transposed d x n matrix.
/// Parse problems raise FormatError with a 1-based row/column; negative
/// feature values raise DomainError.
DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes one sample per row; labels, if present, go in a trailing "label" column.
void write_csv(const DataMatrix& X, const std::filesystem::path& path);

/// Dumps a raw matrix, one matrix row per line, full round-trip precision.
void write_matrix_csv(const Eigen::MatrixXd& M, const std::filesystem::path& path);

/// Scales every column to unit Euclidean norm. All-zero columns are left as-is
/// and reported through fnmf::warn.
DataMatrix normalize_unit_columns(const DataMatrix& X);

/// Three Gaussian classes in the first two dimensions, means (2,2), (5,2),
/// (3.5,5) with std 0.5, followed by five dimensions uniform on [0,3].
/// Samples are grouped by class; values are clipped at zero.
DataMatrix generate_three_gaussian(std::uint64_t seed, int samples_per_class = 300);

/// Appends `count` rows drawn uniformly from [0, max(X)].
DataMatrix inject_noise_dims(const DataMatrix& X, int count, std::uint64_t seed);

/// Replaces one randomly placed block x block patch per sample with values drawn
/// uniformly from [0, max(X)]. Pixels are stored row-major (row * width + col).
DataMatrix inject_block_occlusion(const DataMatrix& X, ImageShape shape, int block,
                                  std::uint64_t seed);

} // namespace datasets
} // namespace fnmf

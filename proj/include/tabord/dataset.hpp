#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tabord/errors.hpp"

namespace tabord {

enum class Task { binary, multiclass, regression, none };

/// Numeric table of n samples by m features, optionally labeled.
/// After standardize() every column has mean 0 and unit sample std.
struct DataMatrix {
    Eigen::MatrixXd values;  // n x m
    std::vector<std::string> column_names;
    std::vector<double> labels;  // empty when unlabeled
    Task task = Task::none;
    std::vector<bool> zero_variance;  // set by standardize(), else empty

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
    bool has_labels() const { return !labels.empty(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Integer-valued labels with few distinct values are read as class ids.
inline Task infer_task(const std::vector<double>& labels) {
    std::set<double> distinct;
    bool all_integral = true;
    for (double v : labels) {
        distinct.insert(v);
        if (std::abs(v - std::round(v)) > 1e-9) all_integral = false;
    }
    if (all_integral && distinct.size() <= 20) {
        return distinct.size() <= 2 ? Task::binary : Task::multiclass;
    }
    return Task::regression;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = seed;
    h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

}  // namespace detail

/// Load a UTF-8 CSV with header row and comma delimiter. Non-label cells
/// must parse as real numbers; rows with unparseable or missing cells are
/// rejected, or dropped when drop_missing is true.
inline DataMatrix load_csv(const std::string& path,
                           const std::optional<std::string>& label_column = std::nullopt,
                           bool drop_missing = false) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path);

    std::string line;
    if (!std::getline(in, line)) throw EmptyDatasetError();
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = detail::split_csv_line(line);
    for (auto& h : header) h = detail::trim(h);

    std::ptrdiff_t label_idx = -1;
    if (label_column) {
        auto it = std::find(header.begin(), header.end(), *label_column);
        if (it == header.end()) throw UnknownLabelColumnError(*label_column);
        label_idx = it - header.begin();
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError(row_no, cells.size(),
                             "expected " + std::to_string(header.size()) + " cells, got " +
                                 std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(header.size());
        double label = 0.0;
        bool bad = false;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::string cell = detail::trim(cells[c]);
            char* end = nullptr;
            double v = cell.empty() ? std::nan("") : std::strtod(cell.c_str(), &end);
            bool ok = !cell.empty() && end == cell.c_str() + cell.size() && std::isfinite(v);
            if (!ok) {
                if (drop_missing) { bad = true; break; }
                throw ParseError(row_no, c + 1, "cannot parse '" + cell + "' as a number");
            }
            if (static_cast<std::ptrdiff_t>(c) == label_idx) label = v;
            else row.push_back(v);
        }
        if (bad) continue;
        rows.push_back(std::move(row));
        if (label_idx >= 0) labels.push_back(label);
    }
    if (rows.empty()) throw EmptyDatasetError();

    DataMatrix X;
    const std::size_t m = header.size() - (label_idx >= 0 ? 1 : 0);
    X.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) X.values(i, j) = rows[i][j];
    for (std::size_t c = 0; c < header.size(); ++c)
        if (static_cast<std::ptrdiff_t>(c) != label_idx) X.column_names.push_back(header[c]);
    if (label_idx >= 0) {
        X.labels = std::move(labels);
        X.task = detail::infer_task(X.labels);
    }
    return X;
}

/// Center and scale every column to sample mean 0, sample std 1 (n-1
/// denominator). Zero-variance columns become all-zero and are flagged.
inline DataMatrix standardize(const DataMatrix& X) {
    const Eigen::Index n = X.rows(), m = X.cols();
    if (n < 2) throw Error(ErrorKind::validation, "standardize needs at least 2 rows");
    DataMatrix out = X;
    out.zero_variance.assign(static_cast<std::size_t>(m), false);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mean = X.values.col(j).mean();
        Eigen::VectorXd centered = X.values.col(j).array() - mean;
        const double var = centered.squaredNorm() / static_cast<double>(n - 1);
        if (var <= 1e-24) {
            out.values.col(j).setZero();
            out.zero_variance[static_cast<std::size_t>(j)] = true;
        } else {
            out.values.col(j) = centered / std::sqrt(var);
        }
    }
    return out;
}

/// Synthetic block-correlated data: features within a block share a latent
/// factor giving pairwise correlation ~intra_corr, blocks are independent.
/// The random stream of a block depends on its size and occurrence index
/// only, so permuting block order permutes columns of the output.
inline DataMatrix synth_blocks(int n, const std::vector<int>& block_sizes,
                               double intra_corr, std::uint64_t seed) {
    if (intra_corr < 0.0 || intra_corr >= 1.0) throw InvalidCorrelationError(intra_corr);
    for (int s : block_sizes)
        if (s < 1) throw Error(ErrorKind::validation, "block sizes must be >= 1");
    if (n < 2) throw Error(ErrorKind::validation, "need n >= 2");

    int m = 0;
    for (int s : block_sizes) m += s;
    DataMatrix X;
    X.values.resize(n, m);

    std::map<int, int> occurrence;  // per block size
    int col = 0, block_id = 0;
    for (int s : block_sizes) {
        const int occ = occurrence[s]++;
        std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(s),
                                             static_cast<std::uint64_t>(occ)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd latent(n);
        for (int i = 0; i < n; ++i) latent(i) = gauss(rng);
        const double a = std::sqrt(intra_corr), b = std::sqrt(1.0 - intra_corr);
        for (int f = 0; f < s; ++f) {
            for (int i = 0; i < n; ++i) X.values(i, col) = a * latent(i) + b * gauss(rng);
            X.column_names.push_back("b" + std::to_string(block_id) + "_f" + std::to_string(f));
            ++col;
        }
        ++block_id;
    }
    return X;
}

}  // namespace tabord

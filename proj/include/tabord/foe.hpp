#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tabord/dataset.hpp"
#include "tabord/errors.hpp"

namespace tabord {

inline const std::vector<double> kDefaultThresholds = {0.9975, 0.99, 0.95, 0.90};
constexpr double kDefaultSensitivity = 2.0;

/// Explained-variance ratios of the principal components, descending,
/// padded with zeros to length m; cumulative holds the prefix sums.
struct VarianceSpectrum {
    Eigen::VectorXd explained;
    Eigen::VectorXd cumulative;

    Eigen::Index size() const { return explained.size(); }
};

/// Per-dataset ordering-effectiveness report.
struct FoeReport {
    std::vector<double> thresholds;
    std::vector<int> intrinsic_dims;
    std::vector<double> idfs;
    double mean_idf = 0.0;
    std::vector<double> success_probs;
    double auc = 0.0;
    double psi_star = 1.0;
    double sensitivity_s = kDefaultSensitivity;
    double foe = 0.0;
    bool foe_infinite = false;  // serialized as "undefined"
    double complexity = 0.0;
};

/// PCA spectrum of a standardized matrix. Uses the m x m covariance when
/// m <= n and the n x n Gram matrix otherwise; the nonzero spectra agree.
inline VarianceSpectrum variance_spectrum(const DataMatrix& X) {
    const Eigen::Index n = X.rows(), m = X.cols();
    if (n < 2) throw Error(ErrorKind::validation, "variance_spectrum needs n >= 2");

    Eigen::VectorXd eig;
    if (m <= n) {
        Eigen::MatrixXd cov = (X.values.transpose() * X.values) / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        eig = es.eigenvalues();
    } else {
        Eigen::MatrixXd gram = (X.values * X.values.transpose()) / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        eig = es.eigenvalues();
    }
    std::vector<double> vals(eig.data(), eig.data() + eig.size());
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    for (double& v : vals) v = std::max(v, 0.0);
    const double total = std::accumulate(vals.begin(), vals.end(), 0.0);
    if (total <= 1e-18) throw DegenerateMatrixError();

    VarianceSpectrum spec;
    spec.explained = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m && i < static_cast<Eigen::Index>(vals.size()); ++i)
        spec.explained(i) = vals[static_cast<std::size_t>(i)] / total;
    spec.cumulative.resize(m);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        acc += spec.explained(i);
        spec.cumulative(i) = acc;
    }
    return spec;
}

/// Smallest k whose cumulative explained variance reaches the threshold.
inline int intrinsic_dimensionality(const VarianceSpectrum& spec, double threshold) {
    if (threshold <= 0.0 || threshold > 1.0) throw InvalidThresholdError(threshold);
    const Eigen::Index m = spec.size();
    for (Eigen::Index k = 0; k < m; ++k)
        if (spec.cumulative(k) >= threshold - 1e-12) return static_cast<int>(k) + 1;
    return static_cast<int>(m);  // round-off clamp
}

inline double success_probability(int intrinsic, int total) {
    if (intrinsic < 1 || intrinsic > total)
        throw Error(ErrorKind::validation, "intrinsic dimensionality out of range");
    return 1.0 - static_cast<double>(intrinsic) / static_cast<double>(total);
}

/// Trapezoidal area under the (IDF, cumulative-variance-at-ID) points,
/// sorted ascending by IDF. Degenerates to 0 when all IDFs coincide.
inline double auc_idf_variance(const VarianceSpectrum& spec,
                               const std::vector<double>& thresholds) {
    if (thresholds.size() < 2)
        throw Error(ErrorKind::validation, "auc needs at least 2 thresholds");
    const double m = static_cast<double>(spec.size());
    std::vector<std::pair<double, double>> pts;
    for (double t : thresholds) {
        const int id = intrinsic_dimensionality(spec, t);
        pts.emplace_back(id / m, spec.cumulative(id - 1));
    }
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
    return area;
}

/// Closed-form minimizer of (psi/AUC^s - 1)^2; 1 by convention when AUC = 0.
inline double optimize_psi(double auc, double s) {
    if (s <= 0.0) throw Error(ErrorKind::validation, "sensitivity s must be > 0");
    if (auc <= 0.0) return 1.0;
    return std::pow(auc, s);
}

struct FoeValue {
    double value = 0.0;
    bool infinite = false;
};

/// psi / (AUC * mean IDF)^s; infinite when the denominator vanishes.
inline FoeValue foe_score(double psi, double auc, double mean_idf, double s) {
    if (s <= 0.0) throw Error(ErrorKind::validation, "sensitivity s must be > 0");
    if (mean_idf <= 0.0 || mean_idf > 1.0)
        throw Error(ErrorKind::validation, "mean IDF must lie in (0,1]");
    const double denom = auc * mean_idf;
    if (denom <= 0.0) return {0.0, true};
    return {psi / std::pow(denom, s), false};
}

/// Mean cumulative variance at the per-threshold intrinsic dims divided by
/// mean_idf^s.
inline double complexity_score(const VarianceSpectrum& spec,
                               const std::vector<double>& thresholds, double mean_idf,
                               double s) {
    if (mean_idf <= 0.0) throw Error(ErrorKind::validation, "mean IDF must be > 0");
    double acc = 0.0;
    for (double t : thresholds) acc += spec.cumulative(intrinsic_dimensionality(spec, t) - 1);
    return (acc / static_cast<double>(thresholds.size())) / std::pow(mean_idf, s);
}

inline FoeReport analyze(const DataMatrix& X,
                         const std::vector<double>& thresholds = kDefaultThresholds,
                         double s = kDefaultSensitivity) {
    const VarianceSpectrum spec = variance_spectrum(X);
    const int m = static_cast<int>(X.cols());

    FoeReport r;
    r.thresholds = thresholds;
    r.sensitivity_s = s;
    for (double t : thresholds) {
        const int id = intrinsic_dimensionality(spec, t);
        r.intrinsic_dims.push_back(id);
        r.idfs.push_back(static_cast<double>(id) / m);
        r.success_probs.push_back(success_probability(id, m));
    }
    r.mean_idf = std::accumulate(r.idfs.begin(), r.idfs.end(), 0.0) /
                 static_cast<double>(r.idfs.size());
    r.auc = auc_idf_variance(spec, thresholds);
    r.psi_star = optimize_psi(r.auc, s);
    const FoeValue f = foe_score(r.psi_star, r.auc, r.mean_idf, s);
    r.foe = f.value;
    r.foe_infinite = f.infinite;
    r.complexity = complexity_score(spec, thresholds, r.mean_idf, s);
    return r;
}

}  // namespace tabord

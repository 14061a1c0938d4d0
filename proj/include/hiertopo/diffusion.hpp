#pragma once

// Per-sample Gaussian affinity and the density-corrected, row-stochastic
// diffusion operator built from it.

#include <hiertopo/dataset.hpp>
#include <hiertopo/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace hiertopo {

enum class Metric { euclidean };

/// L x L Euclidean distances between the rows of a sample. Zero diagonal,
/// exactly symmetric.
inline Matrix pairwise_distances(const Sample& s, Metric metric = Metric::euclidean) {
    (void)metric;
    const Matrix& x = s.observations();
    const auto L = x.rows();
    Matrix d = Matrix::Zero(L, L);
    for (Eigen::Index a = 0; a < L; ++a) {
        for (Eigen::Index b = a + 1; b < L; ++b) {
            const double v = (x.row(a) - x.row(b)).norm();
            d(a, b) = v;
            d(b, a) = v;
        }
    }
    return d;
}

/// factor * median of the strictly-upper-triangle squared distances. For an
/// even count the median is the mean of the two middle values.
inline double median_scale(const Matrix& distances, double factor = 1.0) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw ParameterError("median_scale: factor must be positive");
    }
    const auto L = distances.rows();
    if (L != distances.cols() || L < 2) {
        throw DimensionMismatch("median_scale: need a square matrix with at least 2 rows");
    }
    std::vector<double> sq;
    sq.reserve(static_cast<std::size_t>(L * (L - 1) / 2));
    for (Eigen::Index a = 0; a < L; ++a) {
        for (Eigen::Index b = a + 1; b < L; ++b) {
            sq.push_back(distances(a, b) * distances(a, b));
        }
    }
    const std::size_t n = sq.size();
    const std::size_t mid = n / 2;
    std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid), sq.end());
    double median = sq[mid];
    if (n % 2 == 0) {
        const double lower = *std::max_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    if (!(median > 0.0)) {
        throw DegenerateError("median_scale: median squared distance is zero (points coincide)");
    }
    return factor * median;
}

/// W(a, b) = exp(-d(a, b)^2 / epsilon). Symmetric, entries in (0, 1],
/// diagonal exactly 1.
class AffinityMatrix {
public:
    static AffinityMatrix from_distances(const Matrix& distances, double epsilon) {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
            throw ParameterError("affinity: epsilon must be positive and finite");
        }
        const auto L = distances.rows();
        if (L != distances.cols()) throw DimensionMismatch("affinity: distance matrix not square");
        Matrix w(L, L);
        for (Eigen::Index a = 0; a < L; ++a) {
            w(a, a) = 1.0;
            for (Eigen::Index b = a + 1; b < L; ++b) {
                const double v = std::exp(-(distances(a, b) * distances(a, b)) / epsilon);
                w(a, b) = v;
                w(b, a) = v;
            }
        }
        return AffinityMatrix(std::move(w), epsilon);
    }

    // Wraps an existing kernel after checking the invariants. Entries that
    // underflow to 0 are rejected, as are asymmetric matrices.
    static AffinityMatrix from_matrix(Matrix w, double epsilon) {
        const auto L = w.rows();
        if (L != w.cols() || L < 1) throw DimensionMismatch("affinity: matrix not square");
        for (Eigen::Index a = 0; a < L; ++a) {
            if (w(a, a) != 1.0) throw ValidationError("affinity: diagonal must be 1");
            for (Eigen::Index b = 0; b < L; ++b) {
                const double v = w(a, b);
                if (!(v > 0.0 && v <= 1.0)) throw ValidationError("affinity: entries must lie in (0, 1]");
                if (v != w(b, a)) throw ValidationError("affinity: matrix not symmetric");
            }
        }
        return AffinityMatrix(std::move(w), epsilon);
    }

    const Matrix& entries() const noexcept { return w_; }
    double epsilon() const noexcept { return epsilon_; }
    Eigen::Index size() const noexcept { return w_.rows(); }

private:
    AffinityMatrix(Matrix w, double epsilon) : w_(std::move(w)), epsilon_(epsilon) {}

    Matrix w_;
    double epsilon_;
};

inline AffinityMatrix affinity(const Matrix& distances, double epsilon) {
    return AffinityMatrix::from_distances(distances, epsilon);
}

/// Row-stochastic L x L operator K.
class DiffusionOperator {
public:
    // Accepts any nonnegative matrix whose rows sum to 1 within `tolerance`.
    explicit DiffusionOperator(Matrix k, double tolerance = 1e-12) : k_(std::move(k)) {
        if (k_.rows() != k_.cols() || k_.rows() < 1) {
            throw DimensionMismatch("diffusion operator must be square");
        }
        if (!k_.allFinite() || (k_.array() < 0.0).any()) {
            throw ValidationError("diffusion operator entries must be finite and nonnegative");
        }
        const Vector sums = k_.rowwise().sum();
        if (((sums.array() - 1.0).abs() > tolerance).any()) {
            throw ValidationError("diffusion operator rows must sum to 1");
        }
    }

    const Matrix& entries() const noexcept { return k_; }
    Eigen::Index size() const noexcept { return k_.rows(); }

private:
    Matrix k_;
};

/// Intermediate products of the two-step normalization:
///   Q = diag(W 1), W~ = Q^-1 W Q^-1, Q~ = diag(W~ 1), K = Q~^-1 W~.
/// `degrees` holds the diagonal of Q~, so diag(degrees)^(1/2) K
/// diag(degrees)^(-1/2) is the symmetric matrix with K's spectrum.
struct NormalizedKernel {
    Matrix density_normalized;  // W~
    Vector degrees;             // diag of Q~
    Matrix markov;              // K
};

inline NormalizedKernel normalize_kernel(const Matrix& w) {
    const auto L = w.rows();
    if (L != w.cols()) throw DimensionMismatch("normalize_kernel: matrix not square");
    const Vector q = w.rowwise().sum();
    if (!(q.array() > 0.0).all()) throw DegenerateError("normalize_kernel: zero row sum in W");
    const Vector q_inv = q.cwiseInverse();

    NormalizedKernel out;
    out.density_normalized = q_inv.asDiagonal() * w * q_inv.asDiagonal();
    out.degrees = out.density_normalized.rowwise().sum();
    if (!(out.degrees.array() > 0.0).all()) {
        throw DegenerateError("normalize_kernel: zero row sum after density normalization");
    }
    out.markov = out.degrees.cwiseInverse().asDiagonal() * out.density_normalized;
    return out;
}

inline DiffusionOperator diffusion_operator(const AffinityMatrix& w) {
    return DiffusionOperator(normalize_kernel(w.entries()).markov);
}

/// Distances -> median-scaled affinity -> operator, for one sample.
inline DiffusionOperator sample_operator(const Sample& s, double epsilon_factor = 1.0) {
    const Matrix d = pairwise_distances(s);
    return diffusion_operator(affinity(d, median_scale(d, epsilon_factor)));
}

}  // namespace hiertopo

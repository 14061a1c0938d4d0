#pragma once

// Diffusion-maps embedding of datasets from their pairwise distance matrix.

#include <hiertopo/diffusion.hpp>
#include <hiertopo/errors.hpp>
#include <hiertopo/text.hpp>
#include <hiertopo/wasserstein.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace hiertopo {

struct Embedding {
    Matrix coordinates;              // N_D x d, row i = (l_1 phi_1(i), ..., l_d phi_d(i))
    std::vector<double> eigenvalues; // l_1 >= ... >= l_d
    double trivial_eigenvalue = 1.0; // l_0
    Vector trivial_vector;           // phi_0, unit norm
    std::vector<std::string> labels;
};

/// Gaussian kernel on the dataset distances with the two-step
/// normalization applied; epsilon = factor * median squared distance.
inline NormalizedKernel dataset_kernel(const Matrix& distances, double epsilon_factor) {
    const double epsilon = median_scale(distances, epsilon_factor);
    return normalize_kernel(affinity(distances, epsilon).entries());
}

namespace detail {

// Order in which datasets are fed to the eigensolver: by sorted distance
// profile, then label, then input position. Makes the result independent
// of the input order whenever profiles or labels differ.
inline std::vector<std::size_t> canonical_order(const DatasetDistanceMatrix& m) {
    const auto n = m.size();
    std::vector<std::vector<double>> profile(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.entries.row(static_cast<Eigen::Index>(i));
        profile[i].assign(row.begin(), row.end());
        std::sort(profile[i].begin(), profile[i].end());
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (profile[a] != profile[b]) return profile[a] < profile[b];
        return m.labels[a] < m.labels[b];
    });
    return order;
}

}  // namespace detail

/// Top d+1 eigenpairs of the dataset-level diffusion operator, computed on
/// its symmetric conjugate; the trivial pair is returned separately.
/// Eigenvectors have unit norm with their largest-magnitude entry positive.
inline Embedding diffusion_maps(const DatasetDistanceMatrix& distances, double epsilon_factor, int dim) {
    const auto n = static_cast<Eigen::Index>(distances.size());
    if (distances.entries.rows() != n || distances.entries.cols() != n) {
        throw DimensionMismatch("diffusion_maps: labels do not match matrix size");
    }
    if (dim < 1 || dim >= n) {
        throw ParameterError("diffusion_maps: embedding dimension must lie in [1, " + std::to_string(n - 1) + "]");
    }

    const auto order = detail::canonical_order(distances);
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            d(i, j) = distances.entries(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)]),
                                        static_cast<Eigen::Index>(order[static_cast<std::size_t>(j)]));

    const NormalizedKernel kernel = dataset_kernel(d, epsilon_factor);
    const Vector root = kernel.degrees.cwiseSqrt();
    const Vector inv_root = root.cwiseInverse();
    Matrix sym = inv_root.asDiagonal() * kernel.density_normalized * inv_root.asDiagonal();
    sym = (0.5 * (sym + sym.transpose())).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) throw DegenerateError("diffusion_maps: eigensolver failed");
    const Vector& values = solver.eigenvalues();  // ascending
    const Matrix& vectors = solver.eigenvectors();

    auto right_vector = [&](Eigen::Index k) {
        Vector phi = inv_root.asDiagonal() * vectors.col(k);
        phi.normalize();
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < n; ++i) {
            if (std::abs(phi(i)) > std::abs(phi(arg))) arg = i;
        }
        if (phi(arg) < 0.0) phi = -phi;
        return phi;
    };

    Embedding e;
    e.labels = distances.labels;
    e.coordinates = Matrix::Zero(n, dim);
    e.trivial_eigenvalue = values(n - 1);
    const Vector phi0 = right_vector(n - 1);
    e.trivial_vector = Vector(n);
    for (Eigen::Index i = 0; i < n; ++i) e.trivial_vector(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)])) = phi0(i);

    for (int k = 1; k <= dim; ++k) {
        const Eigen::Index col = n - 1 - k;
        const double lambda = values(col);
        const Vector phi = right_vector(col);
        e.eigenvalues.push_back(lambda);
        for (Eigen::Index i = 0; i < n; ++i) {
            e.coordinates(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)]), k - 1) = lambda * phi(i);
        }
    }
    return e;
}

inline void export_embedding(const Embedding& e, std::ostream& out, int digits = 12) {
    out << "label";
    for (Eigen::Index k = 0; k < e.coordinates.cols(); ++k) out << ",coord_" << (k + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < e.coordinates.rows(); ++i) {
        const auto& label = e.labels.at(static_cast<std::size_t>(i));
        check_csv_field(label);
        out << label;
        for (Eigen::Index k = 0; k < e.coordinates.cols(); ++k) out << ',' << format_real(e.coordinates(i, k), digits);
        out << '\n';
    }
}

inline void export_embedding(const Embedding& e, const std::filesystem::path& path, int digits = 12) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    export_embedding(e, out, digits);
}

/// Reads labels and coordinates back; eigenvalues are not stored.
inline Embedding import_embedding(std::istream& in, const std::string& source = "embedding") {
    std::string line;
    if (!std::getline(in, line)) throw IoError(source + ": empty file");
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "label") throw IoError(source + ": missing label column");
    const auto dim = static_cast<Eigen::Index>(header.size() - 1);
    std::vector<std::vector<double>> rows;
    Embedding e;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (static_cast<Eigen::Index>(f.size()) != dim + 1) throw IoError(source + ": ragged row");
        e.labels.push_back(f[0]);
        std::vector<double> r;
        for (std::size_t k = 1; k < f.size(); ++k) r.push_back(parse_real(f[k]));
        rows.push_back(std::move(r));
    }
    e.coordinates = Matrix(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index k = 0; k < dim; ++k) e.coordinates(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    return e;
}

}  // namespace hiertopo

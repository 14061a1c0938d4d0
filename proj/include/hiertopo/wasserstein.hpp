#pragma once

// p-Wasserstein distance between persistence diagrams (Euclidean ground
// norm, diagonal augmentation) and dataset-level distance matrices.

#include <hiertopo/assignment.hpp>
#include <hiertopo/errors.hpp>
#include <hiertopo/parallel.hpp>
#include <hiertopo/persistence.hpp>
#include <hiertopo/text.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace hiertopo {

struct DiagramPoint {
    double birth = 0.0;
    double death = 0.0;
};

/// Euclidean distance from (b, d) to the diagonal: (d - b) / sqrt(2).
inline double diagonal_gap(DiagramPoint p) {
    if (!std::isfinite(p.birth) || !std::isfinite(p.death)) {
        throw ValidationError("diagonal_gap: point has an infinite coordinate");
    }
    return (p.death - p.birth) / std::numbers::sqrt2;
}

struct InfinitePolicy {
    enum class Kind { drop, cap } kind = Kind::drop;
    double cap_value = 0.0;

    static InfinitePolicy drop() { return {}; }
    static InfinitePolicy cap(double v) { return {Kind::cap, v}; }
};

struct DiagramDistanceSpec {
    double p = 2.0;
    int degree = 1;
    InfinitePolicy infinite_policy = InfinitePolicy::drop();

    void validate() const {
        if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("wasserstein: order p must be >= 1 and finite");
        if (degree < 0 || degree > 1) throw ParameterError("wasserstein: degree must be 0 or 1");
    }
};

/// Points of a diagram after resolving infinite deaths. Capping a class
/// born after the cap yields a zero-persistence point.
inline std::vector<DiagramPoint> resolve_points(const PersistenceDiagram& pd, const InfinitePolicy& policy) {
    std::vector<DiagramPoint> out;
    out.reserve(pd.size());
    for (const auto& pair : pd.pairs) {
        if (!std::isinf(pair.death)) {
            out.push_back({pair.birth, pair.death});
        } else if (policy.kind == InfinitePolicy::Kind::cap) {
            if (!std::isfinite(policy.cap_value)) {
                throw ParameterError("wasserstein: cap value must be finite");
            }
            out.push_back({pair.birth, std::max(pair.birth, policy.cap_value)});
        }
    }
    return out;
}

/// Optimal-matching cost raised to 1/p. Each point of either diagram is
/// matched to a point of the other or to its own diagonal projection.
inline double wasserstein(const std::vector<DiagramPoint>& a, const std::vector<DiagramPoint>& b, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("wasserstein: order p must be >= 1 and finite");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    if (na + nb == 0) return 0.0;

    std::vector<double> gap_a(na), gap_b(nb);
    for (std::size_t i = 0; i < na; ++i) gap_a[i] = std::pow(diagonal_gap(a[i]), p);
    for (std::size_t j = 0; j < nb; ++j) gap_b[j] = std::pow(diagonal_gap(b[j]), p);

    // Rows: points of a, then diagonal slots for b. Columns: points of b,
    // then diagonal slots for a. Diagonal-to-diagonal is free.
    const auto n = static_cast<Eigen::Index>(na + nb);
    const auto ea = static_cast<Eigen::Index>(na);
    const auto eb = static_cast<Eigen::Index>(nb);
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < ea; ++i) {
        const auto& pa = a[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < eb; ++j) {
            const auto& pb = b[static_cast<std::size_t>(j)];
            cost(i, j) = std::pow(std::hypot(pa.birth - pb.birth, pa.death - pb.death), p);
        }
        cost.row(i).tail(ea).setConstant(gap_a[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index j = 0; j < eb; ++j) {
        cost.col(j).tail(eb).setConstant(gap_b[static_cast<std::size_t>(j)]);
    }

    const auto match = solve_assignment(cost);
    double total = 0.0;
    for (std::size_t i = 0; i < match.size(); ++i) {
        total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(match[i]));
    }
    return std::pow(total, 1.0 / p);
}

inline double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, const DiagramDistanceSpec& spec) {
    spec.validate();
    if (a.degree != spec.degree || b.degree != spec.degree) {
        throw DimensionMismatch("wasserstein: diagrams of degree " + std::to_string(a.degree) + " and " +
                                std::to_string(b.degree) + " compared at degree " + std::to_string(spec.degree));
    }
    return wasserstein(resolve_points(a, spec.infinite_policy), resolve_points(b, spec.infinite_policy), spec.p);
}

/// Symmetric n x n table of dataset distances with exact zero diagonal.
struct DatasetDistanceMatrix {
    Eigen::MatrixXd entries;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return labels.size(); }
};

inline DatasetDistanceMatrix distance_matrix(const std::vector<PersistenceDiagram>& diagrams,
                                             const DiagramDistanceSpec& spec,
                                             std::vector<std::string> labels = {}, unsigned threads = 0) {
    spec.validate();
    const std::size_t n = diagrams.size();
    if (labels.empty()) {
        for (std::size_t i = 0; i < n; ++i) labels.push_back("dataset_" + std::to_string(i));
    }
    if (labels.size() != n) throw DimensionMismatch("distance_matrix: one label per diagram required");

    std::vector<std::vector<DiagramPoint>> points(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (diagrams[i].degree != spec.degree) {
            throw DimensionMismatch("distance_matrix: diagram " + std::to_string(i) + " has degree " +
                                    std::to_string(diagrams[i].degree));
        }
        points[i] = resolve_points(diagrams[i], spec.infinite_policy);
    }

    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) cells.emplace_back(i, j);

    DatasetDistanceMatrix out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                              std::move(labels)};
    std::vector<double> values(cells.size());
    parallel_for(cells.size(), [&](std::size_t c) {
        values[c] = wasserstein(points[cells[c].first], points[cells[c].second], spec.p);
    }, threads);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto i = static_cast<Eigen::Index>(cells[c].first);
        const auto j = static_cast<Eigen::Index>(cells[c].second);
        out.entries(i, j) = values[c];
        out.entries(j, i) = values[c];
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV: header row and first column carry the labels; 12 significant digits.
// ---------------------------------------------------------------------------

inline void write_distance_csv(const DatasetDistanceMatrix& m, std::ostream& out, int digits = 12) {
    out << "dataset";
    for (const auto& l : m.labels) {
        check_csv_field(l);
        out << ',' << l;
    }
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.labels[i];
        for (std::size_t j = 0; j < m.size(); ++j) {
            out << ',' << format_real(m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), digits);
        }
        out << '\n';
    }
}

inline void write_distance_csv(const DatasetDistanceMatrix& m, const std::filesystem::path& path, int digits = 12) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_distance_csv(m, out, digits);
}

inline DatasetDistanceMatrix read_distance_csv(std::istream& in, const std::string& source = "distances") {
    std::string line;
    if (!std::getline(in, line)) throw IoError(source + ": empty file");
    auto header = split_csv_line(line);
    DatasetDistanceMatrix m;
    m.labels.assign(header.begin() + 1, header.end());
    const auto n = static_cast<Eigen::Index>(m.labels.size());
    m.entries = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (row >= n || static_cast<Eigen::Index>(f.size()) != n + 1) {
            throw IoError(source + ": row " + std::to_string(row + 1) + " has the wrong shape");
        }
        for (Eigen::Index j = 0; j < n; ++j) m.entries(row, j) = parse_real(f[static_cast<std::size_t>(j + 1)]);
        ++row;
    }
    if (row != n) throw IoError(source + ": expected " + std::to_string(n) + " rows, found " + std::to_string(row));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (m.entries(i, i) != 0.0) throw ValidationError(source + ": nonzero diagonal entry");
        for (Eigen::Index j = 0; j < i; ++j) {
            if (m.entries(i, j) != m.entries(j, i)) throw ValidationError(source + ": matrix not symmetric");
            if (!(m.entries(i, j) >= 0.0)) throw ValidationError(source + ": negative distance");
        }
    }
    return m;
}

inline DatasetDistanceMatrix read_distance_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_distance_csv(in, path.string());
}

}  // namespace hiertopo

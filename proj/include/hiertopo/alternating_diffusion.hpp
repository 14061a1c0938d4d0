#pragma once

// Symmetric alternating diffusion between two or three samples and the
// inverse-Frobenius weight V attached to edges and triangles.

#include <hiertopo/diffusion.hpp>
#include <hiertopo/errors.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace hiertopo {

using VertexId = std::uint32_t;

/// S = K1 K2^T + K2 K1^T for the edge (first, second).
struct PairOperator {
    Matrix entries;
    std::array<VertexId, 2> pair{};
};

/// S = S12 K3^T + K3 S12 + S23 K1^T + K1 S23 + S13 K2^T + K2 S13.
struct TripleOperator {
    Matrix entries;
    std::array<VertexId, 3> triple{};
};

inline PairOperator pair_operator(const DiffusionOperator& k1, const DiffusionOperator& k2,
                                  std::array<VertexId, 2> ids = {0, 1}) {
    if (k1.size() != k2.size()) {
        throw DimensionMismatch("pair_operator: operators have sizes " + std::to_string(k1.size()) +
                                " and " + std::to_string(k2.size()));
    }
    // K2 K1^T = (K1 K2^T)^T, so S = X + X^T, exactly symmetric.
    const Matrix x = k1.entries() * k2.entries().transpose();
    return {x + x.transpose(), ids};
}

inline TripleOperator triple_operator(const DiffusionOperator& k1, const DiffusionOperator& k2,
                                      const DiffusionOperator& k3, const PairOperator& s12,
                                      const PairOperator& s23, const PairOperator& s13,
                                      std::array<VertexId, 3> ids = {0, 1, 2}) {
    const auto L = k1.size();
    if (k2.size() != L || k3.size() != L || s12.entries.rows() != L || s23.entries.rows() != L ||
        s13.entries.rows() != L || s12.entries.cols() != L || s23.entries.cols() != L ||
        s13.entries.cols() != L) {
        throw DimensionMismatch("triple_operator: inconsistent operator sizes");
    }
    // Each pair operator is symmetric, so S_ab K_c^T = (K_c S_ab)^T and the
    // whole sum is T + T^T with T = K3 S12 + K1 S23 + K2 S13.
    Matrix t = k3.entries() * s12.entries;
    t.noalias() += k1.entries() * s23.entries;
    t.noalias() += k2.entries() * s13.entries;
    return {t + t.transpose(), ids};
}

/// 1 / ||S||_F.
inline double inverse_frobenius(const Matrix& s) {
    const double norm = std::sqrt(s.array().square().sum());
    if (!std::isfinite(norm)) throw ValidationError("weight: operator has non-finite entries");
    if (norm == 0.0) throw DegenerateError("weight: zero operator gives an infinite weight");
    return 1.0 / norm;
}

inline double edge_weight(const PairOperator& s) { return inverse_frobenius(s.entries); }
inline double triangle_weight(const TripleOperator& s) { return inverse_frobenius(s.entries); }

}  // namespace hiertopo

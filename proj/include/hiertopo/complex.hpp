#pragma once

// 2-skeleton simplicial complexes over the samples of a dataset, their
// weights V, and the sublevel filtration order.

#include <hiertopo/alternating_diffusion.hpp>
#include <hiertopo/errors.hpp>
#include <hiertopo/parallel.hpp>
#include <hiertopo/text.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hiertopo {

/// A vertex, edge or triangle given by strictly increasing vertex ids.
class Simplex {
public:
    static Simplex vertex(VertexId a) { return Simplex({a, 0, 0}, 1); }

    static Simplex edge(VertexId a, VertexId b) {
        if (a > b) std::swap(a, b);
        if (a == b) throw ValidationError("edge needs two distinct vertices");
        return Simplex({a, b, 0}, 2);
    }

    static Simplex triangle(VertexId a, VertexId b, VertexId c) {
        std::array<VertexId, 3> v{a, b, c};
        std::sort(v.begin(), v.end());
        if (v[0] == v[1] || v[1] == v[2]) throw ValidationError("triangle needs three distinct vertices");
        return Simplex(v, 3);
    }

    int dimension() const noexcept { return count_ - 1; }
    std::size_t vertex_count() const noexcept { return count_; }
    VertexId operator[](std::size_t i) const noexcept { return v_[i]; }
    std::span<const VertexId> vertices() const noexcept { return {v_.data(), count_}; }

    /// Codimension-1 faces, in lexicographic order. Empty for a vertex.
    std::vector<Simplex> facets() const {
        switch (count_) {
            case 2: return {vertex(v_[0]), vertex(v_[1])};
            case 3: return {edge(v_[0], v_[1]), edge(v_[0], v_[2]), edge(v_[1], v_[2])};
            default: return {};
        }
    }

    // Packs dimension and ids into one integer; ids must be < 2^21.
    std::uint64_t key() const noexcept {
        std::uint64_t k = count_;
        for (std::size_t i = 0; i < 3; ++i) k = (k << 21) | (i < count_ ? v_[i] : 0u);
        return k;
    }

    // Lexicographic on the vertex tuple; a proper prefix sorts first.
    friend std::strong_ordering operator<=>(const Simplex& a, const Simplex& b) noexcept {
        return std::lexicographical_compare_three_way(a.v_.begin(), a.v_.begin() + a.count_,
                                                      b.v_.begin(), b.v_.begin() + b.count_);
    }
    friend bool operator==(const Simplex& a, const Simplex& b) noexcept {
        return (a <=> b) == std::strong_ordering::equal;
    }

private:
    Simplex(std::array<VertexId, 3> v, std::uint8_t count) : v_(v), count_(count) {}

    std::array<VertexId, 3> v_{};
    std::uint8_t count_ = 0;
};

inline std::string to_string(const Simplex& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.vertex_count(); ++i) {
        if (i) out += ',';
        out += std::to_string(s[i]);
    }
    return out + "]";
}

using Skeleton = std::vector<Simplex>;

inline Skeleton complete_skeleton(std::size_t n_vertices) {
    if (n_vertices < 2) throw ParameterError("complete_skeleton: need at least 2 vertices");
    const auto n = static_cast<VertexId>(n_vertices);
    Skeleton out;
    out.reserve(n_vertices + n_vertices * (n_vertices - 1) / 2 +
                n_vertices * (n_vertices - 1) * (n_vertices - 2) / 6);
    for (VertexId a = 0; a < n; ++a) out.push_back(Simplex::vertex(a));
    for (VertexId a = 0; a < n; ++a)
        for (VertexId b = a + 1; b < n; ++b) out.push_back(Simplex::edge(a, b));
    for (VertexId a = 0; a < n; ++a)
        for (VertexId b = a + 1; b < n; ++b)
            for (VertexId c = b + 1; c < n; ++c) out.push_back(Simplex::triangle(a, b, c));
    return out;
}

/// Triangulated rows x cols grid, vertex id = r * cols + c. Every unit
/// square gets the diagonal from its top-left to its bottom-right corner and
/// the two triangles on either side of it.
inline Skeleton grid_skeleton(std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2) {
        throw ShapeError("grid_skeleton: degenerate " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " grid");
    }
    auto id = [cols](std::size_t r, std::size_t c) { return static_cast<VertexId>(r * cols + c); };
    Skeleton out;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out.push_back(Simplex::vertex(id(r, c)));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) out.push_back(Simplex::edge(id(r, c), id(r, c + 1)));
            if (r + 1 < rows) out.push_back(Simplex::edge(id(r, c), id(r + 1, c)));
            if (r + 1 < rows && c + 1 < cols) out.push_back(Simplex::edge(id(r, c), id(r + 1, c + 1)));
        }
    }
    for (std::size_t r = 0; r + 1 < rows; ++r) {
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            out.push_back(Simplex::triangle(id(r, c), id(r, c + 1), id(r + 1, c + 1)));
            out.push_back(Simplex::triangle(id(r, c), id(r + 1, c), id(r + 1, c + 1)));
        }
    }
    return out;
}

/// Simplexes with a parallel weight array. Construction checks closure
/// under faces, uniqueness, and finite weights; monotonicity is only
/// guaranteed after enforce_monotone.
class WeightedComplex {
public:
    WeightedComplex(std::vector<Simplex> simplexes, std::vector<double> weights)
        : simplexes_(std::move(simplexes)), weights_(std::move(weights)) {
        if (simplexes_.size() != weights_.size()) {
            throw DimensionMismatch("complex: " + std::to_string(simplexes_.size()) + " simplexes but " +
                                    std::to_string(weights_.size()) + " weights");
        }
        index_.reserve(simplexes_.size());
        for (std::size_t i = 0; i < simplexes_.size(); ++i) {
            if (!std::isfinite(weights_[i])) {
                throw ValidationError("complex: non-finite weight on " + to_string(simplexes_[i]));
            }
            if (!index_.emplace(simplexes_[i].key(), i).second) {
                throw ValidationError("complex: duplicate simplex " + to_string(simplexes_[i]));
            }
            if (simplexes_[i].dimension() == 0) ++vertex_count_;
        }
        for (const auto& s : simplexes_) {
            for (const auto v : s.vertices()) {
                if (v >= vertex_count_) {
                    throw ValidationError("complex: vertex id " + std::to_string(v) + " out of range [0, " +
                                          std::to_string(vertex_count_) + ")");
                }
            }
            for (const auto& f : s.facets()) {
                if (!index_.contains(f.key())) {
                    throw ValidationError("complex: face " + to_string(f) + " of " + to_string(s) +
                                          " is missing");
                }
            }
        }
    }

    std::size_t size() const noexcept { return simplexes_.size(); }
    std::size_t vertex_count() const noexcept { return vertex_count_; }
    const std::vector<Simplex>& simplexes() const noexcept { return simplexes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const Simplex& simplex(std::size_t i) const { return simplexes_.at(i); }
    double weight(std::size_t i) const { return weights_.at(i); }

    std::optional<std::size_t> find(const Simplex& s) const {
        const auto it = index_.find(s.key());
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(const Simplex& s) const {
        const auto it = index_.find(s.key());
        if (it == index_.end()) throw ValidationError("complex: no simplex " + to_string(s));
        return it->second;
    }

    std::size_t count_of_dimension(int dim) const {
        return static_cast<std::size_t>(std::count_if(simplexes_.begin(), simplexes_.end(),
                                                      [dim](const Simplex& s) { return s.dimension() == dim; }));
    }

    bool is_monotone() const {
        for (std::size_t i = 0; i < simplexes_.size(); ++i) {
            for (const auto& f : simplexes_[i].facets()) {
                if (weights_[index_of(f)] > weights_[i]) return false;
            }
        }
        return true;
    }

    double max_weight() const {
        return weights_.empty() ? 0.0 : *std::max_element(weights_.begin(), weights_.end());
    }

private:
    std::vector<Simplex> simplexes_;
    std::vector<double> weights_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
    std::size_t vertex_count_ = 0;
};

/// V'(s) = max(V(s), max over facets f of V'(f)), by increasing dimension.
inline WeightedComplex enforce_monotone(const WeightedComplex& complex) {
    std::vector<double> w = complex.weights();
    for (int dim = 1; dim <= 2; ++dim) {
        for (std::size_t i = 0; i < complex.size(); ++i) {
            const auto& s = complex.simplex(i);
            if (s.dimension() != dim) continue;
            for (const auto& f : s.facets()) w[i] = std::max(w[i], w[complex.index_of(f)]);
        }
    }
    return WeightedComplex(complex.simplexes(), std::move(w));
}

/// Simplex indices sorted by (weight, dimension, vertex tuple). On a
/// monotone complex every face precedes its cofaces.
inline std::vector<std::size_t> filtration_order(const WeightedComplex& complex) {
    std::vector<std::size_t> order(complex.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& w = complex.weights();
    const auto& s = complex.simplexes();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (w[a] != w[b]) return w[a] < w[b];
        if (s[a].dimension() != s[b].dimension()) return s[a].dimension() < s[b].dimension();
        return s[a] < s[b];
    });
    return order;
}

// ---------------------------------------------------------------------------
// Weight assignment
// ---------------------------------------------------------------------------

struct WeightOptions {
    // Divide edge/triangle weights by their median before enforcement.
    bool normalize_by_median = false;
    unsigned threads = 0;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 1.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

inline WeightedComplex finish_weights(Skeleton skeleton, std::vector<double> w, const WeightOptions& opt) {
    if (opt.normalize_by_median) {
        std::vector<double> positive;
        for (std::size_t i = 0; i < skeleton.size(); ++i) {
            if (skeleton[i].dimension() > 0) positive.push_back(w[i]);
        }
        const double m = median_of(std::move(positive));
        if (!(m > 0.0)) throw DegenerateError("weight normalization: median weight is not positive");
        for (std::size_t i = 0; i < skeleton.size(); ++i) {
            if (skeleton[i].dimension() > 0) w[i] /= m;
        }
    }
    return enforce_monotone(WeightedComplex(std::move(skeleton), std::move(w)));
}

template <typename Fn>
auto tag_simplex(const Simplex& s, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        const char* kind = s.dimension() == 1 ? "edge " : "triangle ";
        throw Error(kind + to_string(s) + ": " + e.what());
    }
}

}  // namespace detail

/// Generic weighting: vertices get 0, edges get edge_fn(a, b), triangles get
/// triangle_fn(a, b, c, edge weights of [a,b], [b,c], [a,c]). Evaluated in
/// parallel over simplexes; monotonicity enforced afterwards.
template <typename EdgeFn, typename TriangleFn>
WeightedComplex assign_weights_with(Skeleton skeleton, EdgeFn&& edge_fn, TriangleFn&& triangle_fn,
                                    const WeightOptions& opt = {}) {
    std::vector<double> w(skeleton.size(), 0.0);
    std::vector<std::size_t> edges, triangles;
    std::unordered_map<std::uint64_t, std::size_t> where;
    for (std::size_t i = 0; i < skeleton.size(); ++i) {
        where.emplace(skeleton[i].key(), i);
        if (skeleton[i].dimension() == 1) edges.push_back(i);
        if (skeleton[i].dimension() == 2) triangles.push_back(i);
    }
    parallel_for(edges.size(), [&](std::size_t e) {
        const auto& s = skeleton[edges[e]];
        w[edges[e]] = detail::tag_simplex(s, [&] { return edge_fn(s[0], s[1]); });
    }, opt.threads);
    auto edge_at = [&](VertexId a, VertexId b) -> std::size_t {
        const auto it = where.find(Simplex::edge(a, b).key());
        if (it == where.end()) throw ValidationError("face " + to_string(Simplex::edge(a, b)) + " missing");
        return it->second;
    };
    parallel_for(triangles.size(), [&](std::size_t t) {
        const auto& s = skeleton[triangles[t]];
        w[triangles[t]] = detail::tag_simplex(s, [&] {
            return triangle_fn(s[0], s[1], s[2], w[edge_at(s[0], s[1])], w[edge_at(s[1], s[2])],
                               w[edge_at(s[0], s[2])]);
        });
    }, opt.threads);
    return detail::finish_weights(std::move(skeleton), std::move(w), opt);
}

/// Raw alternating-diffusion weights, parallel to `skeleton`: 0 for
/// vertices, 1/||S_ab||_F for edges, 1/||S_abc||_F for triangles. The
/// triangle operator reuses the pair operators of its three edges.
inline std::vector<double> alternating_diffusion_weights(const Skeleton& skeleton,
                                                         std::span<const DiffusionOperator> operators,
                                                         unsigned threads = 0) {
    if (operators.empty()) throw ParameterError("assign_weights: no operators");
    const auto L = operators.front().size();
    for (const auto& k : operators) {
        if (k.size() != L) throw DimensionMismatch("assign_weights: operators differ in size");
    }
    std::size_t n_vertices = 0;
    bool has_triangles = false;
    for (const auto& s : skeleton) {
        if (s.dimension() == 0) ++n_vertices;
        if (s.dimension() == 2) has_triangles = true;
    }
    if (n_vertices != operators.size()) {
        throw DimensionMismatch("assign_weights: " + std::to_string(n_vertices) + " vertices but " +
                                std::to_string(operators.size()) + " operators");
    }

    // Pair operators indexed by skeleton position, kept for triangle reuse.
    std::vector<PairOperator> pairs(has_triangles ? skeleton.size() : 0);

    std::vector<double> w(skeleton.size(), 0.0);
    std::vector<std::size_t> edges, triangles;
    std::unordered_map<std::uint64_t, std::size_t> where;
    for (std::size_t i = 0; i < skeleton.size(); ++i) {
        where.emplace(skeleton[i].key(), i);
        if (skeleton[i].dimension() == 1) edges.push_back(i);
        if (skeleton[i].dimension() == 2) triangles.push_back(i);
    }
    parallel_for(edges.size(), [&](std::size_t e) {
        const std::size_t i = edges[e];
        const auto& s = skeleton[i];
        w[i] = detail::tag_simplex(s, [&] {
            PairOperator p = pair_operator(operators[s[0]], operators[s[1]], {s[0], s[1]});
            const double v = edge_weight(p);
            if (has_triangles) pairs[i] = std::move(p);
            return v;
        });
    }, threads);

    auto pair_at = [&](VertexId a, VertexId b) -> const PairOperator& {
        const auto it = where.find(Simplex::edge(a, b).key());
        if (it == where.end()) throw ValidationError("face " + to_string(Simplex::edge(a, b)) + " missing");
        return pairs[it->second];
    };
    parallel_for(triangles.size(), [&](std::size_t t) {
        const std::size_t i = triangles[t];
        const auto& s = skeleton[i];
        w[i] = detail::tag_simplex(s, [&] {
            const TripleOperator op =
                triple_operator(operators[s[0]], operators[s[1]], operators[s[2]], pair_at(s[0], s[1]),
                                pair_at(s[1], s[2]), pair_at(s[0], s[2]), {s[0], s[1], s[2]});
            return triangle_weight(op);
        });
    }, threads);
    return w;
}

/// Alternating-diffusion weights followed by (optional) median
/// normalization and monotonicity enforcement.
inline WeightedComplex assign_weights(Skeleton skeleton, std::span<const DiffusionOperator> operators,
                                      const WeightOptions& opt = {}) {
    auto w = alternating_diffusion_weights(skeleton, operators, opt.threads);
    return detail::finish_weights(std::move(skeleton), std::move(w), opt);
}

// ---------------------------------------------------------------------------
// CSV: dim,v0,v1,v2,weight with blank unused vertex slots.
// ---------------------------------------------------------------------------

inline void write_complex_csv(const WeightedComplex& complex, std::ostream& out) {
    out << "dim,v0,v1,v2,weight\n";
    for (std::size_t i = 0; i < complex.size(); ++i) {
        const auto& s = complex.simplex(i);
        out << s.dimension();
        for (std::size_t k = 0; k < 3; ++k) {
            out << ',';
            if (k < s.vertex_count()) out << s[k];
        }
        out << ',' << format_real(complex.weight(i)) << '\n';
    }
}

inline void write_complex_csv(const WeightedComplex& complex, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_complex_csv(complex, out);
}

inline WeightedComplex read_complex_csv(std::istream& in, const std::string& source = "complex") {
    std::string line;
    if (!std::getline(in, line)) throw IoError(source + ": empty file");
    std::vector<Simplex> simplexes;
    std::vector<double> weights;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw IoError(source + ":" + std::to_string(line_no) + ": expected 5 fields");
        const auto dim = parse_integer(f[0]);
        auto vid = [&](std::size_t k) { return static_cast<VertexId>(parse_integer(f[k])); };
        switch (dim) {
            case 0: simplexes.push_back(Simplex::vertex(vid(1))); break;
            case 1: simplexes.push_back(Simplex::edge(vid(1), vid(2))); break;
            case 2: simplexes.push_back(Simplex::triangle(vid(1), vid(2), vid(3))); break;
            default: throw IoError(source + ":" + std::to_string(line_no) + ": unsupported dimension");
        }
        weights.push_back(parse_real(f[4]));
    }
    return WeightedComplex(std::move(simplexes), std::move(weights));
}

inline WeightedComplex read_complex_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_complex_csv(in, path.string());
}

}  // namespace hiertopo

#pragma once

// Z/2 persistent homology of a weighted 2-skeleton via the standard
// left-to-right column reduction of the filtered boundary matrix.

#include <hiertopo/complex.hpp>
#include <hiertopo/errors.hpp>
#include <hiertopo/text.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace hiertopo {

/// Combined boundary matrix over all simplexes in filtration order. Column j
/// lists, in increasing order, the filtration positions of the facets of the
/// j-th simplex.
struct BoundaryMatrix {
    std::vector<std::vector<std::size_t>> columns;
    std::vector<std::size_t> order;  // position -> simplex index in the complex
    std::vector<int> dimensions;     // position -> simplex dimension
};

inline BoundaryMatrix boundary_matrix(const WeightedComplex& complex, const std::vector<std::size_t>& order) {
    if (order.size() != complex.size()) {
        throw DimensionMismatch("boundary_matrix: order has " + std::to_string(order.size()) +
                                " entries for " + std::to_string(complex.size()) + " simplexes");
    }
    constexpr auto unseen = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> position(complex.size(), unseen);
    for (std::size_t p = 0; p < order.size(); ++p) {
        if (order[p] >= complex.size() || position[order[p]] != unseen) {
            throw ValidationError("boundary_matrix: order is not a permutation");
        }
        position[order[p]] = p;
    }

    BoundaryMatrix m;
    m.order = order;
    m.columns.resize(order.size());
    m.dimensions.resize(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        const auto& s = complex.simplex(order[p]);
        m.dimensions[p] = s.dimension();
        auto& col = m.columns[p];
        for (const auto& f : s.facets()) {
            const auto idx = complex.find(f);
            if (!idx) throw ValidationError("boundary_matrix: face " + to_string(f) + " missing");
            const auto fp = position[*idx];
            if (fp >= p) {
                throw ValidationError("boundary_matrix: face " + to_string(f) + " does not precede " +
                                      to_string(s) + " in the filtration");
            }
            col.push_back(fp);
        }
        std::sort(col.begin(), col.end());
    }
    return m;
}

/// Output of the column reduction. `low[j]` is the pivot row of reduced
/// column j (or npos for a zero column); `partner[i]` links the two
/// positions of each persistence pair (npos when unpaired).
struct Reduction {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::vector<std::vector<std::size_t>> columns;
    std::vector<std::size_t> low;
    std::vector<std::size_t> partner;
};

inline Reduction reduce(const BoundaryMatrix& m) {
    const std::size_t n = m.columns.size();
    Reduction r;
    r.columns = m.columns;
    r.low.assign(n, Reduction::npos);
    r.partner.assign(n, Reduction::npos);
    std::vector<std::size_t> column_with_low(n, Reduction::npos);
    std::vector<std::size_t> scratch;

    for (std::size_t j = 0; j < n; ++j) {
        auto& col = r.columns[j];
        while (!col.empty()) {
            const std::size_t pivot = col.back();
            const std::size_t other = column_with_low[pivot];
            if (other == Reduction::npos) break;
            // col ^= columns[other] over Z/2 (both sorted).
            const auto& add = r.columns[other];
            scratch.clear();
            std::set_symmetric_difference(col.begin(), col.end(), add.begin(), add.end(),
                                          std::back_inserter(scratch));
            col.swap(scratch);
        }
        if (!col.empty()) {
            const std::size_t pivot = col.back();
            r.low[j] = pivot;
            column_with_low[pivot] = j;
            r.partner[pivot] = j;
            r.partner[j] = pivot;
        }
    }
    return r;
}

struct PersistencePair {
    int degree = 0;
    double birth = 0.0;
    double death = std::numeric_limits<double>::infinity();
    std::size_t birth_simplex = Reduction::npos;
    std::size_t death_simplex = Reduction::npos;  // npos for essential classes

    bool infinite() const noexcept { return std::isinf(death); }
};

struct PersistenceDiagram {
    int degree = 0;
    std::vector<PersistencePair> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
};

/// How classes that never die are reported.
struct EssentialPolicy {
    enum class Kind { infinite, cap_at_max_weight } kind = Kind::infinite;

    static EssentialPolicy infinite() { return {}; }
    static EssentialPolicy cap_at_max_weight() { return {Kind::cap_at_max_weight}; }
};

/// Degree-k diagram from a reduction. Zero-persistence pairs are dropped.
inline PersistenceDiagram extract_diagram(const Reduction& r, const BoundaryMatrix& m,
                                          const WeightedComplex& complex, int degree,
                                          EssentialPolicy policy = EssentialPolicy::infinite()) {
    if (degree < 0 || degree > 1) {
        throw ParameterError("extract_diagram: degree must be 0 or 1, got " + std::to_string(degree));
    }
    PersistenceDiagram pd;
    pd.degree = degree;
    const double cap = complex.max_weight();
    for (std::size_t p = 0; p < m.columns.size(); ++p) {
        if (m.dimensions[p] != degree || r.low[p] != Reduction::npos) continue;  // negative column
        PersistencePair pair;
        pair.degree = degree;
        pair.birth_simplex = m.order[p];
        pair.birth = complex.weight(pair.birth_simplex);
        if (r.partner[p] != Reduction::npos) {
            pair.death_simplex = m.order[r.partner[p]];
            pair.death = complex.weight(pair.death_simplex);
            if (pair.death == pair.birth) continue;
        } else if (policy.kind == EssentialPolicy::Kind::cap_at_max_weight) {
            pair.death = cap;
            if (pair.death == pair.birth) continue;
        }
        pd.pairs.push_back(pair);
    }
    return pd;
}

struct PersistenceResult {
    PersistenceDiagram degree0;
    PersistenceDiagram degree1;
};

/// Filtration order, boundary matrix, reduction, and both diagrams.
inline PersistenceResult compute_persistence(const WeightedComplex& complex,
                                             EssentialPolicy policy = EssentialPolicy::infinite()) {
    const auto order = filtration_order(complex);
    const auto m = boundary_matrix(complex, order);
    const auto r = reduce(m);
    return {extract_diagram(r, m, complex, 0, policy), extract_diagram(r, m, complex, 1, policy)};
}

// ---------------------------------------------------------------------------
// CSV: degree,birth,death with death = inf for essential classes.
// ---------------------------------------------------------------------------

inline void write_diagrams_csv(const std::vector<PersistenceDiagram>& diagrams, std::ostream& out) {
    out << "degree,birth,death\n";
    for (const auto& pd : diagrams) {
        for (const auto& p : pd.pairs) {
            out << p.degree << ',' << format_real(p.birth) << ',' << format_real(p.death) << '\n';
        }
    }
}

inline void write_diagrams_csv(const std::vector<PersistenceDiagram>& diagrams,
                               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_diagrams_csv(diagrams, out);
}

/// Reads the pairs of one degree. Simplex ids are not stored in the file.
inline PersistenceDiagram read_diagram_csv(std::istream& in, int degree, const std::string& source = "diagram") {
    std::string line;
    if (!std::getline(in, line)) throw IoError(source + ": empty file");
    PersistenceDiagram pd;
    pd.degree = degree;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw IoError(source + ":" + std::to_string(line_no) + ": expected 3 fields");
        if (parse_integer(f[0]) != degree) continue;
        PersistencePair p;
        p.degree = degree;
        p.birth = parse_real(f[1]);
        p.death = parse_real(f[2]);
        if (!(p.birth <= p.death)) {
            throw IoError(source + ":" + std::to_string(line_no) + ": birth exceeds death");
        }
        pd.pairs.push_back(p);
    }
    return pd;
}

inline PersistenceDiagram read_diagram_csv(const std::filesystem::path& path, int degree) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_diagram_csv(in, degree, path.string());
}

}  // namespace hiertopo

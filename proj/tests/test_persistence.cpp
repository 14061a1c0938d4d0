#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include <hiertopo/persistence.hpp>

#include <limits>
#include <sstream>

using namespace hiertopo;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

WeightedComplex hollow_triangle() {
    return WeightedComplex({Simplex::vertex(0), Simplex::vertex(1), Simplex::vertex(2), Simplex::edge(0, 1),
                            Simplex::edge(1, 2), Simplex::edge(0, 2)},
                           {0, 0, 0, 1, 2, 3});
}

WeightedComplex filled_triangle() {
    return WeightedComplex({Simplex::vertex(0), Simplex::vertex(1), Simplex::vertex(2), Simplex::edge(0, 1),
                            Simplex::edge(1, 2), Simplex::edge(0, 2), Simplex::triangle(0, 1, 2)},
                           {0, 0, 0, 1, 2, 3, 4});
}

using Points = std::multiset<std::pair<double, double>>;

}  // namespace

TEST_CASE("boundary matrix columns", "[persistence]") {
    const auto c = filled_triangle();
    const auto order = filtration_order(c);
    const auto m = boundary_matrix(c, order);
    REQUIRE(m.columns.size() == 7);
    CHECK(m.columns[3] == std::vector<std::size_t>{0, 1});  // edge [0,1] after vertices 0,1
    CHECK(m.columns[6].size() == 3);
    for (auto p : m.columns[6]) CHECK(m.dimensions[p] == 1);

    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto x = oracle::random_complex(rng);
        const auto b = boundary_matrix(x, filtration_order(x));
        for (std::size_t j = 0; j < b.columns.size(); ++j) {
            std::map<std::size_t, int> hits;
            for (auto f : b.columns[j])
                for (auto g : b.columns[f]) ++hits[g];
            for (const auto& [row, n] : hits) CHECK(n % 2 == 0);
        }
    }
}

TEST_CASE("boundary matrix rejects invalid orders", "[persistence]") {
    const auto c = hollow_triangle();
    CHECK_THROWS_AS(boundary_matrix(c, {0, 1, 2, 3, 4}), DimensionMismatch);
    CHECK_THROWS_AS(boundary_matrix(c, {3, 0, 1, 2, 4, 5}), ValidationError);
    CHECK_THROWS_AS(boundary_matrix(c, {0, 0, 1, 2, 3, 4}), ValidationError);
}

TEST_CASE("hollow and filled triangles", "[persistence]") {
    const auto hollow = compute_persistence(hollow_triangle());
    CHECK(oracle::as_multiset(hollow.degree0) == Points{{0, 1}, {0, 2}, {0, inf}});
    CHECK(oracle::as_multiset(hollow.degree1) == Points{{3, inf}});

    const auto filled = compute_persistence(filled_triangle());
    CHECK(oracle::as_multiset(filled.degree0) == Points{{0, 1}, {0, 2}, {0, inf}});
    CHECK(oracle::as_multiset(filled.degree1) == Points{{3, 4}});

    const auto capped = compute_persistence(hollow_triangle(), EssentialPolicy::cap_at_max_weight());
    CHECK(oracle::as_multiset(capped.degree0) == Points{{0, 1}, {0, 2}, {0, 3}});
    CHECK(capped.degree1.size() == 0);  // (3, 3) has zero persistence
}

TEST_CASE("two disjoint edges", "[persistence]") {
    const WeightedComplex c({Simplex::vertex(0), Simplex::vertex(1), Simplex::vertex(2), Simplex::vertex(3),
                             Simplex::edge(0, 1), Simplex::edge(2, 3)},
                            {0, 0, 0, 0, 1.5, 2.5});
    const auto ph = compute_persistence(c);
    CHECK(oracle::as_multiset(ph.degree0) == Points{{0, 1.5}, {0, 2.5}, {0, inf}, {0, inf}});
    CHECK(ph.degree1.size() == 0);
}

TEST_CASE("degree-0 counts", "[persistence]") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        const auto c = oracle::random_complex(rng);
        const auto ph = compute_persistence(c);
        // every vertex is born at 0; zero-length merges are dropped, so the
        // kept pairs plus same-level merges account for every vertex
        std::size_t zero_edges = 0;
        const auto order = filtration_order(c);
        const auto m = boundary_matrix(c, order);
        const auto r = reduce(m);
        for (std::size_t p = 0; p < m.columns.size(); ++p)
            if (m.dimensions[p] == 1 && r.low[p] != Reduction::npos && c.weight(order[p]) == 0.0) ++zero_edges;
        CHECK(ph.degree0.size() + zero_edges == c.vertex_count());
    }
    const auto complete = compute_persistence(
        enforce_monotone(WeightedComplex(complete_skeleton(6), std::vector<double>(41, 1.0))));
    std::size_t essential = 0;
    for (const auto& p : complete.degree0.pairs) essential += p.infinite();
    CHECK(essential == 1);
}

TEST_CASE("reduction agrees with the rank oracle", "[persistence]") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 60; ++t) {
        const auto c = oracle::random_complex(rng);
        const oracle::RankOracle rank(c);
        const auto ph = compute_persistence(c);
        CHECK(oracle::as_multiset(ph.degree0) == rank.diagram(0));
        CHECK(oracle::as_multiset(ph.degree1) == rank.diagram(1));
    }
}

TEST_CASE("diagram CSV round trip", "[persistence][io]") {
    const auto ph = compute_persistence(hollow_triangle());
    std::stringstream buffer;
    write_diagrams_csv({ph.degree0, ph.degree1}, buffer);
    CHECK(buffer.str().find("1,3,inf") != std::string::npos);
    const std::string text = buffer.str();
    std::stringstream a(text), b(text);
    CHECK(oracle::as_multiset(read_diagram_csv(a, 0)) == oracle::as_multiset(ph.degree0));
    CHECK(oracle::as_multiset(read_diagram_csv(b, 1)) == oracle::as_multiset(ph.degree1));
    CHECK_THROWS_AS(extract_diagram(reduce(boundary_matrix(hollow_triangle(), filtration_order(hollow_triangle()))),
                                    boundary_matrix(hollow_triangle(), filtration_order(hollow_triangle())),
                                    hollow_triangle(), 2),
                    ParameterError);
}

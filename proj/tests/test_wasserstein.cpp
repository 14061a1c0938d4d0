#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include <hiertopo/assignment.hpp>
#include <hiertopo/wasserstein.hpp>

#include <limits>
#include <numeric>
#include <sstream>

using namespace hiertopo;
using Catch::Approx;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

PersistenceDiagram diagram(int degree, std::vector<std::pair<double, double>> points) {
    PersistenceDiagram pd;
    pd.degree = degree;
    for (const auto& [b, d] : points) {
        PersistencePair p;
        p.degree = degree;
        p.birth = b;
        p.death = d;
        pd.pairs.push_back(p);
    }
    return pd;
}

}  // namespace

TEST_CASE("assignment solver finds the minimum", "[wasserstein]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int t = 0; t < 30; ++t) {
        const Eigen::Index n = 1 + t % 6;
        Eigen::MatrixXd cost(n, n);
        for (Eigen::Index i = 0; i < cost.size(); ++i) cost.data()[i] = u(rng);
        const auto match = solve_assignment(cost);
        double got = 0.0;
        for (std::size_t i = 0; i < match.size(); ++i) got += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(match[i]));
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        double best = inf;
        do {
            double s = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) s += cost(i, perm[static_cast<std::size_t>(i)]);
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(got == Approx(best).epsilon(1e-12));
    }
    CHECK(solve_assignment(Eigen::MatrixXd(0, 0)).empty());
    CHECK_THROWS_AS(solve_assignment(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("diagonal gap", "[wasserstein]") {
    CHECK(diagonal_gap({1, 3}) == Approx(1.414214).margin(5e-7));
    CHECK(diagonal_gap({2.5, 2.5}) == 0.0);
    CHECK(diagonal_gap({0, 4}) == Approx(2.828427).margin(5e-7));
    CHECK_THROWS_AS(diagonal_gap({0, inf}), ValidationError);
}

TEST_CASE("small Wasserstein cases", "[wasserstein]") {
    CHECK(wasserstein({{1, 3}}, {}, 2.0) == Approx(std::sqrt(2.0)));
    CHECK(wasserstein({{0, 2}}, {{0, 4}}, 2.0) == Approx(2.0));
    CHECK(wasserstein({}, {}, 1.0) == 0.0);
    const std::vector<DiagramPoint> a{{0, 1}, {0.5, 3}, {2, 2.25}};
    CHECK(wasserstein(a, a, 2.0) == 0.0);
    CHECK_THROWS_AS(wasserstein(a, a, 0.5), ParameterError);
}

TEST_CASE("Wasserstein matches exhaustive matching", "[wasserstein]") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 60; ++t) {
        const auto a = oracle::random_points(rng, 5);
        const auto b = oracle::random_points(rng, 5);
        for (double p : {1.0, 2.0}) {
            CHECK(wasserstein(a, b, p) == Approx(oracle::exhaustive_wasserstein(a, b, p)).margin(1e-9));
        }
    }
}

TEST_CASE("infinite-death policies", "[wasserstein]") {
    const auto a = diagram(1, {{1, 2}, {0.5, inf}});
    const auto b = diagram(1, {{1, 2}});
    DiagramDistanceSpec spec;
    CHECK(wasserstein(a, b, spec) == 0.0);
    spec.infinite_policy = InfinitePolicy::cap(4.5);
    // (0.5, 4.5) takes the off-diagonal partner; (1, 2) pays its gap
    CHECK(wasserstein(a, b, spec) == Approx(std::sqrt(6.5 + 0.5)));
    spec.infinite_policy = InfinitePolicy::cap(inf);
    CHECK_THROWS_AS(wasserstein(a, b, spec), ParameterError);
    spec = {};
    spec.degree = 0;
    CHECK_THROWS_AS(wasserstein(a, b, spec), DimensionMismatch);
}

TEST_CASE("distance matrix", "[wasserstein]") {
    const auto d = diagram(1, {{0, 1}, {0.2, 0.9}});
    const auto same = distance_matrix({d, d, d, d}, {});
    CHECK(same.entries == Eigen::MatrixXd::Zero(4, 4));

    std::mt19937_64 rng(8);
    std::vector<PersistenceDiagram> ds;
    for (int i = 0; i < 5; ++i) {
        PersistenceDiagram pd;
        pd.degree = 1;
        for (const auto& p : oracle::random_points(rng, 4)) pd.pairs.push_back({1, p.birth, p.death});
        ds.push_back(pd);
    }
    const DiagramDistanceSpec spec;
    const auto m = distance_matrix(ds, spec, {}, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == 0.0);
        for (std::size_t j = 0; j < 5; ++j) {
            const auto ei = static_cast<Eigen::Index>(i), ej = static_cast<Eigen::Index>(j);
            CHECK(m.entries(ei, ej) == m.entries(ej, ei));
            if (i < j) CHECK(m.entries(ei, ej) == wasserstein(ds[i], ds[j], spec));
            for (std::size_t k = 0; k < 5; ++k) {
                CHECK(m.entries(ei, ej) <= m.entries(ei, static_cast<Eigen::Index>(k)) + m.entries(static_cast<Eigen::Index>(k), ej) + 1e-9);
            }
        }
    }
    CHECK(m.labels[3] == "dataset_3");
}

TEST_CASE("distance CSV round trip and validation", "[wasserstein][io]") {
    DatasetDistanceMatrix m{Eigen::MatrixXd::Zero(3, 3), {"a", "b", "c"}};
    m.entries(0, 1) = m.entries(1, 0) = 1.0 / 3.0;
    m.entries(0, 2) = m.entries(2, 0) = 2.0;
    m.entries(1, 2) = m.entries(2, 1) = 0.125;
    std::stringstream buffer;
    write_distance_csv(m, buffer);
    CHECK(buffer.str().rfind("dataset,a,b,c\n", 0) == 0);
    const auto back = read_distance_csv(buffer);
    CHECK(back.labels == m.labels);
    CHECK(back.entries(0, 1) == Approx(1.0 / 3.0).epsilon(1e-12));

    std::stringstream asym("dataset,a,b\na,0,1\nb,2,0\n");
    CHECK_THROWS_AS(read_distance_csv(asym), ValidationError);
    std::stringstream diag("dataset,a,b\na,1,1\nb,1,0\n");
    CHECK_THROWS_AS(read_distance_csv(diag), ValidationError);
    std::stringstream bad_label;
    DatasetDistanceMatrix comma{Eigen::MatrixXd::Zero(2, 2), {"x,y", "z"}};
    CHECK_THROWS_AS(write_distance_csv(comma, bad_label), ValidationError);
}

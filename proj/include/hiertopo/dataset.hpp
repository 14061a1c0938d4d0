#pragma once

// Hierarchical data containers: a Dataset holds N Samples, each Sample holds
// L corresponding observations (one per row). Also provides the synthetic
// product-of-circles generator and the cube-to-patches ingester.

#include <hiertopo/errors.hpp>
#include <hiertopo/text.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hiertopo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One sample S_i: an L x d_obs matrix whose row j is the observation of the
/// j-th latent realization. Immutable after construction.
class Sample {
public:
    Sample(Matrix observations, std::string label = {})
        : observations_(std::move(observations)), label_(std::move(label)) {
        if (observations_.rows() < 2) {
            throw ValidationError("sample '" + label_ + "' needs at least 2 observations, got " +
                                  std::to_string(observations_.rows()));
        }
        if (observations_.cols() < 1) {
            throw ValidationError("sample '" + label_ + "' has zero-dimensional observations");
        }
        if (!observations_.allFinite()) {
            throw ValidationError("sample '" + label_ + "' contains a non-finite entry");
        }
    }

    const Matrix& observations() const noexcept { return observations_; }
    const std::string& label() const noexcept { return label_; }
    Eigen::Index size() const noexcept { return observations_.rows(); }
    Eigen::Index dimension() const noexcept { return observations_.cols(); }

private:
    Matrix observations_;
    std::string label_;
};

using Metadata = std::map<std::string, std::string>;

/// A dataset D = {S_1, ..., S_N}. Observation index j refers to the same
/// latent realization in every sample, so every sample has the same L.
class Dataset {
public:
    Dataset(std::vector<Sample> samples, Metadata metadata = {})
        : samples_(std::move(samples)), metadata_(std::move(metadata)) {
        if (samples_.size() < 2) {
            throw ValidationError("dataset needs at least 2 samples, got " +
                                  std::to_string(samples_.size()));
        }
        const auto L = samples_.front().size();
        for (std::size_t i = 1; i < samples_.size(); ++i) {
            if (samples_[i].size() != L) {
                throw DimensionMismatch("sample " + std::to_string(i) + " has " +
                                        std::to_string(samples_[i].size()) +
                                        " observations, sample 0 has " + std::to_string(L));
            }
        }
    }

    const std::vector<Sample>& samples() const noexcept { return samples_; }
    const Sample& sample(std::size_t i) const { return samples_.at(i); }
    std::size_t size() const noexcept { return samples_.size(); }
    Eigen::Index observations_per_sample() const noexcept { return samples_.front().size(); }
    const Metadata& metadata() const noexcept { return metadata_; }

    // Convenience lookup; empty string when absent.
    std::string meta(const std::string& key) const {
        const auto it = metadata_.find(key);
        return it == metadata_.end() ? std::string{} : it->second;
    }

private:
    std::vector<Sample> samples_;
    Metadata metadata_;
};

// ---------------------------------------------------------------------------
// Synthetic torus data
// ---------------------------------------------------------------------------

struct TorusSpec {
    int circles = 3;        // M, number of latent circles
    int samples = 40;       // N
    int observations = 200; // L
    int tuple_size = 3;     // |I_i|
    double r_max = 15.0;
    double sigma = 0.1;
    std::uint64_t seed = 0;

    void validate() const {
        if (circles < 1) throw ParameterError("torus: circles (M) must be >= 1");
        if (samples < 2) throw ParameterError("torus: samples (N) must be >= 2");
        if (observations < 2) throw ParameterError("torus: observations (L) must be >= 2");
        if (tuple_size < 1 || tuple_size > circles) {
            throw ParameterError("torus: tuple_size must lie in [1, M]");
        }
        if (!(r_max >= 1.0) || !std::isfinite(r_max)) throw ParameterError("torus: r_max must be >= 1");
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("torus: sigma must be >= 0");
    }
};

/// Observations of one sample: row j is
/// (R_1 cos a_j(l_1), R_1 sin a_j(l_1), ..., R_k cos a_j(l_k), R_k sin a_j(l_k))
/// plus i.i.d. N(0, sigma^2) noise per coordinate. `angles` is L x M.
template <typename Rng>
Matrix torus_observations(const Matrix& angles, const std::vector<int>& circle_indices,
                          const std::vector<double>& radii, double sigma, Rng& rng) {
    if (circle_indices.size() != radii.size()) {
        throw DimensionMismatch("torus: one radius per circle index required");
    }
    const auto L = angles.rows();
    const auto k = static_cast<Eigen::Index>(circle_indices.size());
    Matrix obs(L, 2 * k);
    for (Eigen::Index j = 0; j < L; ++j) {
        for (Eigen::Index c = 0; c < k; ++c) {
            const int circle = circle_indices[static_cast<std::size_t>(c)];
            if (circle < 0 || circle >= angles.cols()) {
                throw ParameterError("torus: circle index out of range");
            }
            const double theta = angles(j, circle);
            const double r = radii[static_cast<std::size_t>(c)];
            obs(j, 2 * c) = r * std::cos(theta);
            obs(j, 2 * c + 1) = r * std::sin(theta);
        }
    }
    if (sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, sigma);
        for (Eigen::Index j = 0; j < L; ++j) {
            for (Eigen::Index c = 0; c < obs.cols(); ++c) {
                obs(j, c) += noise(rng);
            }
        }
    }
    return obs;
}

inline std::string format_index_tuple(const std::vector<int>& tuple) {
    std::string out;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(tuple[i]);
    }
    return out;
}

inline std::vector<int> parse_index_tuple(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

/// Product-of-circles dataset. Latent angles are drawn once (L x M, uniform
/// on [0, 2pi)); each sample picks `tuple_size` distinct circles uniformly
/// at random, draws its radii once from U[1, r_max], and adds per-coordinate
/// Gaussian noise. Circle ids are 0-based; metadata key "tuple.<i>" lists
/// the sorted ids of sample i.
inline Dataset generate_torus_dataset(const TorusSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    Matrix angles(spec.observations, spec.circles);
    for (Eigen::Index j = 0; j < angles.rows(); ++j) {
        for (Eigen::Index m = 0; m < angles.cols(); ++m) {
            angles(j, m) = angle(rng);
        }
    }

    Metadata meta{
        {"generator", "torus"},
        {"M", std::to_string(spec.circles)},
        {"N", std::to_string(spec.samples)},
        {"L", std::to_string(spec.observations)},
        {"tuple_size", std::to_string(spec.tuple_size)},
        {"r_max", format_real(spec.r_max)},
        {"sigma", format_real(spec.sigma)},
        {"seed", std::to_string(spec.seed)},
    };

    std::vector<int> pool(static_cast<std::size_t>(spec.circles));
    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(spec.samples));
    for (int i = 0; i < spec.samples; ++i) {
        // Partial Fisher-Yates: the first tuple_size entries are a uniform
        // draw without replacement.
        for (int m = 0; m < spec.circles; ++m) pool[static_cast<std::size_t>(m)] = m;
        for (int t = 0; t < spec.tuple_size; ++t) {
            std::uniform_int_distribution<int> pick(t, spec.circles - 1);
            std::swap(pool[static_cast<std::size_t>(t)],
                      pool[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<int> tuple(pool.begin(), pool.begin() + spec.tuple_size);
        std::sort(tuple.begin(), tuple.end());

        std::vector<double> radii(static_cast<std::size_t>(spec.tuple_size), 1.0);
        if (spec.r_max > 1.0) {
            std::uniform_real_distribution<double> radius(1.0, spec.r_max);
            for (auto& r : radii) r = radius(rng);
        }

        Matrix obs = torus_observations(angles, tuple, radii, spec.sigma, rng);
        meta["tuple." + std::to_string(i)] = format_index_tuple(tuple);
        samples.emplace_back(std::move(obs), "sample_" + std::to_string(i));
    }
    return Dataset(std::move(samples), std::move(meta));
}

/// Circle-index tuples I_i recorded by generate_torus_dataset.
inline std::vector<std::vector<int>> torus_tuples(const Dataset& d) {
    std::vector<std::vector<int>> out;
    out.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto text = d.meta("tuple." + std::to_string(i));
        if (text.empty()) {
            throw ValidationError("dataset has no circle tuple for sample " + std::to_string(i));
        }
        out.push_back(parse_index_tuple(text));
    }
    return out;
}

// Size of the intersection of the tuples picked out by `which`.
inline int common_count(const std::vector<std::vector<int>>& tuples,
                        std::initializer_list<std::size_t> which) {
    auto it = which.begin();
    std::vector<int> acc = tuples.at(*it);
    for (++it; it != which.end(); ++it) {
        const auto& next = tuples.at(*it);
        std::vector<int> merged;
        std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(),
                              std::back_inserter(merged));
        acc = std::move(merged);
    }
    return static_cast<int>(acc.size());
}

// ---------------------------------------------------------------------------
// Image cubes
// ---------------------------------------------------------------------------

/// rows x cols x bands array, band index fastest: value(r, c, b) lives at
/// ((r * cols) + c) * bands + b.
struct Cube {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t bands = 0;
    std::vector<double> values;

    Cube() = default;
    Cube(std::size_t r, std::size_t c, std::size_t b)
        : rows(r), cols(c), bands(b), values(r * c * b, 0.0) {}

    double& operator()(std::size_t r, std::size_t c, std::size_t b) {
        return values[(r * cols + c) * bands + b];
    }
    double operator()(std::size_t r, std::size_t c, std::size_t b) const {
        return values[(r * cols + c) * bands + b];
    }
};

struct GridShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

struct PatchedCube {
    Dataset dataset;
    GridShape grid;
};

/// Splits a cube into non-overlapping n x n patches (row-major patch order;
/// trailing rows/cols that do not fill a patch are dropped). Each patch is a
/// sample with one observation per band: the row-major flattening of the
/// n x n window of that band.
inline PatchedCube patch_cube(const Cube& cube, std::size_t n) {
    if (n == 0) throw ParameterError("patch size must be positive");
    if (cube.values.size() != cube.rows * cube.cols * cube.bands) {
        throw DimensionMismatch("cube value count does not match rows x cols x bands");
    }
    const GridShape grid{cube.rows / n, cube.cols / n};
    if (grid.rows * grid.cols < 2) {
        throw ShapeError("cube yields " + std::to_string(grid.rows * grid.cols) +
                         " patch(es) of size " + std::to_string(n) + "; need at least 2");
    }
    if (cube.bands < 2) {
        throw ShapeError("cube needs at least 2 bands, got " + std::to_string(cube.bands));
    }

    const auto L = static_cast<Eigen::Index>(cube.bands);
    const auto dim = static_cast<Eigen::Index>(n * n);
    std::vector<Sample> samples;
    samples.reserve(grid.rows * grid.cols);
    for (std::size_t pr = 0; pr < grid.rows; ++pr) {
        for (std::size_t pc = 0; pc < grid.cols; ++pc) {
            Matrix obs(L, dim);
            for (std::size_t b = 0; b < cube.bands; ++b) {
                Eigen::Index k = 0;
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t c = 0; c < n; ++c) {
                        obs(static_cast<Eigen::Index>(b), k++) = cube(pr * n + r, pc * n + c, b);
                    }
                }
            }
            samples.emplace_back(std::move(obs),
                                 "patch_" + std::to_string(pr) + "_" + std::to_string(pc));
        }
    }
    Metadata meta{
        {"generator", "patch_cube"},
        {"patch_size", std::to_string(n)},
        {"grid_rows", std::to_string(grid.rows)},
        {"grid_cols", std::to_string(grid.cols)},
    };
    return {Dataset(std::move(samples), std::move(meta)), grid};
}

}  // namespace hiertopo

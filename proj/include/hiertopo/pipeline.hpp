#pragma once

// End-to-end dataset comparison: per-sample diffusion operators, weighted
// complex, persistence diagrams, Wasserstein distance matrix, optional
// diffusion-maps embedding. Also the synthetic weight-statistics and
// dataset-separation experiments, and two ablation alternates.

#include <hiertopo/complex.hpp>
#include <hiertopo/dataset.hpp>
#include <hiertopo/diffusion.hpp>
#include <hiertopo/embedding.hpp>
#include <hiertopo/errors.hpp>
#include <hiertopo/parallel.hpp>
#include <hiertopo/persistence.hpp>
#include <hiertopo/text.hpp>
#include <hiertopo/wasserstein.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hiertopo {

enum class SkeletonKind { complete, grid };
enum class WeightKind { alternating_diffusion, cross_correlation };

struct PipelineConfig {
    double kernel_epsilon_factor = 1.0;
    int patch_size = 5;
    SkeletonKind skeleton = SkeletonKind::complete;
    int degree = 1;
    double order = 2.0;
    InfinitePolicy::Kind infinite_policy = InfinitePolicy::Kind::drop;
    std::optional<double> cap_value;  // cap policy; defaults to the largest weight seen
    int embed_dim = 20;               // 0 disables the embedding
    double embed_epsilon_factor = 1.0;
    std::uint64_t seed = 0;
    bool normalize_weights = false;
    WeightKind weights = WeightKind::alternating_diffusion;
    bool graph_spectral = false;
    unsigned threads = 0;

    void validate() const {
        if (!(kernel_epsilon_factor > 0.0)) throw ParameterError("config: kernel_epsilon_factor must be positive");
        if (patch_size < 1) throw ParameterError("config: patch_size must be >= 1");
        if (degree < 0 || degree > 1) throw ParameterError("config: degree must be 0 or 1");
        if (!(order >= 1.0)) throw ParameterError("config: order p must be >= 1");
        if (embed_dim < 0) throw ParameterError("config: embed_dim must be >= 0");
        if (!(embed_epsilon_factor > 0.0)) throw ParameterError("config: embed_epsilon_factor must be positive");
        if (cap_value && !std::isfinite(*cap_value)) throw ParameterError("config: cap_value must be finite");
    }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["kernel_epsilon_factor"] = c.kernel_epsilon_factor;
    j["patch_size"] = c.patch_size;
    j["skeleton"] = c.skeleton == SkeletonKind::complete ? "complete" : "grid";
    j["degree"] = c.degree;
    j["order"] = c.order;
    j["infinite_policy"] = c.infinite_policy == InfinitePolicy::Kind::drop ? "drop" : "cap";
    j["cap_value"] = c.cap_value ? nlohmann::json(*c.cap_value) : nlohmann::json(nullptr);
    j["embed_dim"] = c.embed_dim;
    j["embed_epsilon_factor"] = c.embed_epsilon_factor;
    j["seed"] = c.seed;
    j["normalize_weights"] = c.normalize_weights;
    j["weights"] = c.weights == WeightKind::alternating_diffusion ? "alternating-diffusion" : "cross-correlation";
    j["graph_spectral"] = c.graph_spectral;
    j["threads"] = c.threads;
    return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c = {}) {
    static const std::set<std::string> known{
        "kernel_epsilon_factor", "patch_size", "skeleton", "degree", "order", "infinite_policy", "cap_value",
        "embed_dim", "embed_epsilon_factor", "seed", "normalize_weights", "weights", "graph_spectral", "threads"};
    if (!j.is_object()) throw ParameterError("config: top level must be an object");
    for (const auto& [k, v] : j.items()) {
        if (!known.contains(k)) throw ParameterError("config: unknown key '" + k + "'");
    }
    try {
        if (j.contains("kernel_epsilon_factor")) c.kernel_epsilon_factor = j.at("kernel_epsilon_factor").get<double>();
        if (j.contains("patch_size")) c.patch_size = j.at("patch_size").get<int>();
        if (j.contains("skeleton")) {
            const auto s = j.at("skeleton").get<std::string>();
            if (s == "complete") c.skeleton = SkeletonKind::complete;
            else if (s == "grid") c.skeleton = SkeletonKind::grid;
            else throw ParameterError("config: skeleton must be 'complete' or 'grid'");
        }
        if (j.contains("degree")) c.degree = j.at("degree").get<int>();
        if (j.contains("order")) c.order = j.at("order").get<double>();
        if (j.contains("infinite_policy")) {
            const auto s = j.at("infinite_policy").get<std::string>();
            if (s == "drop") c.infinite_policy = InfinitePolicy::Kind::drop;
            else if (s == "cap") c.infinite_policy = InfinitePolicy::Kind::cap;
            else throw ParameterError("config: infinite_policy must be 'drop' or 'cap'");
        }
        if (j.contains("cap_value")) {
            if (j.at("cap_value").is_null()) c.cap_value.reset();
            else c.cap_value = j.at("cap_value").get<double>();
        }
        if (j.contains("embed_dim")) c.embed_dim = j.at("embed_dim").get<int>();
        if (j.contains("embed_epsilon_factor")) c.embed_epsilon_factor = j.at("embed_epsilon_factor").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("normalize_weights")) c.normalize_weights = j.at("normalize_weights").get<bool>();
        if (j.contains("weights")) {
            const auto s = j.at("weights").get<std::string>();
            if (s == "alternating-diffusion") c.weights = WeightKind::alternating_diffusion;
            else if (s == "cross-correlation") c.weights = WeightKind::cross_correlation;
            else throw ParameterError("config: weights must be 'alternating-diffusion' or 'cross-correlation'");
        }
        if (j.contains("graph_spectral")) c.graph_spectral = j.at("graph_spectral").get<bool>();
        if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Ablation alternates
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix standardized_columns(const Matrix& x) {
    Matrix z = x.rowwise() - x.colwise().mean();
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double norm = z.col(c).norm();
        if (norm > 0.0) z.col(c) /= norm;
    }
    return z;
}

}  // namespace detail

/// 1 / ||C||_F where C is the cross-correlation matrix between the
/// observation coordinates of two samples.
inline double cross_correlation_weight(const Sample& a, const Sample& b) {
    if (a.size() != b.size()) throw DimensionMismatch("cross_correlation_weight: samples differ in size");
    const Matrix c = detail::standardized_columns(a.observations()).transpose() *
                     detail::standardized_columns(b.observations());
    return inverse_frobenius(c);
}

/// Edge weights from cross-correlation; a triangle takes the largest of its
/// edge weights.
inline WeightedComplex cross_correlation_complex(Skeleton skeleton, const Dataset& d, const WeightOptions& opt = {}) {
    return assign_weights_with(
        std::move(skeleton),
        [&](VertexId a, VertexId b) { return cross_correlation_weight(d.sample(a), d.sample(b)); },
        [](VertexId, VertexId, VertexId, double w01, double w12, double w02) { return std::max({w01, w12, w02}); },
        opt);
}

/// Eigenvalues (descending) of the edge-weight adjacency matrix.
inline std::vector<double> edge_graph_spectrum(const WeightedComplex& complex) {
    const auto n = static_cast<Eigen::Index>(complex.vertex_count());
    Matrix a = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < complex.size(); ++i) {
        const auto& s = complex.simplex(i);
        if (s.dimension() != 1) continue;
        a(s[0], s[1]) = complex.weight(i);
        a(s[1], s[0]) = complex.weight(i);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    std::vector<double> values(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(values.rbegin(), values.rend());
    return values;
}

/// L2 distance between edge-graph spectra (shorter spectrum zero-padded).
inline DatasetDistanceMatrix graph_spectral_distances(std::span<const WeightedComplex> complexes,
                                                      std::vector<std::string> labels) {
    const auto n = complexes.size();
    std::vector<std::vector<double>> spectra;
    for (const auto& c : complexes) spectra.push_back(edge_graph_spectrum(c));
    DatasetDistanceMatrix m{Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), std::move(labels)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto len = std::max(spectra[i].size(), spectra[j].size());
            double sum = 0.0;
            for (std::size_t k = 0; k < len; ++k) {
                const double x = k < spectra[i].size() ? spectra[i][k] : 0.0;
                const double y = k < spectra[j].size() ? spectra[j][k] : 0.0;
                sum += (x - y) * (x - y);
            }
            m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::sqrt(sum);
            m.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::sqrt(sum);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Per-dataset analysis
// ---------------------------------------------------------------------------

struct DatasetArtifacts {
    std::string label;
    WeightedComplex complex;
    PersistenceDiagram degree0;
    PersistenceDiagram degree1;

    const PersistenceDiagram& diagram(int k) const { return k == 0 ? degree0 : degree1; }
};

inline std::vector<DiffusionOperator> sample_operators(const Dataset& d, double epsilon_factor, unsigned threads = 0) {
    std::vector<std::optional<DiffusionOperator>> slots(d.size());
    parallel_for(d.size(), [&](std::size_t i) {
        try {
            slots[i].emplace(sample_operator(d.sample(i), epsilon_factor));
        } catch (const Error& e) {
            throw Error("sample " + std::to_string(i) + ": " + e.what());
        }
    }, threads);
    std::vector<DiffusionOperator> out;
    out.reserve(d.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

inline Skeleton dataset_skeleton(const Dataset& d, SkeletonKind kind) {
    if (kind == SkeletonKind::complete) return complete_skeleton(d.size());
    const auto rows = d.meta("grid_rows");
    const auto cols = d.meta("grid_cols");
    if (rows.empty() || cols.empty()) throw ParameterError("grid skeleton needs grid_rows/grid_cols metadata");
    const auto r = static_cast<std::size_t>(parse_integer(rows));
    const auto c = static_cast<std::size_t>(parse_integer(cols));
    if (r * c != d.size()) {
        throw DimensionMismatch("grid " + rows + "x" + cols + " does not match " + std::to_string(d.size()) + " samples");
    }
    return grid_skeleton(r, c);
}

/// Weighted complex for one dataset (no persistence).
inline WeightedComplex build_complex(const Dataset& d, const PipelineConfig& config, const std::string& label) {
    Skeleton skeleton;
    try {
        skeleton = dataset_skeleton(d, config.skeleton);
    } catch (const Error& e) {
        throw StageError("skeleton", label, e.what());
    }
    const WeightOptions opt{config.normalize_weights, config.threads};
    if (config.weights == WeightKind::cross_correlation) {
        try {
            return cross_correlation_complex(std::move(skeleton), d, opt);
        } catch (const Error& e) {
            throw StageError("weights", label, e.what());
        }
    }
    std::vector<DiffusionOperator> operators;
    try {
        operators = sample_operators(d, config.kernel_epsilon_factor, config.threads);
    } catch (const Error& e) {
        throw StageError("operators", label, e.what());
    }
    try {
        return assign_weights(std::move(skeleton), operators, opt);
    } catch (const Error& e) {
        throw StageError("weights", label, e.what());
    }
}

inline DatasetArtifacts persistence_artifacts(WeightedComplex complex, const std::string& label) {
    try {
        auto ph = compute_persistence(complex, EssentialPolicy::infinite());
        return {label, std::move(complex), std::move(ph.degree0), std::move(ph.degree1)};
    } catch (const Error& e) {
        throw StageError("persistence", label, e.what());
    }
}

inline DatasetArtifacts analyze_dataset(const Dataset& d, const PipelineConfig& config, const std::string& label) {
    return persistence_artifacts(build_complex(d, config, label), label);
}

/// Distance matrix over already-analyzed datasets, honoring the config's
/// degree, order, infinite policy and the graph-spectral alternate.
inline DatasetDistanceMatrix artifact_distances(std::span<const DatasetArtifacts> artifacts, const PipelineConfig& config) {
    std::vector<std::string> labels;
    for (const auto& a : artifacts) labels.push_back(a.label);
    try {
        if (config.graph_spectral) {
            std::vector<WeightedComplex> complexes;
            for (const auto& a : artifacts) complexes.push_back(a.complex);
            return graph_spectral_distances(complexes, std::move(labels));
        }
        DiagramDistanceSpec spec{config.order, config.degree, InfinitePolicy::drop()};
        if (config.infinite_policy == InfinitePolicy::Kind::cap) {
            double cap = 0.0;
            for (const auto& a : artifacts) cap = std::max(cap, a.complex.max_weight());
            spec.infinite_policy = InfinitePolicy::cap(config.cap_value.value_or(cap));
        }
        std::vector<PersistenceDiagram> diagrams;
        for (const auto& a : artifacts) diagrams.push_back(a.diagram(config.degree));
        return distance_matrix(diagrams, spec, std::move(labels), config.threads);
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError("distance", "*", e.what());
    }
}

struct PipelineResult {
    std::vector<DatasetArtifacts> datasets;
    DatasetDistanceMatrix distances;
    std::optional<Embedding> embedding;
};

inline std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("dataset_" + std::to_string(i));
    return labels;
}

/// Analyzes every dataset and compares them. The embedding (if enabled) is
/// computed from the in-memory distance matrix.
inline PipelineResult run_pipeline(std::span<const Dataset> datasets, const PipelineConfig& config,
                                   std::vector<std::string> labels = {}) {
    config.validate();
    if (datasets.size() < 2) throw ParameterError("pipeline: need at least 2 datasets");
    if (labels.empty()) labels = default_labels(datasets.size());
    if (labels.size() != datasets.size()) throw DimensionMismatch("pipeline: one label per dataset required");

    PipelineResult result;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        result.datasets.push_back(analyze_dataset(datasets[i], config, labels[i]));
    }
    result.distances = artifact_distances(result.datasets, config);
    if (config.embed_dim > 0) {
        const int dim = std::min<int>(config.embed_dim, static_cast<int>(datasets.size()) - 1);
        try {
            result.embedding = diffusion_maps(result.distances, config.embed_epsilon_factor, dim);
        } catch (const Error& e) {
            throw StageError("embed", "*", e.what());
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Output directory
//
//   config.json
//   datasets/dataset_<i>/complex.csv, diagrams.csv
//   distances.csv
//   embedding.csv     (embed_dim > 0; computed from distances.csv as written)
// ---------------------------------------------------------------------------

inline std::filesystem::path artifact_dir(const std::filesystem::path& out, std::size_t i) {
    return out / "datasets" / ("dataset_" + std::to_string(i));
}

inline void write_config(const PipelineConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json(config).dump(2) << '\n';
}

inline void write_pipeline_outputs(PipelineResult& result, const PipelineConfig& config,
                                   const std::filesystem::path& out) {
    namespace fs = std::filesystem;
    fs::create_directories(out);
    write_config(config, out / "config.json");
    for (std::size_t i = 0; i < result.datasets.size(); ++i) {
        const auto dir = artifact_dir(out, i);
        fs::create_directories(dir);
        const auto& a = result.datasets[i];
        write_complex_csv(a.complex, dir / "complex.csv");
        write_diagrams_csv({a.degree0, a.degree1}, dir / "diagrams.csv");
    }
    write_distance_csv(result.distances, out / "distances.csv");
    result.embedding.reset();
    if (config.embed_dim > 0) {
        const auto saved = read_distance_csv(out / "distances.csv");
        const int dim = std::min<int>(config.embed_dim, static_cast<int>(saved.size()) - 1);
        result.embedding = diffusion_maps(saved, config.embed_epsilon_factor, dim);
        export_embedding(*result.embedding, out / "embedding.csv");
    }
}

// ---------------------------------------------------------------------------
// Synthetic experiments
// ---------------------------------------------------------------------------

struct WeightGroup {
    int simplex_dimension = 1;  // 1 edges, 2 triangles
    int common = 0;             // shared circles among the simplex's samples
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;        // sample standard deviation (0 when count < 2)
};

/// Raw V of every edge and triangle of complete torus datasets, grouped by
/// the number of circles their samples share. Seeds spec.seed,
/// spec.seed + 1, ..., spec.seed + seeds - 1.
inline std::vector<WeightGroup> simulate_weight_statistics(int seeds, const TorusSpec& spec,
                                                           double epsilon_factor = 1.0, unsigned threads = 0) {
    if (seeds < 1) throw ParameterError("fig3a: need at least one seed");
    spec.validate();
    const int groups = spec.tuple_size + 1;
    std::vector<std::vector<double>> values(static_cast<std::size_t>(2 * groups));
    for (int s = 0; s < seeds; ++s) {
        TorusSpec run = spec;
        run.seed = spec.seed + static_cast<std::uint64_t>(s);
        const Dataset d = generate_torus_dataset(run);
        const auto tuples = torus_tuples(d);
        const auto operators = sample_operators(d, epsilon_factor, threads);
        const Skeleton skeleton = complete_skeleton(d.size());
        const auto w = alternating_diffusion_weights(skeleton, operators, threads);
        for (std::size_t i = 0; i < skeleton.size(); ++i) {
            const auto& x = skeleton[i];
            if (x.dimension() == 1) {
                const int c = common_count(tuples, {x[0], x[1]});
                values[static_cast<std::size_t>(c)].push_back(w[i]);
            } else if (x.dimension() == 2) {
                const int c = common_count(tuples, {x[0], x[1], x[2]});
                values[static_cast<std::size_t>(groups + c)].push_back(w[i]);
            }
        }
    }
    std::vector<WeightGroup> out;
    for (int dim = 1; dim <= 2; ++dim) {
        for (int c = 0; c < groups; ++c) {
            const auto& v = values[static_cast<std::size_t>((dim - 1) * groups + c)];
            WeightGroup g{dim, c, v.size(), 0.0, 0.0};
            if (!v.empty()) {
                double sum = 0.0;
                for (double x : v) sum += x;
                g.mean = sum / static_cast<double>(v.size());
                if (v.size() > 1) {
                    double ss = 0.0;
                    for (double x : v) ss += (x - g.mean) * (x - g.mean);
                    g.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
                }
            }
            out.push_back(g);
        }
    }
    return out;
}

inline void write_weight_groups_csv(const std::vector<WeightGroup>& groups, std::ostream& out) {
    out << "simplex,common_count,n,mean_v,std_v\n";
    for (const auto& g : groups) {
        if (g.count == 0) continue;
        out << (g.simplex_dimension == 1 ? "edge" : "triangle") << ',' << g.common << ',' << g.count << ','
            << format_real(g.mean, 12) << ',' << format_real(g.stddev, 12) << '\n';
    }
}

struct SeparationResult {
    DatasetDistanceMatrix distances;
    std::vector<int> circles;  // M of each dataset, parallel to distances.labels
    std::vector<DatasetArtifacts> datasets;
};

/// per_m torus datasets for each M in m_values (dataset r of M uses seed
/// template.seed + running index), compared with the pipeline.
inline SeparationResult simulate_separation(const std::vector<int>& m_values, int per_m, const TorusSpec& templ,
                                            const PipelineConfig& config) {
    config.validate();
    const std::set<int> distinct(m_values.begin(), m_values.end());
    if (distinct.size() < 2) throw ParameterError("fig3b: need at least 2 distinct M values");
    if (per_m < 1) throw ParameterError("fig3b: per_m must be >= 1");

    SeparationResult out;
    std::uint64_t index = 0;
    for (const int m : m_values) {
        for (int r = 0; r < per_m; ++r, ++index) {
            TorusSpec spec = templ;
            spec.circles = m;
            spec.seed = templ.seed + index;
            const std::string label = "M" + std::to_string(m) + "_" + std::to_string(r);
            const Dataset d = generate_torus_dataset(spec);
            out.datasets.push_back(analyze_dataset(d, config, label));
            out.circles.push_back(m);
        }
    }
    out.distances = artifact_distances(out.datasets, config);
    return out;
}

}  // namespace hiertopo

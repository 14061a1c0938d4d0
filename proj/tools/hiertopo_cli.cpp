// hiertopo: command-line front end. Every stage reads and writes files so
// stages compose through the filesystem.

#include <hiertopo/hiertopo.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace hiertopo;

namespace {

struct ConfigFlags {
    std::string config_path;
    std::optional<double> kernel_epsilon_factor;
    std::optional<int> patch_size;
    std::optional<std::string> skeleton;
    std::optional<int> degree;
    std::optional<double> order;
    std::optional<std::string> infinite_policy;
    std::optional<double> cap_value;
    std::optional<int> embed_dim;
    std::optional<double> embed_epsilon_factor;
    std::optional<std::uint64_t> seed;
    bool normalize_weights = false;
    std::optional<std::string> weights;
    bool graph_spectral = false;
    std::optional<unsigned> threads;

    PipelineConfig resolve() const {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw IoError("cannot open config " + config_path);
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ParameterError("config " + config_path + ": " + e.what());
            }
        }
        auto set = [&](const char* key, const auto& v) {
            if (v) j[key] = *v;
        };
        set("kernel_epsilon_factor", kernel_epsilon_factor);
        set("patch_size", patch_size);
        set("skeleton", skeleton);
        set("degree", degree);
        set("order", order);
        set("infinite_policy", infinite_policy);
        set("cap_value", cap_value);
        set("embed_dim", embed_dim);
        set("embed_epsilon_factor", embed_epsilon_factor);
        set("seed", seed);
        set("weights", weights);
        set("threads", threads);
        if (normalize_weights) j["normalize_weights"] = true;
        if (graph_spectral) j["graph_spectral"] = true;
        return config_from_json(j);
    }
};

enum Group : unsigned { kernel = 1, complex_flags = 2, compare = 4, embed = 8, all = 15 };

void add_config_flags(CLI::App* app, ConfigFlags& f, unsigned groups) {
    app->add_option("--config", f.config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);
    app->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    if (groups & kernel) {
        app->add_option("--epsilon-factor", f.kernel_epsilon_factor, "per-sample kernel scale factor");
        app->add_option("--weights", f.weights, "alternating-diffusion | cross-correlation");
    }
    if (groups & complex_flags) {
        app->add_option("--skeleton", f.skeleton, "complete | grid");
        app->add_option("--patch-size", f.patch_size, "patch side length for cube inputs");
        app->add_flag("--normalize-weights", f.normalize_weights, "divide edge/triangle weights by their median");
    }
    if (groups & compare) {
        app->add_option("--degree", f.degree, "homology degree (0 or 1)");
        app->add_option("--order,-p", f.order, "Wasserstein order p");
        app->add_option("--infinite-policy", f.infinite_policy, "drop | cap");
        app->add_option("--cap-value", f.cap_value, "death value for capped classes");
        app->add_flag("--graph-spectral", f.graph_spectral, "edge-graph spectral distance instead of persistence");
    }
    if (groups & embed) {
        app->add_option("--embed-dim", f.embed_dim, "embedding dimension (0 disables)");
        app->add_option("--embed-epsilon-factor", f.embed_epsilon_factor, "dataset kernel scale factor");
        app->add_option("--seed", f.seed, "seed recorded with the run");
    }
}

void add_torus_flags(CLI::App* app, TorusSpec& s, bool with_circles) {
    if (with_circles) app->add_option("--circles,-M", s.circles, "number of circles");
    app->add_option("--samples,-N", s.samples, "samples per dataset");
    app->add_option("--observations,-L", s.observations, "observations per sample");
    app->add_option("--tuple-size", s.tuple_size, "circles per sample");
    app->add_option("--r-max", s.r_max, "largest circle radius");
    app->add_option("--sigma", s.sigma, "noise standard deviation");
    app->add_option("--seed", s.seed, "random seed");
}

std::vector<std::string> dataset_labels(const std::vector<std::string>& dirs) {
    std::vector<std::string> labels;
    for (const auto& d : dirs) labels.push_back(fs::path(d).lexically_normal().filename().string().empty()
                                                    ? fs::path(d).lexically_normal().parent_path().filename().string()
                                                    : fs::path(d).lexically_normal().filename().string());
    return labels;
}

Cube read_cube(const fs::path& path, std::size_t rows, std::size_t cols, std::size_t bands) {
    const auto values = detail::read_f64_le(path);
    if (values.size() != rows * cols * bands) {
        throw DimensionMismatch(path.string() + ": holds " + std::to_string(values.size()) + " values, expected " +
                                std::to_string(rows * cols * bands));
    }
    Cube cube(rows, cols, bands);
    cube.values = values;
    return cube;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological distances between datasets of samples"};
    app.require_subcommand(1);

    // generate-sim
    TorusSpec torus;
    std::string out;
    auto* gen = app.add_subcommand("generate-sim", "generate a synthetic torus dataset");
    add_torus_flags(gen, torus, true);
    gen->add_option("--out,-o", out, "output dataset directory")->required();

    // patch-cube
    std::string cube_path;
    std::size_t rows = 0, cols = 0, bands = 0, patch = 5;
    auto* pc = app.add_subcommand("patch-cube", "cut a raw f64 cube into a dataset of patches");
    pc->add_option("--input,-i", cube_path, "little-endian f64 values, [row][col][band] order")->required()
        ->check(CLI::ExistingFile);
    pc->add_option("--rows", rows)->required();
    pc->add_option("--cols", cols)->required();
    pc->add_option("--bands", bands)->required();
    pc->add_option("--patch-size,-n", patch, "patch side length");
    pc->add_option("--out,-o", out, "output dataset directory")->required();

    // build-complex
    std::string dataset_dir;
    ConfigFlags flags;
    auto* bc = app.add_subcommand("build-complex", "weighted complex of one dataset");
    bc->add_option("--dataset,-d", dataset_dir, "dataset directory")->required()->check(CLI::ExistingDirectory);
    bc->add_option("--out,-o", out, "complex CSV")->required();
    add_config_flags(bc, flags, kernel | complex_flags);

    // ph
    std::string complex_path;
    auto* ph = app.add_subcommand("ph", "persistence diagrams of a weighted complex");
    ph->add_option("--complex,-c", complex_path, "complex CSV")->required()->check(CLI::ExistingFile);
    ph->add_option("--out,-o", out, "diagrams CSV")->required();

    // distance
    std::vector<std::string> diagram_paths, complex_paths, labels;
    auto* dist = app.add_subcommand("distance", "dataset distance matrix from saved diagrams");
    dist->add_option("--diagrams", diagram_paths, "diagram CSVs, one per dataset");
    dist->add_option("--complexes", complex_paths, "complex CSVs (graph-spectral, default cap value)");
    dist->add_option("--labels", labels, "dataset labels");
    dist->add_option("--out,-o", out, "distance CSV")->required();
    add_config_flags(dist, flags, compare);

    // embed
    std::string distances_path;
    auto* emb = app.add_subcommand("embed", "diffusion-maps embedding of a distance matrix");
    emb->add_option("--distances", distances_path, "distance CSV")->required()->check(CLI::ExistingFile);
    emb->add_option("--out,-o", out, "embedding CSV")->required();
    add_config_flags(emb, flags, embed);

    // pipeline
    std::vector<std::string> dataset_dirs;
    auto* pipe = app.add_subcommand("pipeline", "full comparison of dataset directories");
    pipe->add_option("--datasets,-d", dataset_dirs, "dataset directories")->required()->check(CLI::ExistingDirectory);
    pipe->add_option("--out,-o", out, "output directory")->required();
    add_config_flags(pipe, flags, all);

    // fig3a
    int seeds = 20;
    double fig_epsilon = 1.0;
    unsigned fig_threads = 0;
    auto* f3a = app.add_subcommand("fig3a", "weight statistics grouped by shared circles");
    add_torus_flags(f3a, torus, true);
    f3a->add_option("--seeds", seeds, "number of consecutive seeds");
    f3a->add_option("--epsilon-factor", fig_epsilon, "per-sample kernel scale factor");
    f3a->add_option("--threads", fig_threads, "worker threads");
    f3a->add_option("--out,-o", out, "CSV (default stdout)");

    // fig3b
    std::vector<int> m_values{3, 8, 20};
    int per_m = 4;
    auto* f3b = app.add_subcommand("fig3b", "distance matrix over torus datasets of varying circle count");
    add_torus_flags(f3b, torus, false);
    f3b->add_option("--m-values", m_values, "circle counts")->delimiter(',');
    f3b->add_option("--per-m", per_m, "datasets per circle count");
    f3b->add_option("--out,-o", out, "output directory")->required();
    add_config_flags(f3b, flags, kernel | complex_flags | compare);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            save_dataset(generate_torus_dataset(torus), out);
        } else if (*pc) {
            const auto patched = patch_cube(read_cube(cube_path, rows, cols, bands), patch);
            save_dataset(patched.dataset, out);
        } else if (*bc) {
            const auto config = flags.resolve();
            const auto d = load_dataset(dataset_dir);
            write_complex_csv(build_complex(d, config, dataset_dir), fs::path(out));
        } else if (*ph) {
            const auto complex = read_complex_csv(fs::path(complex_path));
            const auto a = persistence_artifacts(complex, complex_path);
            write_diagrams_csv({a.degree0, a.degree1}, fs::path(out));
        } else if (*dist) {
            const auto config = flags.resolve();
            const auto n = config.graph_spectral ? complex_paths.size() : diagram_paths.size();
            if (n < 2) throw ParameterError("distance: need at least 2 inputs");
            if (labels.empty()) labels = default_labels(n);
            if (labels.size() != n) throw DimensionMismatch("distance: one label per input required");
            std::vector<DatasetArtifacts> artifacts;
            for (std::size_t i = 0; i < n; ++i) {
                DatasetArtifacts a{labels[i], WeightedComplex({}, {}), {0, {}}, {1, {}}};
                if (i < complex_paths.size()) a.complex = read_complex_csv(fs::path(complex_paths[i]));
                if (!config.graph_spectral) {
                    a.degree0 = read_diagram_csv(fs::path(diagram_paths[i]), 0);
                    a.degree1 = read_diagram_csv(fs::path(diagram_paths[i]), 1);
                }
                artifacts.push_back(std::move(a));
            }
            if (config.infinite_policy == InfinitePolicy::Kind::cap && !config.cap_value &&
                complex_paths.size() != n) {
                throw ParameterError("distance: cap policy needs --cap-value or one --complexes entry per dataset");
            }
            write_distance_csv(artifact_distances(artifacts, config), fs::path(out));
        } else if (*emb) {
            const auto config = flags.resolve();
            const auto m = read_distance_csv(fs::path(distances_path));
            const int dim = std::min<int>(config.embed_dim, static_cast<int>(m.size()) - 1);
            if (dim < 1) throw ParameterError("embed: embedding dimension must be >= 1");
            export_embedding(diffusion_maps(m, config.embed_epsilon_factor, dim), fs::path(out));
        } else if (*pipe) {
            const auto config = flags.resolve();
            std::vector<Dataset> datasets;
            for (const auto& dir : dataset_dirs) datasets.push_back(load_dataset(dir));
            auto result = run_pipeline(datasets, config, dataset_labels(dataset_dirs));
            write_pipeline_outputs(result, config, out);
        } else if (*f3a) {
            const auto groups = simulate_weight_statistics(seeds, torus, fig_epsilon, fig_threads);
            if (out.empty()) {
                write_weight_groups_csv(groups, std::cout);
            } else {
                std::ofstream file(out, std::ios::trunc);
                if (!file) throw IoError("cannot write " + out);
                write_weight_groups_csv(groups, file);
            }
        } else if (*f3b) {
            auto config = flags.resolve();
            const auto result = simulate_separation(m_values, per_m, torus, config);
            fs::create_directories(out);
            write_config(config, fs::path(out) / "config.json");
            write_distance_csv(result.distances, fs::path(out) / "distances.csv");
            std::ofstream meta(fs::path(out) / "labels.csv", std::ios::trunc);
            meta << "dataset,circles\n";
            for (std::size_t i = 0; i < result.circles.size(); ++i) {
                meta << result.distances.labels[i] << ',' << result.circles[i] << '\n';
            }
        }
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: [" << app.get_subcommands().front()->get_name() << "] " << e.what() << '\n';
        return 1;
    }
    return 0;
}

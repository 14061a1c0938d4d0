#pragma once

// On-disk dataset directory:
//
//   manifest.json   {"format": "hiertopo-dataset", "version": 1,
//                    "N": .., "L": .., "d_obs": ..,
//                    "metadata": {string: string},
//                    "samples": [{"label": .., "file": "sample_0.f64", "d_obs": ..}, ...]}
//   sample_<i>.f64  L x d_obs little-endian float64, row-major (row = observation)
//
// A per-sample "d_obs" overrides the top-level value.

#include <hiertopo/dataset.hpp>
#include <hiertopo/errors.hpp>

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace hiertopo {

namespace detail {

inline void write_f64_le(std::ostream& out, const Matrix& m) {
    std::vector<unsigned char> bytes(static_cast<std::size_t>(m.size()) * 8);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            auto bits = std::bit_cast<std::uint64_t>(m(r, c));
            for (int b = 0; b < 8; ++b) {
                bytes[k++] = static_cast<unsigned char>(bits >> (8 * b));
            }
        }
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<double> read_f64_le(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 8 != 0) {
        throw DimensionMismatch(path.string() + ": size " + std::to_string(bytes.size()) +
                                " is not a multiple of 8 bytes");
    }
    std::vector<double> values(bytes.size() / 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
            bits |= static_cast<std::uint64_t>(bytes[i * 8 + static_cast<std::size_t>(b)]) << (8 * b);
        }
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

}  // namespace detail

inline void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d.sample(i).observations().allFinite()) {
            throw ValidationError("sample " + std::to_string(i) + " contains a non-finite entry");
        }
    }
    fs::create_directories(dir);

    nlohmann::json manifest;
    manifest["format"] = "hiertopo-dataset";
    manifest["version"] = 1;
    manifest["N"] = d.size();
    manifest["L"] = d.observations_per_sample();
    manifest["d_obs"] = d.sample(0).dimension();
    manifest["metadata"] = nlohmann::json::object();
    for (const auto& [k, v] : d.metadata()) manifest["metadata"][k] = v;
    manifest["samples"] = nlohmann::json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& s = d.sample(i);
        const std::string file = "sample_" + std::to_string(i) + ".f64";
        manifest["samples"].push_back({{"label", s.label()}, {"file", file}, {"d_obs", s.dimension()}});
        std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + (dir / file).string());
        detail::write_f64_le(out, s.observations());
        if (!out) throw IoError("short write to " + (dir / file).string());
    }
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open " + manifest_path.string());

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(manifest_path.string() + ": " + e.what());
    }

    try {
        const auto N = manifest.at("N").get<std::size_t>();
        const auto L = manifest.at("L").get<Eigen::Index>();
        const auto d_obs = manifest.at("d_obs").get<Eigen::Index>();
        const auto& entries = manifest.at("samples");
        if (!entries.is_array() || entries.size() != N) {
            throw DimensionMismatch(manifest_path.string() + ": N=" + std::to_string(N) + " but " +
                                    std::to_string(entries.size()) + " sample entries");
        }

        Metadata meta;
        if (manifest.contains("metadata")) {
            for (const auto& [k, v] : manifest.at("metadata").items()) {
                meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
        }

        std::vector<Sample> samples;
        samples.reserve(N);
        for (std::size_t i = 0; i < N; ++i) {
            const auto& e = entries[i];
            const auto dim = e.contains("d_obs") ? e.at("d_obs").get<Eigen::Index>() : d_obs;
            const auto file = dir / e.at("file").get<std::string>();
            const auto values = detail::read_f64_le(file);
            if (dim <= 0 || values.size() != static_cast<std::size_t>(L * dim)) {
                throw DimensionMismatch(file.string() + ": expected " + std::to_string(L) + " x " +
                                        std::to_string(dim) + " values, found " +
                                        std::to_string(values.size()));
            }
            Matrix obs(L, dim);
            for (Eigen::Index r = 0; r < L; ++r) {
                for (Eigen::Index c = 0; c < dim; ++c) {
                    obs(r, c) = values[static_cast<std::size_t>(r * dim + c)];
                }
            }
            const auto label = e.contains("label") ? e.at("label").get<std::string>() : std::string{};
            samples.emplace_back(std::move(obs), label);
        }
        return Dataset(std::move(samples), std::move(meta));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(manifest_path.string() + ": malformed manifest: " + e.what());
    }
}

}  // namespace hiertopo

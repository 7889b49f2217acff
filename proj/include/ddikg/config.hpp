#pragma once

// Pipeline configuration: one JSON file of input paths and stage parameters.
// Relative paths resolve against the directory holding the file.

#include "ddikg/wedge.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace ddikg::config {

struct PredictorSettings {
    std::size_t max_path_length = 3;
    std::size_t path_cap = 10000;
    std::size_t trees = 100;
    std::optional<std::size_t> max_depth;
    std::uint64_t seed = 42;
    std::size_t folds = 10;
    double threshold = 0.5;
};

struct ServerSettings {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t workers = 4;
};

struct Config {
    std::filesystem::path base_dir;

    // extract
    std::optional<std::filesystem::path> corpus;
    std::optional<std::filesystem::path> catalog;
    std::optional<std::filesystem::path> lexicon;
    std::optional<std::filesystem::path> effect_lexicon;
    // build / serve
    std::optional<std::filesystem::path> mapping;
    std::optional<std::filesystem::path> store;
    // deduce / analyze without a store
    std::optional<std::filesystem::path> drugs;
    std::optional<std::filesystem::path> ddis;
    std::optional<std::filesystem::path> treatments;
    // predict / eval
    std::optional<std::filesystem::path> graph;
    std::optional<std::filesystem::path> gold;
    std::optional<std::filesystem::path> relations;
    std::optional<std::filesystem::path> candidates;

    std::filesystem::path output_dir = "out";
    wedge::GraphMode graph_mode = wedge::GraphMode::closure;
    PredictorSettings predictor;
    ServerSettings server;

    // Throws ConfigError naming the key when the path is not configured.
    const std::filesystem::path& require(const std::optional<std::filesystem::path>& p, std::string_view key) const;
};

// Throws ConfigError on malformed JSON, unknown keys or wrongly typed values.
Config parse_config(std::istream& in, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

} // namespace ddikg::config

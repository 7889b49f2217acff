#include "ddikg/config.hpp"

#include "ddikg/error.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <type_traits>

namespace ddikg::config {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, _] : obj.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + where + k + "'");
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer() || (std::is_unsigned_v<T> && !v.is_number_unsigned()))
            throw ConfigError("key '" + where + key + "' must be " +
                              (std::is_unsigned_v<T> ? "a non-negative integer" : "an integer"));
    }
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + where + key + "' has the wrong type");
    }
}

} // namespace

const std::filesystem::path& Config::require(const std::optional<std::filesystem::path>& p, std::string_view key) const {
    if (!p) throw ConfigError("config does not set '" + std::string(key) + "'");
    return *p;
}

Config parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    static const std::set<std::string> paths = {"corpus", "catalog",    "lexicon",   "effect_lexicon", "mapping",
                                                "store",  "drugs",      "ddis",      "treatments",     "graph",
                                                "gold",   "relations",  "candidates"};
    std::set<std::string> allowed = paths;
    allowed.insert({"output_dir", "graph_mode", "predictor", "server"});
    check_keys(j, allowed, "");

    Config c;
    c.base_dir = base_dir;
    auto resolve = [&](const std::string& key) -> std::optional<std::filesystem::path> {
        if (!j.contains(key)) return std::nullopt;
        std::filesystem::path p = get<std::string>(j, key, "");
        return (p.is_absolute() ? p : base_dir / p).lexically_normal();
    };
    c.corpus = resolve("corpus");
    c.catalog = resolve("catalog");
    c.lexicon = resolve("lexicon");
    c.effect_lexicon = resolve("effect_lexicon");
    c.mapping = resolve("mapping");
    c.store = resolve("store");
    c.drugs = resolve("drugs");
    c.ddis = resolve("ddis");
    c.treatments = resolve("treatments");
    c.graph = resolve("graph");
    c.gold = resolve("gold");
    c.relations = resolve("relations");
    c.candidates = resolve("candidates");
    if (auto o = resolve("output_dir")) c.output_dir = *o;
    else c.output_dir = (base_dir / c.output_dir).lexically_normal();
    if (j.contains("graph_mode")) {
        try {
            c.graph_mode = wedge::parse_graph_mode(get<std::string>(j, "graph_mode", ""));
        } catch (const InvalidInput& e) {
            throw ConfigError(e.what());
        }
    }

    if (j.contains("predictor")) {
        const auto& p = j.at("predictor");
        if (!p.is_object()) throw ConfigError("key 'predictor' must be an object");
        check_keys(p, {"max_path_length", "path_cap", "trees", "max_depth", "seed", "folds", "threshold"}, "predictor.");
        auto& s = c.predictor;
        if (p.contains("max_path_length")) s.max_path_length = get<std::size_t>(p, "max_path_length", "predictor.");
        if (p.contains("path_cap")) s.path_cap = get<std::size_t>(p, "path_cap", "predictor.");
        if (p.contains("trees")) s.trees = get<std::size_t>(p, "trees", "predictor.");
        if (p.contains("max_depth") && !p.at("max_depth").is_null())
            s.max_depth = get<std::size_t>(p, "max_depth", "predictor.");
        if (p.contains("seed")) s.seed = get<std::uint64_t>(p, "seed", "predictor.");
        if (p.contains("folds")) s.folds = get<std::size_t>(p, "folds", "predictor.");
        if (p.contains("threshold")) s.threshold = get<double>(p, "threshold", "predictor.");
        if (s.max_path_length == 0) throw ConfigError("predictor.max_path_length must be positive");
        if (s.trees == 0) throw ConfigError("predictor.trees must be positive");
        if (s.folds < 2) throw ConfigError("predictor.folds must be at least 2");
        if (!(s.threshold >= 0.0 && s.threshold <= 1.0)) throw ConfigError("predictor.threshold must lie in [0, 1]");
    }
    if (j.contains("server")) {
        const auto& p = j.at("server");
        if (!p.is_object()) throw ConfigError("key 'server' must be an object");
        check_keys(p, {"host", "port", "workers"}, "server.");
        auto& s = c.server;
        if (p.contains("host")) s.host = get<std::string>(p, "host", "server.");
        if (p.contains("port")) s.port = get<int>(p, "port", "server.");
        if (p.contains("workers")) s.workers = get<std::size_t>(p, "workers", "server.");
        if (s.port < 0 || s.port > 65535) throw ConfigError("server.port out of range");
        if (s.workers == 0) throw ConfigError("server.workers must be positive");
    }
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    auto dir = std::filesystem::absolute(path).parent_path();
    return parse_config(in, dir);
}

} // namespace ddikg::config

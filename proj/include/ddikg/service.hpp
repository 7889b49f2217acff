#pragma once

// JSON query API over a loaded knowledge base and its HTTP binding.

#include "ddikg/kb.hpp"
#include "ddikg/wedge.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ddikg::service {

using json = nlohmann::ordered_json;

enum class Target { ddi, ddis, ddip, ddips };

std::string_view to_string(Target t) noexcept;
// Accepts DDI/DDIS/DDIP/DDIPS in any case; throws InvalidInput otherwise.
Target parse_target(std::string_view text);

// Comma-separated CUI list, repeated parameters allowed. Throws InvalidInput when empty or
// when any entry is not a well-formed CUI. Duplicates are dropped, order is kept.
std::vector<std::string> parse_cuis(const std::vector<std::string>& values);

// DDI: interactions touching any input drug. DDIS: interactions between two input drugs.
json get_ddis(const kb::KnowledgeBase& kb, const std::vector<std::string>& cuis, Target target);
// DDIP/DDIPS analogues over predictions with confidence > 0.
json get_predicted(const kb::KnowledgeBase& kb, const std::vector<std::string>& cuis, Target target);
// Publications annotated with every input CUI.
json get_publications(const kb::KnowledgeBase& kb, const std::vector<std::string>& cuis);
// Case-insensitive label substring or CUI prefix match, at most `limit` drugs.
json find_drugs(const kb::KnowledgeBase& kb, std::string_view query, std::size_t limit = 25);

// Deduction, wedge ranking and per-drug withdrawal over the requested treatment.
// Throws ValidationError for an invalid treatment.
json analyze_treatment(const kb::KnowledgeBase& kb, const std::vector<std::string>& covid,
                       const std::vector<std::string>& comorbidity, wedge::GraphMode mode = wedge::GraphMode::closure);

json health(const kb::KnowledgeBase& kb);

struct Request {
    std::string method;
    std::string path;
    std::multimap<std::string, std::string> params;
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;  // JSON
};

// Transport-independent routing; every response body is JSON.
class Api {
public:
    explicit Api(std::shared_ptr<const kb::KnowledgeBase> kb, wedge::GraphMode mode = wedge::GraphMode::closure);

    Response handle(const Request& request) const;
    const kb::KnowledgeBase& knowledge_base() const noexcept { return *kb_; }

private:
    std::shared_ptr<const kb::KnowledgeBase> kb_;
    wedge::GraphMode mode_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::size_t workers = 4;
};

class Server {
public:
    Server(std::shared_ptr<const Api> api, ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds the socket and returns the bound port. Throws Error on failure.
    int bind();
    // Serves until stop(); bind() is called first if needed.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace ddikg::service

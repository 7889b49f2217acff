#include "ddikg/service.hpp"

#include "ddikg/deduction.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <set>

namespace ddikg::service {

namespace {

json drug_json(const DrugId& d) { return json{{"cui", d.cui()}, {"label", d.label()}}; }

json effect_json(json record, const EffectKind& effect, Impact impact) {
    record["effect"] = effect.surface();
    record["effect_kind"] = effect.pharmacokinetic() ? "pharmacokinetic" : "pharmacodynamic";
    record["impact"] = std::string(to_string(impact));
    return record;
}

json interaction_json(const PkDdi& d) {
    auto r = effect_json(json{{"effector_drug", drug_json(d.precipitant())}, {"affected_drug", drug_json(d.object())}},
                         d.effect(), d.impact());
    r["provenance"] = std::string(to_string(d.provenance()));
    return r;
}

json prediction_json(const kb::PredictedDdi& p) {
    return json{{"effector_drug", drug_json(p.a)},
                {"affected_drug", drug_json(p.b)},
                {"confidence", p.confidence},
                {"provenance", std::string(to_string(Provenance::predicted))},
                {"method", p.method}};
}

// Splits requested CUIs into those present in the store and warnings for the rest.
std::vector<std::string> known(const kb::KnowledgeBase& kb, const std::vector<std::string>& cuis, json& warnings) {
    std::vector<std::string> out;
    for (const auto& c : cuis) {
        if (kb.drug(c))
            out.push_back(c);
        else
            warnings.push_back("unknown CUI " + c);
    }
    return out;
}

json envelope(std::optional<Target> target, const std::vector<std::string>& cuis) {
    json r;
    if (target) r["target"] = std::string(to_string(*target));
    r["cuis"] = cuis;
    return r;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string_view to_string(Target t) noexcept {
    switch (t) {
    case Target::ddi: return "DDI";
    case Target::ddis: return "DDIS";
    case Target::ddip: return "DDIP";
    case Target::ddips: return "DDIPS";
    }
    return "";
}

Target parse_target(std::string_view text) {
    auto t = lower(text);
    if (t == "ddi") return Target::ddi;
    if (t == "ddis") return Target::ddis;
    if (t == "ddip") return Target::ddip;
    if (t == "ddips") return Target::ddips;
    throw InvalidInput("invalid target '" + std::string(text) + "' (expected DDI, DDIS, DDIP or DDIPS)");
}

std::vector<std::string> parse_cuis(const std::vector<std::string>& values) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& v : values) {
        std::size_t start = 0;
        while (start <= v.size()) {
            auto end = v.find(',', start);
            if (end == std::string::npos) end = v.size();
            auto item = std::string(text::trim(std::string_view(v).substr(start, end - start)));
            start = end + 1;
            if (item.empty()) continue;
            if (!DrugId::valid_cui(item)) throw InvalidInput("malformed CUI '" + item + "'");
            if (seen.insert(item).second) out.push_back(item);
        }
    }
    if (out.empty()) throw InvalidInput("at least one CUI is required");
    return out;
}

json get_ddis(const kb::KnowledgeBase& kb, const std::vector<std::string>& cuis, Target target) {
    if (target != Target::ddi && target != Target::ddis)
        throw InvalidInput("target " + std::string(to_string(target)) + " is not valid for interactions");
    auto r = envelope(target, cuis);
    json warnings = json::array();
    auto present = known(kb, cuis, warnings);
    std::set<std::string> wanted(present.begin(), present.end());
    std::set<std::size_t> hits;
    for (const auto& c : present)
        for (auto i : kb.ddis_of(c)) {
            const auto& d = kb.ddis()[i];
            if (target == Target::ddi ||
                (wanted.count(d.precipitant().cui()) && wanted.count(d.object().cui())))
                hits.insert(i);
        }
    json records = json::array();
    for (auto i : hits) records.push_back(interaction_json(kb.ddis()[i]));
    r["interactions"] = std::move(records);
    r["warnings"] = std::move(warnings);
    return r;
}

json get_predicted(const kb::KnowledgeBase& kb, const std::vector<std::string>& cuis, Target target) {
    if (target != Target::ddip && target != Target::ddips)
        throw InvalidInput("target " + std::string(to_string(target)) + " is not valid for predicted interactions");
    auto r = envelope(target, cuis);
    json warnings = json::array();
    auto present = known(kb, cuis, warnings);
    std::set<std::string> wanted(present.begin(), present.end());
    std::set<std::size_t> hits;
    for (const auto& c : present)
        for (auto i : kb.predictions_of(c)) {
            const auto& p = kb.predictions()[i];
            if (!(p.confidence > 0.0)) continue;
            if (target == Target::ddip || (wanted.count(p.a.cui()) && wanted.count(p.b.cui()))) hits.insert(i);
        }
    json records = json::array();
    for (auto i : hits) records.push_back(prediction_json(kb.predictions()[i]));
    r["interactions"] = std::move(records);
    r["warnings"] = std::move(warnings);
    return r;
}

json get_publications(const kb::KnowledgeBase& kb, const std::vector<std::string>& cuis) {
    auto r = envelope(std::nullopt, cuis);
    json warnings = json::array();
    auto present = known(kb, cuis, warnings);
    json records = json::array();
    // An unknown CUI annotates nothing, so no publication can carry all of them.
    if (present.size() == cuis.size()) {
        for (auto i : kb.publications_of(present.front())) {
            const auto& p = kb.publications()[i];
            if (!std::all_of(present.begin(), present.end(), [&](const std::string& c) { return p.cuis.count(c); }))
                continue;
            records.push_back(json{{"id", p.id},
                                   {"title", p.title},
                                   {"year", p.year},
                                   {"journal", p.journal},
                                   {"external_link", p.external_link},
                                   {"cuis", p.cuis}});
        }
    }
    r["publications"] = std::move(records);
    r["warnings"] = std::move(warnings);
    return r;
}

json find_drugs(const kb::KnowledgeBase& kb, std::string_view query, std::size_t limit) {
    auto q = lower(text::trim(query));
    json records = json::array();
    for (const auto& [cui, d] : kb.drugs()) {
        if (records.size() >= limit) break;
        if (q.empty() || lower(d.label()).find(q) != std::string::npos || lower(cui).rfind(q, 0) == 0)
            records.push_back(drug_json(d));
    }
    return json{{"query", std::string(text::trim(query))}, {"drugs", std::move(records)}};
}

json analyze_treatment(const kb::KnowledgeBase& kb, const std::vector<std::string>& covid,
                       const std::vector<std::string>& comorbidity, wedge::GraphMode mode) {
    json warnings = json::array();
    auto resolve = [&](const std::vector<std::string>& cuis) {
        std::vector<DrugId> out;
        for (const auto& c : cuis) {
            if (!DrugId::valid_cui(c)) throw InvalidInput("malformed CUI '" + c + "'");
            if (auto d = kb.drug(c)) {
                out.push_back(*d);
            } else {
                warnings.push_back("unknown CUI " + c);
                out.emplace_back(c, c);
            }
        }
        return out;
    };
    auto covid_drugs = resolve(covid);
    auto comorbidity_drugs = resolve(comorbidity);
    const std::string id = "request";
    auto treatment = validate_treatment(covid_drugs, comorbidity_drugs, id);

    auto members = treatment.member_cuis();
    std::vector<PkDdi> relevant;
    for (const auto& c : members)
        for (auto i : kb.ddis_of(c)) {
            const auto& d = kb.ddis()[i];
            if (members.count(d.precipitant().cui()) && members.count(d.object().cui())) relevant.push_back(d);
        }
    std::sort(relevant.begin(), relevant.end());
    relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());

    auto model = deduce::fixpoint(relevant, id, members);
    auto graph = wedge::build_graph(treatment, model, mode);
    auto report = wedge::wedge_frequencies(graph);
    auto ranking = wedge::rank_drugs(report, graph);

    auto as_drug = [&](const std::string& cui) { return drug_json(graph.node(cui)); };
    json interactions = json::array();
    for (const auto& e : graph.edges()) {
        auto rec = effect_json(json{{"effector_drug", as_drug(e.precipitant)}, {"affected_drug", as_drug(e.object)}},
                               e.effect, e.impact);
        std::string prov = "deduced";
        if (!e.deduced) {
            PkDdi key(graph.node(e.precipitant), e.effect, e.impact, graph.node(e.object));
            auto it = std::lower_bound(relevant.begin(), relevant.end(), key);
            prov = it != relevant.end() && *it == key ? std::string(to_string(it->provenance())) : "extensional";
        }
        rec["provenance"] = prov;
        rec["deduced"] = e.deduced;
        interactions.push_back(std::move(rec));
    }
    json toxicity = json::array();
    for (const auto& t : model.toxicity)
        toxicity.push_back(json{{"effector_drug", as_drug(t.precipitant)}, {"affected_drug", as_drug(t.object)}});
    json effectiveness = json::array();
    for (const auto& t : model.effectiveness)
        effectiveness.push_back(json{{"effector_drug", as_drug(t.precipitant)}, {"affected_drug", as_drug(t.object)}});

    json rank = json::array();
    for (const auto& e : ranking)
        rank.push_back(json{{"drug", drug_json(e.drug)}, {"F", e.frequency}, {"rank", e.rank}, {"tied", e.tied}});

    json reductions = json::array();
    for (const auto& d : treatment.members()) {
        auto red = wedge::ddi_reduction(relevant, treatment, d.cui(), mode);
        json pct = red.percent ? json(*red.percent) : json(nullptr);
        reductions.push_back(json{{"drug", drug_json(d)},
                                  {"edges_before", red.before},
                                  {"edges_after", red.after},
                                  {"reduction_percent", std::move(pct)}});
    }

    json drugs_covid = json::array(), drugs_comorbidity = json::array();
    for (const auto& d : treatment.covid_drugs()) drugs_covid.push_back(drug_json(d));
    for (const auto& d : treatment.comorbidity_drugs()) drugs_comorbidity.push_back(drug_json(d));

    json r;
    r["covid_drugs"] = std::move(drugs_covid);
    r["comorbidity_drugs"] = std::move(drugs_comorbidity);
    r["graph_mode"] = std::string(wedge::to_string(mode));
    r["interactions"] = std::move(interactions);
    r["toxicity"] = std::move(toxicity);
    r["effectiveness"] = std::move(effectiveness);
    r["edge_count"] = report.edges;
    r["deduced_edge_count"] = report.deduced_edges;
    r["deduced_percentage"] = report.deduced_percentage;
    r["wedge_count"] = report.wedge_count;
    r["ranking"] = std::move(rank);
    r["reductions"] = std::move(reductions);
    r["iterations"] = model.iterations();
    r["warnings"] = std::move(warnings);
    return r;
}

json health(const kb::KnowledgeBase& kb) {
    return json{{"status", "ok"},
                {"drugs", kb.drugs().size()},
                {"interactions", kb.ddis().size()},
                {"treatments", kb.treatments().size()},
                {"predictions", kb.predictions().size()},
                {"publications", kb.publications().size()}};
}

Api::Api(std::shared_ptr<const kb::KnowledgeBase> kb, wedge::GraphMode mode) : kb_(std::move(kb)), mode_(mode) {
    if (!kb_) throw InvalidInput("api needs a knowledge base");
}

Response Api::handle(const Request& request) const {
    auto values = [&](const std::string& key) {
        std::vector<std::string> out;
        auto [lo, hi] = request.params.equal_range(key);
        for (auto it = lo; it != hi; ++it) out.push_back(it->second);
        return out;
    };
    auto target = [&]() {
        auto t = values("target");
        if (t.empty()) throw InvalidInput("missing parameter 'target'");
        if (t.size() > 1) throw InvalidInput("parameter 'target' given more than once");
        return parse_target(t.front());
    };
    auto ok = [](const json& j) { return Response{200, j.dump()}; };
    auto error = [](int status, const std::string& message) {
        return Response{status, json{{"error", message}}.dump()};
    };
    const auto& p = request.path;
    const auto& m = request.method;
    try {
        if (p == "/health") {
            if (m != "GET") return error(405, "method not allowed");
            return ok(health(*kb_));
        }
        if (p == "/drugs") {
            if (m != "GET") return error(405, "method not allowed");
            auto q = values("q");
            return ok(find_drugs(*kb_, q.empty() ? std::string() : q.front()));
        }
        if (p == "/ddi") {
            if (m != "GET") return error(405, "method not allowed");
            auto t = target();
            return ok(get_ddis(*kb_, parse_cuis(values("cuis")), t));
        }
        if (p == "/ddi-predicted") {
            if (m != "GET") return error(405, "method not allowed");
            auto t = target();
            return ok(get_predicted(*kb_, parse_cuis(values("cuis")), t));
        }
        if (p == "/publications") {
            if (m != "GET") return error(405, "method not allowed");
            return ok(get_publications(*kb_, parse_cuis(values("cuis"))));
        }
        if (p == "/treatment/analyze") {
            if (m != "POST") return error(405, "method not allowed");
            auto body = json::parse(request.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) throw InvalidInput("body must be a JSON object");
            auto list = [&](const char* key) {
                std::vector<std::string> out;
                if (!body.contains(key)) return out;
                const auto& v = body.at(key);
                if (!v.is_array()) throw InvalidInput(std::string(key) + " must be an array of CUIs");
                for (const auto& e : v) {
                    if (!e.is_string()) throw InvalidInput(std::string(key) + " must be an array of CUIs");
                    out.push_back(e.get<std::string>());
                }
                return out;
            };
            auto mode = mode_;
            if (body.contains("graph_mode")) {
                if (!body.at("graph_mode").is_string()) throw InvalidInput("graph_mode must be a string");
                mode = wedge::parse_graph_mode(body.at("graph_mode").get<std::string>());
            }
            return ok(analyze_treatment(*kb_, list("covid_drugs"), list("comorbidity_drugs"), mode));
        }
        return error(404, "no route for " + p);
    } catch (const InvalidInput& e) {
        return error(400, e.what());
    } catch (const ValidationError& e) {
        return error(400, e.what());
    } catch (const NotFound& e) {
        return error(404, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

struct Server::Impl {
    std::shared_ptr<const Api> api;
    ServerOptions options;
    httplib::Server http;
    int port = -1;
};

Server::Server(std::shared_ptr<const Api> api, ServerOptions options) : impl_(std::make_unique<Impl>()) {
    if (!api) throw InvalidInput("server needs an api");
    if (options.workers == 0) throw InvalidInput("server needs at least one worker");
    impl_->api = std::move(api);
    impl_->options = std::move(options);
    auto workers = impl_->options.workers;
    impl_->http.new_task_queue = [workers] { return new httplib::ThreadPool(workers, 64 * workers); };
    auto handler = [api = impl_->api](const httplib::Request& req, httplib::Response& res) {
        Request r{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params) r.params.emplace(k, v);
        auto out = api->handle(r);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    for (const char* path : {"/health", "/drugs", "/ddi", "/ddi-predicted", "/publications", "/treatment/analyze"}) {
        impl_->http.Get(path, handler);
        impl_->http.Post(path, handler);
    }
    impl_->http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        res.set_content(json{{"error", "no route for " + req.path}}.dump(), "application/json");
    });
}

Server::~Server() { stop(); }

int Server::bind() {
    if (impl_->port >= 0) return impl_->port;
    const auto& o = impl_->options;
    int port = o.port == 0 ? impl_->http.bind_to_any_port(o.host) : (impl_->http.bind_to_port(o.host, o.port) ? o.port : -1);
    if (port < 0) throw Error("cannot bind " + o.host + ":" + std::to_string(o.port));
    impl_->port = port;
    return port;
}

void Server::listen() {
    bind();
    impl_->http.listen_after_bind();
}

void Server::stop() {
    if (impl_->http.is_running()) impl_->http.stop();
}

} // namespace ddikg::service

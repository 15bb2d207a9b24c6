#pragma once

// Corpus persistence and bibliographic metadata retrieval.
//
// The corpus is JSON Lines: a header line naming the schema version and the
// publication window, then one paper record per line. Loading is forgiving
// per line (bad records are collected, good ones kept) and strict about the
// header, since a wrong schema silently reinterprets every line after it.
//
// Metadata lookups go cache first, then CrossRef, then OpenAlex, merging
// fields in that order. The cache is content-addressed by normalized DOI so
// replaying a fetch against a warm cache touches the network zero times.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "detail/csv.hpp"
#include "detail/dates.hpp"
#include "detail/sha256.hpp"
#include "errors.hpp"
#include "paper_record.hpp"

namespace frontier_audit::corpus {

struct InvalidDoi : Error {
    using Error::Error;
};
struct NotFound : Error {
    using Error::Error;
};
struct TransportError : Error {
    using Error::Error;
};
struct CacheMiss : Error {
    using Error::Error;
};
struct SchemaVersionMismatch : Error {
    using Error::Error;
};

inline constexpr std::string_view kSchemaVersion = "frontier-audit-corpus/1";

// Lowercases, strips the resolver/scheme prefixes, and insists on a
// registrant suffix. Anything that does not start with "10." after
// stripping is not a DOI we can send anywhere.
inline std::string normalize_doi(std::string_view raw) {
    std::string s(raw);
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    s = (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::string_view prefix : {"https://doi.org/", "http://doi.org/",
                                    "https://dx.doi.org/", "http://dx.doi.org/", "doi:"})
        if (s.rfind(prefix, 0) == 0) {
            s.erase(0, prefix.size());
            break;
        }
    if (s.rfind("10.", 0) != 0 || s.find('/') == std::string::npos)
        throw InvalidDoi("not a DOI: '" + std::string(raw) + "'");
    return s;
}

// ---------------------------------------------------------------------------
// Paper record <-> JSON

inline nlohmann::ordered_json record_to_json(const PaperRecord& p) {
    nlohmann::ordered_json j;
    j["doi"] = p.doi;
    j["publication_date"] = p.publication_date.iso();
    j["journal"] = p.journal;
    j["domain"] = std::string(domain_name(p.domain));
    j["primary_model_raw"] = p.primary_model_raw;
    if (p.primary_model) j["primary_model"] = *p.primary_model;
    if (!p.models_evaluated.empty()) j["models_evaluated"] = p.models_evaluated;
    if (p.eval_date_disclosed) j["eval_date_disclosed"] = p.eval_date_disclosed->iso();
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (ConfigKey k : kAllConfigKeys) {
        const auto& field = p.config[k];
        if (!field) continue;
        nlohmann::ordered_json f;
        f["status"] = std::string(disclosure_name(field->status));
        if (field->status == DisclosureStatus::disclosed && !field->value.empty())
            f["value"] = field->value;
        cfg[std::string(config_key_name(k))] = std::move(f);
    }
    if (!cfg.empty()) j["config"] = std::move(cfg);
    if (p.conclusion_valence)
        j["conclusion_valence"] = std::string(valence_name(*p.conclusion_valence));
    if (p.conclusion_framing)
        j["conclusion_framing"] = std::string(framing_name(*p.conclusion_framing));
    if (p.human_comparator) j["human_comparator"] = *p.human_comparator;
    if (!p.task_description.empty()) j["task_description"] = p.task_description;
    if (!p.extraction_confidence.empty()) j["extraction_confidence"] = p.extraction_confidence;
    if (!p.proxy_dates.empty()) {
        nlohmann::ordered_json px = nlohmann::ordered_json::object();
        for (const auto& [name, date] : p.proxy_dates) px[name] = date.iso();
        j["proxy_dates"] = std::move(px);
    }
    return j;
}

inline PaperRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("paper record is not a JSON object");
    for (const char* key : {"doi", "publication_date", "journal", "domain"})
        if (!j.contains(key))
            throw ParseError(std::string("paper record missing '") + key + "'");
    PaperRecord p;
    p.doi = j.at("doi").get<std::string>();
    p.publication_date = Date::parse(j.at("publication_date").get<std::string>());
    p.journal = j.at("journal").get<std::string>();
    p.domain = parse_domain(j.at("domain").get<std::string>());
    if (j.contains("primary_model_raw"))
        p.primary_model_raw = j.at("primary_model_raw").get<std::string>();
    if (j.contains("primary_model") && !j.at("primary_model").is_null())
        p.primary_model = j.at("primary_model").get<std::string>();
    if (j.contains("models_evaluated"))
        p.models_evaluated = j.at("models_evaluated").get<std::vector<std::string>>();
    if (j.contains("eval_date_disclosed") && !j.at("eval_date_disclosed").is_null())
        p.eval_date_disclosed = Date::parse(j.at("eval_date_disclosed").get<std::string>());
    if (j.contains("config")) {
        const auto& cfg = j.at("config");
        if (!cfg.is_object()) throw ParseError("config must be an object");
        for (auto it = cfg.begin(); it != cfg.end(); ++it) {
            ConfigKey k = parse_config_key(it.key());
            if (it.value().is_null()) continue;
            ConfigField f;
            f.status = parse_disclosure(it.value().at("status").get<std::string>());
            if (it.value().contains("value") && !it.value().at("value").is_null())
                f.value = it.value().at("value").get<std::string>();
            p.config[k] = std::move(f);
        }
    }
    if (j.contains("conclusion_valence") && !j.at("conclusion_valence").is_null())
        p.conclusion_valence = parse_valence(j.at("conclusion_valence").get<std::string>());
    if (j.contains("conclusion_framing") && !j.at("conclusion_framing").is_null())
        p.conclusion_framing = parse_framing(j.at("conclusion_framing").get<std::string>());
    if (j.contains("human_comparator") && !j.at("human_comparator").is_null())
        p.human_comparator = j.at("human_comparator").get<bool>();
    if (j.contains("task_description"))
        p.task_description = j.at("task_description").get<std::string>();
    if (j.contains("extraction_confidence"))
        p.extraction_confidence =
            j.at("extraction_confidence").get<std::map<std::string, double>>();
    if (j.contains("proxy_dates")) {
        for (auto it = j.at("proxy_dates").begin(); it != j.at("proxy_dates").end(); ++it)
            p.proxy_dates[it.key()] = Date::parse(it.value().get<std::string>());
    }
    return p;
}

// ---------------------------------------------------------------------------
// Corpus files

struct CorpusHeader {
    std::string schema{kSchemaVersion};
    Date window_start;
    Date window_end;
    std::string snapshot;  // optional label for provenance manifests
};

struct LineError {
    size_t line = 0;  // 1-based; the header is line 1
    std::string message;
};

struct CorpusLoad {
    CorpusHeader header;
    std::vector<PaperRecord> records;
    std::vector<LineError> errors;
    std::map<Domain, size_t> by_domain;
    std::map<int, size_t> by_year;
    std::string content_hash;  // sha256 of the raw bytes, for run manifests
};

inline CorpusHeader parse_corpus_header(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("corpus header is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema") || !j.contains("window"))
        throw ParseError("corpus header needs 'schema' and 'window'");
    CorpusHeader h;
    h.schema = j.at("schema").get<std::string>();
    if (h.schema != kSchemaVersion)
        throw SchemaVersionMismatch("corpus schema '" + h.schema + "', expected '" +
                                    std::string(kSchemaVersion) + "'");
    h.window_start = Date::parse(j.at("window").at("start").get<std::string>());
    h.window_end = Date::parse(j.at("window").at("end").get<std::string>());
    if (h.window_end < h.window_start) throw ParseError("corpus window runs backwards");
    if (j.contains("snapshot")) h.snapshot = j.at("snapshot").get<std::string>();
    return h;
}

// Checks a parsed record against the header's window and the date rules.
// Returns an explanation for the first violation, or nothing when clean.
inline std::optional<std::string> record_violation(const PaperRecord& p, const CorpusHeader& h) {
    try {
        normalize_doi(p.doi);
    } catch (const InvalidDoi& e) {
        return std::string(e.what());
    }
    if (p.publication_date < h.window_start || h.window_end < p.publication_date)
        return "publication_date " + p.publication_date.iso() + " outside corpus window " +
               h.window_start.iso() + ".." + h.window_end.iso();
    if (p.eval_date_disclosed && p.publication_date < *p.eval_date_disclosed)
        return "eval_date_disclosed " + p.eval_date_disclosed->iso() +
               " is after publication_date " + p.publication_date.iso();
    std::vector<std::string> hits = forbidden_proxy_hits(p);
    if (!hits.empty()) {
        std::string msg = "eval_date_disclosed equals forbidden proxy: " + hits.front();
        for (size_t i = 1; i < hits.size(); ++i) msg += ", " + hits[i];
        return msg;
    }
    return std::nullopt;
}

inline CorpusLoad parse_corpus(const std::string& text) {
    CorpusLoad out;
    out.content_hash = detail::sha256_hex(text);

    size_t pos = 0;
    size_t line_no = 0;
    std::set<std::string> seen_dois;
    bool header_done = false;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) {
            if (!header_done && pos > text.size())
                throw ParseError("corpus is empty, expected a header line");
            continue;
        }
        if (!header_done) {
            out.header = parse_corpus_header(line);  // fatal on a bad header
            header_done = true;
            continue;
        }
        try {
            PaperRecord p = record_from_json(nlohmann::json::parse(line));
            if (auto why = record_violation(p, out.header)) throw ValidationError(*why);
            std::string norm = normalize_doi(p.doi);
            if (!seen_dois.insert(norm).second)
                throw ValidationError("duplicate doi " + norm);
            ++out.by_domain[p.domain];
            ++out.by_year[p.publication_year()];
            out.records.push_back(std::move(p));
        } catch (const Error& e) {
            out.errors.push_back({line_no, e.what()});
        } catch (const nlohmann::json::exception& e) {
            out.errors.push_back({line_no, std::string("bad JSON: ") + e.what()});
        }
    }
    if (!header_done) throw ParseError("corpus is empty, expected a header line");
    return out;
}

inline CorpusLoad load_corpus(const std::string& path) {
    return parse_corpus(detail::read_file(path));
}

inline std::string serialize_corpus(const CorpusHeader& header,
                                    const std::vector<PaperRecord>& records) {
    nlohmann::ordered_json h;
    h["schema"] = header.schema;
    h["window"] = {{"start", header.window_start.iso()}, {"end", header.window_end.iso()}};
    if (!header.snapshot.empty()) h["snapshot"] = header.snapshot;
    std::string out = h.dump();
    out += '\n';
    for (const PaperRecord& p : records) {
        out += record_to_json(p).dump();
        out += '\n';
    }
    return out;
}

inline void write_corpus(const std::string& path, const CorpusHeader& header,
                         const std::vector<PaperRecord>& records) {
    detail::write_file(path, serialize_corpus(header, records));
}

// ---------------------------------------------------------------------------
// Metadata retrieval

struct MetadataResponse {
    std::string doi;  // normalized
    std::string title;
    std::optional<std::string> abstract_text;
    std::optional<Date> publication_date;
    std::string journal;
    std::string source;  // "crossref", "openalex", or "cache"
    std::string fetched_at;
};

inline nlohmann::ordered_json metadata_to_json(const MetadataResponse& m) {
    nlohmann::ordered_json j;
    j["doi"] = m.doi;
    j["title"] = m.title;
    if (m.abstract_text) j["abstract"] = *m.abstract_text;
    if (m.publication_date) j["publication_date"] = m.publication_date->iso();
    j["journal"] = m.journal;
    j["source"] = m.source;
    j["fetched_at"] = m.fetched_at;
    return j;
}

inline MetadataResponse metadata_from_json(const nlohmann::json& j) {
    MetadataResponse m;
    m.doi = j.at("doi").get<std::string>();
    m.title = j.at("title").get<std::string>();
    if (j.contains("abstract") && !j.at("abstract").is_null())
        m.abstract_text = j.at("abstract").get<std::string>();
    if (j.contains("publication_date") && !j.at("publication_date").is_null())
        m.publication_date = Date::parse(j.at("publication_date").get<std::string>());
    m.journal = j.at("journal").get<std::string>();
    m.source = j.at("source").get<std::string>();
    m.fetched_at = j.at("fetched_at").get<std::string>();
    return m;
}

// Drops XML/JATS tags and collapses runs of whitespace. CrossRef ships
// abstracts as JATS fragments; we only want the prose.
inline std::string strip_markup(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_tag = false;
    bool pending_space = false;
    for (char c : text) {
        if (c == '<') {
            in_tag = true;
            continue;
        }
        if (c == '>') {
            in_tag = false;
            continue;
        }
        if (in_tag) continue;
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

// OpenAlex stores abstracts as word -> positions. Rebuilding the text is a
// stable sort of (position, word) pairs joined by single spaces.
inline std::string reconstruct_abstract(const nlohmann::json& inverted) {
    if (!inverted.is_object()) throw ParseError("abstract_inverted_index is not an object");
    std::vector<std::pair<long, std::string>> slots;
    for (auto it = inverted.begin(); it != inverted.end(); ++it) {
        for (const auto& pos : it.value()) slots.emplace_back(pos.get<long>(), it.key());
    }
    std::sort(slots.begin(), slots.end());
    std::string out;
    for (const auto& [pos, word] : slots) {
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

inline std::optional<Date> date_from_parts(const nlohmann::json& parts) {
    if (!parts.is_array() || parts.empty() || !parts[0].is_array() || parts[0].empty())
        return std::nullopt;
    const auto& p = parts[0];
    int y = p[0].get<int>();
    int m = p.size() > 1 ? p[1].get<int>() : 1;
    int d = p.size() > 2 ? p[2].get<int>() : 1;
    return Date(y, m, d);
}

// Fills only the fields `m` is still missing, so the caller controls source
// precedence by the order it applies responses.
inline void merge_crossref(MetadataResponse& m, const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("crossref response not JSON: ") + e.what());
    }
    const auto& msg = j.at("message");
    if (m.title.empty() && msg.contains("title") && !msg.at("title").empty())
        m.title = msg.at("title")[0].get<std::string>();
    if (m.journal.empty() && msg.contains("container-title") &&
        !msg.at("container-title").empty())
        m.journal = msg.at("container-title")[0].get<std::string>();
    if (!m.publication_date && msg.contains("issued") &&
        msg.at("issued").contains("date-parts"))
        m.publication_date = date_from_parts(msg.at("issued").at("date-parts"));
    if (!m.abstract_text && msg.contains("abstract")) {
        std::string plain = strip_markup(msg.at("abstract").get<std::string>());
        if (!plain.empty()) m.abstract_text = std::move(plain);
    }
}

inline void merge_openalex(MetadataResponse& m, const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("openalex response not JSON: ") + e.what());
    }
    if (m.title.empty()) {
        if (j.contains("title") && j.at("title").is_string())
            m.title = j.at("title").get<std::string>();
        else if (j.contains("display_name") && j.at("display_name").is_string())
            m.title = j.at("display_name").get<std::string>();
    }
    if (!m.publication_date && j.contains("publication_date") &&
        j.at("publication_date").is_string())
        m.publication_date = Date::parse(j.at("publication_date").get<std::string>());
    if (m.journal.empty() && j.contains("primary_location") &&
        j.at("primary_location").is_object()) {
        const auto& loc = j.at("primary_location");
        if (loc.contains("source") && loc.at("source").is_object() &&
            loc.at("source").contains("display_name") &&
            loc.at("source").at("display_name").is_string())
            m.journal = loc.at("source").at("display_name").get<std::string>();
    }
    if (!m.abstract_text && j.contains("abstract_inverted_index") &&
        j.at("abstract_inverted_index").is_object()) {
        std::string text = reconstruct_abstract(j.at("abstract_inverted_index"));
        if (!text.empty()) m.abstract_text = std::move(text);
    }
}

struct HttpResponse {
    int status = 0;
    std::string body;
};

// The one seam the network passes through. Tests substitute stubs; the CLI
// plugs in an httplib-backed implementation.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual HttpResponse get(const std::string& host, const std::string& path,
                             const std::string& contact) = 0;
};

class MetadataCache {
  public:
    explicit MetadataCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::filesystem::path path_for(const std::string& normalized_doi) const {
        return dir_ / (detail::sha256_hex(normalized_doi) + ".json");
    }

    std::optional<MetadataResponse> lookup(const std::string& normalized_doi) const {
        auto p = path_for(normalized_doi);
        if (!std::filesystem::exists(p)) return std::nullopt;
        return metadata_from_json(nlohmann::json::parse(detail::read_file(p.string())));
    }

    void store(const MetadataResponse& m) const {
        detail::write_file(path_for(m.doi).string(), metadata_to_json(m).dump() + "\n");
    }

  private:
    std::filesystem::path dir_;
};

struct FetchOptions {
    bool offline = false;
    std::string contact;        // defaults from FRONTIER_AUDIT_CONTACT
    int max_attempts = 3;       // per source, for transport-level failures
    long backoff_ms = 250;      // doubled after each failed attempt
    long politeness_ms = 0;     // pause before every network call
    std::string fetched_at;     // override for deterministic cache contents
};

inline std::string default_contact() {
    const char* env = std::getenv("FRONTIER_AUDIT_CONTACT");
    return env ? env : "";
}

inline std::string utc_timestamp_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

class MetadataClient {
  public:
    MetadataClient(MetadataCache cache, Transport* transport, FetchOptions options = {})
        : cache_(std::move(cache)), transport_(transport), options_(std::move(options)) {
        if (options_.contact.empty()) options_.contact = default_contact();
        if (options_.max_attempts < 1) throw ConfigError("max_attempts must be positive");
    }

    // Cache, then CrossRef, then OpenAlex. Later sources only fill fields the
    // earlier ones left blank; `source` records the first one that answered.
    MetadataResponse fetch(const std::string& raw_doi) {
        std::string doi = normalize_doi(raw_doi);
        if (auto cached = cache_.lookup(doi)) {
            cached->source = "cache";
            return *cached;
        }
        if (options_.offline) throw CacheMiss("no cached metadata for " + doi + " (offline)");
        if (!transport_) throw ConfigError("no transport configured");

        MetadataResponse m;
        m.doi = doi;
        bool answered = false;
        int misses = 0;
        for (int which = 0; which < 2; ++which) {
            if (answered && complete(m)) break;
            bool crossref = which == 0;
            std::string host = crossref ? "api.crossref.org" : "api.openalex.org";
            std::string path = crossref ? "/works/" + doi : "/works/doi:" + doi;
            HttpResponse r = get_with_retries(host, path);
            if (r.status == 404) {
                ++misses;
                continue;
            }
            if (crossref)
                merge_crossref(m, r.body);
            else
                merge_openalex(m, r.body);
            if (!answered) m.source = crossref ? "crossref" : "openalex";
            answered = true;
        }
        if (!answered) throw NotFound("no source knows " + doi + " (" +
                                      std::to_string(misses) + " misses)");
        m.fetched_at = options_.fetched_at.empty() ? utc_timestamp_now() : options_.fetched_at;
        cache_.store(m);
        return m;
    }

  private:
    static bool complete(const MetadataResponse& m) {
        return !m.title.empty() && m.publication_date && !m.journal.empty() &&
               m.abstract_text.has_value();
    }

    HttpResponse get_with_retries(const std::string& host, const std::string& path) {
        long backoff = options_.backoff_ms;
        std::string last_error;
        for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
            if (attempt > 1 && backoff > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
                backoff *= 2;
            }
            if (options_.politeness_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(options_.politeness_ms));
            try {
                HttpResponse r = transport_->get(host, path, options_.contact);
                if (r.status == 200 || r.status == 404) return r;
                last_error = host + path + " returned " + std::to_string(r.status);
            } catch (const std::exception& e) {
                last_error = host + path + ": " + e.what();
            }
        }
        throw TransportError(last_error + " after " + std::to_string(options_.max_attempts) +
                             " attempts");
    }

    MetadataCache cache_;
    Transport* transport_;
    FetchOptions options_;
};

// A record skeleton for a paper we only know bibliographically. Valence,
// framing, and the eval configuration stay empty: those are coded judgments,
// never inferred from metadata.
inline PaperRecord to_record(const MetadataResponse& m) {
    if (!m.publication_date)
        throw ValidationError("metadata for " + m.doi + " has no publication date");
    PaperRecord p;
    p.doi = m.doi;
    p.publication_date = *m.publication_date;
    p.journal = m.journal;
    p.domain = Domain::other;
    return p;
}

}  // namespace frontier_audit::corpus

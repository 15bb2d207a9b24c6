#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "frontier_audit/corpus_io.hpp"
#include "frontier_audit/detail/sha256.hpp"

using namespace frontier_audit;
using namespace frontier_audit::corpus;

namespace {

namespace fs = std::filesystem;

// Scratch directory under the system temp root, removed on scope exit.
struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("fa_corpus_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() { fs::remove_all(path); }
};

PaperRecord full_record() {
    PaperRecord p;
    p.doi = "10.1234/full.2025";
    p.publication_date = Date(2025, 4, 10);
    p.journal = "J Synth Eval";
    p.domain = Domain::medicine;
    p.primary_model_raw = "GPT-4o (May)";
    p.primary_model = "gpt-4o";
    p.models_evaluated = {"gpt-4o", "claude-3.5-sonnet"};
    p.eval_date_disclosed = Date(2025, 1, 15);
    p.config[ConfigKey::reasoning_mode] = ConfigField::disclosed("extended");
    p.config[ConfigKey::tool_use] = ConfigField::undisclosed();
    p.config[ConfigKey::temperature] = ConfigField::not_applicable();
    p.conclusion_valence = Valence::negative;
    p.conclusion_framing = Framing::ai_generic;
    p.human_comparator = true;
    p.task_description = "drug interaction triage";
    p.extraction_confidence = {{"valence", 0.92}, {"domain", 1.0}};
    p.proxy_dates = {{"submission", Date(2024, 12, 1)}, {"model_release", Date(2024, 5, 13)}};
    return p;
}

PaperRecord minimal_record(const std::string& doi, Date pub, Domain d = Domain::coding) {
    PaperRecord p;
    p.doi = doi;
    p.publication_date = pub;
    p.journal = "J Min";
    p.domain = d;
    return p;
}

CorpusHeader test_header() {
    CorpusHeader h;
    h.window_start = Date(2022, 11, 30);
    h.window_end = Date(2026, 6, 30);
    h.snapshot = "unit";
    return h;
}

bool same_record(const PaperRecord& a, const PaperRecord& b) {
    bool configs_match = true;
    for (ConfigKey k : kAllConfigKeys) {
        const auto &fa = a.config[k], &fb = b.config[k];
        if (fa.has_value() != fb.has_value()) configs_match = false;
        else if (fa && (fa->status != fb->status || fa->value != fb->value))
            configs_match = false;
    }
    return a.doi == b.doi && a.publication_date == b.publication_date &&
           a.journal == b.journal && a.domain == b.domain &&
           a.primary_model_raw == b.primary_model_raw && a.primary_model == b.primary_model &&
           a.models_evaluated == b.models_evaluated &&
           a.eval_date_disclosed == b.eval_date_disclosed && configs_match &&
           a.conclusion_valence == b.conclusion_valence &&
           a.conclusion_framing == b.conclusion_framing &&
           a.human_comparator == b.human_comparator &&
           a.task_description == b.task_description &&
           a.extraction_confidence == b.extraction_confidence && a.proxy_dates == b.proxy_dates;
}

// Canned responses keyed by host+path; counts every call so tests can prove
// the cache kept the client off the network.
class StubTransport : public Transport {
  public:
    std::map<std::string, HttpResponse> routes;
    std::vector<std::string> calls;

    HttpResponse get(const std::string& host, const std::string& path,
                     const std::string&) override {
        calls.push_back(host + path);
        auto it = routes.find(host + path);
        if (it == routes.end()) return {404, "{}"};
        return it->second;
    }
};

// Throws on contact. Used to prove a warm cache never touches the network.
class PoisonTransport : public Transport {
  public:
    int calls = 0;
    HttpResponse get(const std::string&, const std::string&, const std::string&) override {
        ++calls;
        throw std::runtime_error("network touched");
    }
};

// Fails a fixed number of times before answering.
class FlakyTransport : public Transport {
  public:
    int failures_left;
    HttpResponse answer;
    int calls = 0;
    FlakyTransport(int failures, HttpResponse ok) : failures_left(failures), answer(ok) {}
    HttpResponse get(const std::string&, const std::string&, const std::string&) override {
        ++calls;
        if (failures_left-- > 0) return {503, "busy"};
        return answer;
    }
};

FetchOptions quiet_options() {
    FetchOptions o;
    o.contact = "tests@example.org";
    o.backoff_ms = 0;
    o.fetched_at = "2026-08-19T00:00:00Z";
    return o;
}

const char* kCrossrefBody = R"({"message": {
    "title": ["Benchmarking clinical triage"],
    "container-title": ["J Synth Eval"],
    "issued": {"date-parts": [[2025, 3, 20]]},
    "abstract": "<jats:p>Models were <i>evaluated</i> on triage.</jats:p>"
}})";

const char* kOpenAlexBody = R"({
    "title": "Benchmarking clinical triage",
    "publication_date": "2025-03-20",
    "primary_location": {"source": {"display_name": "J Synth Eval"}},
    "abstract_inverted_index": {"Models": [0], "were": [1], "evaluated": [2],
                                "on": [3], "triage.": [4]}
})";

}  // namespace

TEST_CASE("DOI normalization strips resolvers and validates shape") {
    CHECK(normalize_doi("10.1234/AbC") == "10.1234/abc");
    CHECK(normalize_doi("https://doi.org/10.5555/X.Y") == "10.5555/x.y");
    CHECK(normalize_doi("http://dx.doi.org/10.1/q") == "10.1/q");
    CHECK(normalize_doi("doi:10.99/Z") == "10.99/z");
    CHECK(normalize_doi("  10.1/y \n") == "10.1/y");
    CHECK(normalize_doi("DOI:10.7/W") == "10.7/w");

    CHECK_THROWS_AS(normalize_doi(""), InvalidDoi);
    CHECK_THROWS_AS(normalize_doi("hdl:1721.1/1234"), InvalidDoi);
    CHECK_THROWS_AS(normalize_doi("11.1234/x"), InvalidDoi);
    CHECK_THROWS_AS(normalize_doi("10.1234"), InvalidDoi);  // registrant only
    CHECK_THROWS_AS(normalize_doi("https://doi.org/"), InvalidDoi);
}

TEST_CASE("paper records survive a JSON round trip") {
    SECTION("every field populated") {
        PaperRecord p = full_record();
        PaperRecord q = record_from_json(record_to_json(p));
        CHECK(same_record(p, q));
    }

    SECTION("minimal record omits absent keys") {
        PaperRecord p = minimal_record("10.1/min", Date(2024, 2, 2));
        nlohmann::ordered_json j = record_to_json(p);
        CHECK_FALSE(j.contains("eval_date_disclosed"));
        CHECK_FALSE(j.contains("config"));
        CHECK_FALSE(j.contains("conclusion_valence"));
        CHECK_FALSE(j.contains("human_comparator"));
        CHECK_FALSE(j.contains("proxy_dates"));
        PaperRecord q = record_from_json(j);
        CHECK(same_record(p, q));
        CHECK_FALSE(q.primary_model.has_value());
        for (ConfigKey k : kAllConfigKeys) CHECK_FALSE(q.config[k].has_value());
    }

    SECTION("unset config holes stay distinct from extracted undisclosed") {
        PaperRecord p = full_record();
        PaperRecord q = record_from_json(record_to_json(p));
        REQUIRE(q.config[ConfigKey::tool_use].has_value());
        CHECK(q.config[ConfigKey::tool_use]->status == DisclosureStatus::undisclosed);
        CHECK_FALSE(q.config[ConfigKey::scaffolding].has_value());
    }

    SECTION("missing required keys are parse errors") {
        nlohmann::json j = record_to_json(minimal_record("10.1/min", Date(2024, 2, 2)));
        j.erase("domain");
        CHECK_THROWS_AS(record_from_json(j), ParseError);
        CHECK_THROWS_AS(record_from_json(nlohmann::json::array()), ParseError);
    }
}

TEST_CASE("corpus write then load reproduces records and counts") {
    std::vector<PaperRecord> papers = {
        full_record(),
        minimal_record("10.2/a", Date(2024, 7, 1), Domain::coding),
        minimal_record("10.2/b", Date(2025, 7, 1), Domain::coding),
        minimal_record("10.2/c", Date(2025, 8, 1), Domain::law),
    };
    std::string text = serialize_corpus(test_header(), papers);

    CorpusLoad load = parse_corpus(text);
    CHECK(load.errors.empty());
    REQUIRE(load.records.size() == papers.size());
    for (size_t i = 0; i < papers.size(); ++i) CHECK(same_record(load.records[i], papers[i]));
    CHECK(load.header.schema == std::string(kSchemaVersion));
    CHECK(load.header.window_start == Date(2022, 11, 30));
    CHECK(load.header.window_end == Date(2026, 6, 30));
    CHECK(load.header.snapshot == "unit");
    CHECK(load.by_domain.at(Domain::coding) == 2);
    CHECK(load.by_domain.at(Domain::medicine) == 1);
    CHECK(load.by_domain.at(Domain::law) == 1);
    CHECK(load.by_year.at(2024) == 1);
    CHECK(load.by_year.at(2025) == 3);
    CHECK(load.content_hash == detail::sha256_hex(text));

    SECTION("reserialization is byte identical") {
        CHECK(serialize_corpus(load.header, load.records) == text);
    }

    SECTION("through a file") {
        ScratchDir dir("roundtrip");
        std::string path = (dir.path / "corpus.jsonl").string();
        write_corpus(path, test_header(), papers);
        CorpusLoad reread = load_corpus(path);
        REQUIRE(reread.records.size() == papers.size());
        CHECK(reread.content_hash == load.content_hash);
    }
}

TEST_CASE("bad lines are collected while good lines load") {
    std::string text = serialize_corpus(test_header(), {});
    text += record_to_json(minimal_record("10.3/good1", Date(2024, 5, 5))).dump() + "\n";
    text += "{not json at all\n";
    text += record_to_json(minimal_record("10.3/early", Date(2021, 1, 1))).dump() + "\n";
    PaperRecord backwards = minimal_record("10.3/backwards", Date(2024, 3, 1));
    backwards.eval_date_disclosed = Date(2024, 6, 1);
    text += record_to_json(backwards).dump() + "\n";
    PaperRecord proxy = minimal_record("10.3/proxy", Date(2024, 3, 1));
    proxy.eval_date_disclosed = Date(2024, 1, 10);
    proxy.proxy_dates["submission"] = Date(2024, 1, 10);
    text += record_to_json(proxy).dump() + "\n";
    text += record_to_json(minimal_record("10.3/GOOD1", Date(2024, 8, 8))).dump() + "\n";
    PaperRecord bad_doi = minimal_record("not-a-doi", Date(2024, 5, 5));
    text += record_to_json(bad_doi).dump() + "\n";
    text += record_to_json(minimal_record("10.3/good2", Date(2025, 5, 5))).dump() + "\n";

    CorpusLoad load = parse_corpus(text);
    REQUIRE(load.records.size() == 2);
    CHECK(load.records[0].doi == "10.3/good1");
    CHECK(load.records[1].doi == "10.3/good2");
    REQUIRE(load.errors.size() == 6);
    CHECK(load.errors[0].line == 3);  // header is line 1, first record line 2
    CHECK(load.errors[0].message.find("JSON") != std::string::npos);
    CHECK(load.errors[1].line == 4);
    CHECK(load.errors[1].message.find("outside corpus window") != std::string::npos);
    CHECK(load.errors[2].line == 5);
    CHECK(load.errors[2].message.find("after publication_date") != std::string::npos);
    CHECK(load.errors[3].line == 6);
    CHECK(load.errors[3].message.find("forbidden proxy") != std::string::npos);
    CHECK(load.errors[3].message.find("submission") != std::string::npos);
    CHECK(load.errors[4].line == 7);  // 10.3/GOOD1 normalizes onto good1
    CHECK(load.errors[4].message.find("duplicate doi") != std::string::npos);
    CHECK(load.errors[5].line == 8);
    CHECK(load.errors[5].message.find("not a DOI") != std::string::npos);
    CHECK(load.by_year.at(2024) == 1);
    CHECK(load.by_year.at(2025) == 1);
}

TEST_CASE("header problems are fatal") {
    CHECK_THROWS_AS(parse_corpus(""), ParseError);
    CHECK_THROWS_AS(parse_corpus("\n\n"), ParseError);
    CHECK_THROWS_AS(parse_corpus("garbage\n"), ParseError);
    CHECK_THROWS_AS(parse_corpus("{\"schema\": \"frontier-audit-corpus/1\"}\n"), ParseError);

    std::string wrong = R"({"schema": "frontier-audit-corpus/2",)"
                        R"( "window": {"start": "2022-11-30", "end": "2026-06-30"}})";
    CHECK_THROWS_AS(parse_corpus(wrong + "\n"), SchemaVersionMismatch);

    std::string backwards = R"({"schema": "frontier-audit-corpus/1",)"
                            R"( "window": {"start": "2026-06-30", "end": "2022-11-30"}})";
    CHECK_THROWS_AS(parse_corpus(backwards + "\n"), ParseError);

    SECTION("blank lines before the header are tolerated") {
        std::string text = "\n" + serialize_corpus(test_header(), {minimal_record(
                                      "10.4/x", Date(2024, 1, 2))});
        CorpusLoad load = parse_corpus(text);
        CHECK(load.records.size() == 1);
        CHECK(load.errors.empty());
    }
}

TEST_CASE("markup stripping and abstract reconstruction") {
    CHECK(strip_markup("<jats:p>Hello <b>world</b>.</jats:p>") == "Hello world.");
    CHECK(strip_markup("  spaced\n\nout  ") == "spaced out");
    CHECK(strip_markup("<only><tags/></only>") == "");

    nlohmann::json inv = {{"the", {0, 4}}, {"cat", {1}}, {"sat", {2}},
                          {"on", {3}},     {"mat", {5}}};
    CHECK(reconstruct_abstract(inv) == "the cat sat on the mat");
    CHECK(reconstruct_abstract(nlohmann::json::object()) == "");
    CHECK_THROWS_AS(reconstruct_abstract(nlohmann::json::array()), ParseError);

    // independent oracle: place words by position, join
    nlohmann::json sample = nlohmann::json::parse(kOpenAlexBody)["abstract_inverted_index"];
    std::vector<std::string> slots(5);
    for (auto it = sample.begin(); it != sample.end(); ++it)
        for (const auto& pos : it.value()) slots[pos.get<size_t>()] = it.key();
    std::string expect;
    for (const auto& w : slots) {
        if (!expect.empty()) expect += ' ';
        expect += w;
    }
    CHECK(reconstruct_abstract(sample) == expect);
}

TEST_CASE("date parts pad missing month and day") {
    CHECK(*date_from_parts(nlohmann::json::parse("[[2025]]")) == Date(2025, 1, 1));
    CHECK(*date_from_parts(nlohmann::json::parse("[[2025, 7]]")) == Date(2025, 7, 1));
    CHECK(*date_from_parts(nlohmann::json::parse("[[2025, 7, 9]]")) == Date(2025, 7, 9));
    CHECK_FALSE(date_from_parts(nlohmann::json::parse("[]")).has_value());
    CHECK_FALSE(date_from_parts(nlohmann::json::parse("[[]]")).has_value());
}

TEST_CASE("metadata fetch prefers crossref and caches the answer") {
    ScratchDir dir("fetch");
    StubTransport net;
    net.routes["api.crossref.org/works/10.1234/full.2025"] = {200, kCrossrefBody};
    MetadataClient client(MetadataCache(dir.path), &net, quiet_options());

    MetadataResponse m = client.fetch("https://doi.org/10.1234/FULL.2025");
    CHECK(m.doi == "10.1234/full.2025");
    CHECK(m.source == "crossref");
    CHECK(m.title == "Benchmarking clinical triage");
    CHECK(m.journal == "J Synth Eval");
    REQUIRE(m.publication_date.has_value());
    CHECK(*m.publication_date == Date(2025, 3, 20));
    REQUIRE(m.abstract_text.has_value());
    CHECK(*m.abstract_text == "Models were evaluated on triage.");
    CHECK(m.fetched_at == "2026-08-19T00:00:00Z");
    CHECK(net.calls.size() == 1);  // complete answer, openalex never asked

    SECTION("a warm cache answers without any network") {
        PoisonTransport poison;
        MetadataClient offline_ish(MetadataCache(dir.path), &poison, quiet_options());
        MetadataResponse hit = offline_ish.fetch("10.1234/full.2025");
        CHECK(hit.source == "cache");
        CHECK(hit.title == m.title);
        CHECK(hit.abstract_text == m.abstract_text);
        CHECK(poison.calls == 0);
    }

    SECTION("cache files are content addressed by normalized doi") {
        MetadataCache cache(dir.path);
        CHECK(fs::exists(cache.path_for("10.1234/full.2025")));
        CHECK(cache.path_for("10.1234/full.2025").filename().string() ==
              detail::sha256_hex("10.1234/full.2025") + ".json");
    }
}

TEST_CASE("openalex fills what crossref left blank") {
    ScratchDir dir("merge");

    SECTION("crossref 404 falls through to openalex") {
        StubTransport net;
        net.routes["api.openalex.org/works/doi:10.9/oa"] = {200, kOpenAlexBody};
        MetadataClient client(MetadataCache(dir.path), &net, quiet_options());
        MetadataResponse m = client.fetch("10.9/oa");
        CHECK(m.source == "openalex");
        CHECK(m.title == "Benchmarking clinical triage");
        CHECK(m.journal == "J Synth Eval");
        CHECK(*m.publication_date == Date(2025, 3, 20));
        CHECK(*m.abstract_text == "Models were evaluated on triage.");
        CHECK(net.calls.size() == 2);
    }

    SECTION("crossref answer missing the abstract pulls it from openalex") {
        StubTransport net;
        net.routes["api.crossref.org/works/10.9/partial"] = {
            200, R"({"message": {"title": ["Partial"],
                     "issued": {"date-parts": [[2024, 11]]}}})"};
        net.routes["api.openalex.org/works/doi:10.9/partial"] = {200, kOpenAlexBody};
        MetadataClient client(MetadataCache(dir.path), &net, quiet_options());
        MetadataResponse m = client.fetch("10.9/partial");
        CHECK(m.source == "crossref");           // first responder keeps attribution
        CHECK(m.title == "Partial");             // crossref fields win
        CHECK(*m.publication_date == Date(2024, 11, 1));
        CHECK(m.journal == "J Synth Eval");      // openalex fills the holes
        CHECK(*m.abstract_text == "Models were evaluated on triage.");
        CHECK(net.calls.size() == 2);
    }

    SECTION("nobody knows the doi") {
        StubTransport net;
        MetadataClient client(MetadataCache(dir.path), &net, quiet_options());
        CHECK_THROWS_AS(client.fetch("10.9/ghost"), NotFound);
        CHECK(net.calls.size() == 2);
        CHECK_FALSE(fs::exists(MetadataCache(dir.path).path_for("10.9/ghost")));
    }
}

TEST_CASE("transport failures retry with a bounded budget") {
    ScratchDir dir("retry");

    SECTION("two failures then success") {
        FlakyTransport net(2, {200, kCrossrefBody});
        MetadataClient client(MetadataCache(dir.path), &net, quiet_options());
        MetadataResponse m = client.fetch("10.8/flaky");
        CHECK(m.source == "crossref");
        CHECK(net.calls == 3);
    }

    SECTION("persistent failure exhausts the budget and throws") {
        FlakyTransport net(100, {200, "{}"});
        MetadataClient client(MetadataCache(dir.path), &net, quiet_options());
        CHECK_THROWS_AS(client.fetch("10.8/dead"), TransportError);
        CHECK(net.calls == 3);  // one source, three attempts, no cascade
    }

    SECTION("a 404 is an answer, not a failure to retry") {
        StubTransport net;
        net.routes["api.openalex.org/works/doi:10.8/only-oa"] = {200, kOpenAlexBody};
        MetadataClient client(MetadataCache(dir.path), &net, quiet_options());
        client.fetch("10.8/only-oa");
        size_t crossref_calls = 0;
        for (const auto& c : net.calls)
            if (c.find("crossref") != std::string::npos) ++crossref_calls;
        CHECK(crossref_calls == 1);
    }
}

TEST_CASE("offline mode never constructs a request") {
    ScratchDir dir("offline");
    FetchOptions opts = quiet_options();
    opts.offline = true;
    PoisonTransport poison;
    MetadataClient client(MetadataCache(dir.path), &poison, opts);

    CHECK_THROWS_AS(client.fetch("10.7/cold"), CacheMiss);
    CHECK(poison.calls == 0);

    MetadataResponse warm;
    warm.doi = "10.7/warm";
    warm.title = "Cached title";
    warm.journal = "J Cache";
    warm.publication_date = Date(2024, 4, 4);
    warm.source = "crossref";
    warm.fetched_at = "2026-01-01T00:00:00Z";
    MetadataCache(dir.path).store(warm);
    MetadataResponse hit = client.fetch("10.7/warm");
    CHECK(hit.source == "cache");
    CHECK(hit.title == "Cached title");
    CHECK(poison.calls == 0);
}

TEST_CASE("metadata skeletons never carry coded judgments") {
    MetadataResponse m;
    m.doi = "10.6/skel";
    m.title = "Some title";
    m.journal = "J Skel";
    m.publication_date = Date(2025, 2, 2);
    m.abstract_text = "An abstract.";
    m.source = "openalex";
    m.fetched_at = "2026-01-01T00:00:00Z";

    PaperRecord p = to_record(m);
    CHECK(p.doi == "10.6/skel");
    CHECK(p.publication_date == Date(2025, 2, 2));
    CHECK(p.journal == "J Skel");
    CHECK(p.domain == Domain::other);
    CHECK_FALSE(p.conclusion_valence.has_value());
    CHECK_FALSE(p.conclusion_framing.has_value());
    CHECK_FALSE(p.eval_date_disclosed.has_value());
    for (ConfigKey k : kAllConfigKeys) CHECK_FALSE(p.config[k].has_value());

    m.publication_date.reset();
    CHECK_THROWS_AS(to_record(m), ValidationError);
}

TEST_CASE("metadata responses round trip through the cache format") {
    MetadataResponse m;
    m.doi = "10.5/rt";
    m.title = "Round trip";
    m.abstract_text = "Body text";
    m.publication_date = Date(2023, 9, 9);
    m.journal = "J RT";
    m.source = "crossref";
    m.fetched_at = "2026-08-19T00:00:00Z";

    MetadataResponse q = metadata_from_json(metadata_to_json(m));
    CHECK(q.doi == m.doi);
    CHECK(q.title == m.title);
    CHECK(q.abstract_text == m.abstract_text);
    CHECK(q.publication_date == m.publication_date);
    CHECK(q.journal == m.journal);
    CHECK(q.source == m.source);
    CHECK(q.fetched_at == m.fetched_at);

    MetadataResponse bare;
    bare.doi = "10.5/bare";
    bare.title = "No extras";
    bare.journal = "";
    bare.source = "openalex";
    bare.fetched_at = "2026-08-19T00:00:00Z";
    MetadataResponse b = metadata_from_json(metadata_to_json(bare));
    CHECK_FALSE(b.abstract_text.has_value());
    CHECK_FALSE(b.publication_date.has_value());
}

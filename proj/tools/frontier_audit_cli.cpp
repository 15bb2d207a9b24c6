// Command-line surface over the audit library. Every command is a thin
// assembly of library calls; no analysis logic lives here.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "frontier_audit/audit.hpp"
#include "frontier_audit/checklist.hpp"
#include "frontier_audit/corpus_io.hpp"
#include "frontier_audit/detail/csv.hpp"
#include "frontier_audit/detail/sha256.hpp"
#include "frontier_audit/waterfall.hpp"

#ifdef FA_HAVE_OPENSSL
#include "frontier_audit/http_transport.hpp"
#endif

namespace fa = frontier_audit;

namespace {

std::string default_data_dir() {
    const char* env = std::getenv("FA_DATA_DIR");
    return env && *env ? env : "data";
}

struct Globals {
    std::string scale = "eci";
    long lag_days = 180;
    uint64_t seed = 0;
    bool offline = false;
    std::string variant = "absolute";
    double price_multiple = 10.0;
    std::string table;
    std::string aliases;
    std::string admissibility;
    std::string baselines;

    void fill_defaults() {
        std::string dir = default_data_dir();
        auto fallback = [&](std::string& slot, const char* name) {
            if (slot.empty()) slot = dir + "/" + name;
        };
        fallback(table, "eci_scores.csv");
        fallback(aliases, "aliases.csv");
        fallback(admissibility, "admissibility_rules.json");
        fallback(baselines, "scaffolded_baselines.csv");
    }
};

fa::audit::AuditInputs load_inputs(const Globals& g) {
    return {
        fa::CapabilityTable::load(g.table),
        fa::AliasMap::load(g.aliases),
        fa::AdmissibilityRules::load(g.admissibility),
        fa::ScaffoldedBaselines::load(g.baselines),
    };
}

fa::audit::AuditConfig audit_config(const Globals& g) {
    fa::audit::AuditConfig cfg;
    cfg.scale = fa::parse_scale(g.scale);
    cfg.lag_days = g.lag_days;
    cfg.variant = fa::parse_frontier_variant(g.variant);
    cfg.price_multiple = g.price_multiple;
    cfg.seed = g.seed;
    return cfg;
}

std::map<std::string, std::string> input_hashes(const Globals& g) {
    std::map<std::string, std::string> out;
    out["table_file"] = fa::detail::sha256_hex(fa::detail::read_file(g.table));
    out["aliases"] = fa::detail::sha256_hex(fa::detail::read_file(g.aliases));
    out["admissibility"] = fa::detail::sha256_hex(fa::detail::read_file(g.admissibility));
    out["baselines"] = fa::detail::sha256_hex(fa::detail::read_file(g.baselines));
    return out;
}

nlohmann::json parse_json_file(const std::string& path) {
    return nlohmann::json::parse(fa::detail::read_file(path));
}

std::vector<long> parse_long_list(const std::vector<std::string>& tokens) {
    std::vector<long> out;
    for (const auto& t : tokens) out.push_back(std::stol(t));
    return out;
}

std::vector<double> parse_double_list(const std::vector<std::string>& tokens) {
    std::vector<double> out;
    for (const auto& t : tokens) out.push_back(std::stod(t));
    return out;
}

// ---- audit <doi> -------------------------------------------------------------

struct AuditArgs {
    std::string doi;
    std::string corpus_path;
    std::string record_path;
    std::string assessment_path;
    std::string cache_dir = ".fa-metadata-cache";
    std::string contact;
    bool as_json = false;
};

fa::PaperRecord fetch_record(const std::string& doi, const AuditArgs& a, const Globals& g) {
    fa::corpus::FetchOptions opts;
    opts.offline = g.offline;
    opts.contact = a.contact;
    std::unique_ptr<fa::corpus::Transport> transport;
    if (!g.offline) {
#ifdef FA_HAVE_OPENSSL
        transport = std::make_unique<fa::corpus::HttpTransport>();
#else
        throw fa::ConfigError(
            "built without TLS support; pass --offline and rely on the metadata cache");
#endif
    }
    fa::corpus::MetadataClient client(fa::corpus::MetadataCache(a.cache_dir), transport.get(),
                                      opts);
    return fa::corpus::to_record(client.fetch(doi));
}

int cmd_audit(const AuditArgs& a, const Globals& g) {
    fa::audit::AuditInputs in = load_inputs(g);
    fa::audit::AuditConfig cfg = audit_config(g);

    std::optional<fa::checklist::ChecklistAssessment> assessment;
    if (!a.assessment_path.empty())
        assessment = fa::checklist::ChecklistAssessment::from_json(
            parse_json_file(a.assessment_path));
    const fa::checklist::ChecklistAssessment* assess_ptr =
        assessment ? &*assessment : nullptr;

    std::optional<fa::audit::AuditReport> report;
    if (!a.record_path.empty()) {
        fa::PaperRecord rec = fa::corpus::record_from_json(parse_json_file(a.record_path));
        report = fa::audit::audit_record(rec, in, cfg, assess_ptr);
    } else if (!a.corpus_path.empty()) {
        fa::corpus::CorpusLoad load = fa::corpus::load_corpus(a.corpus_path);
        try {
            report = fa::audit::audit_doi(a.doi, load.records, in, cfg, assess_ptr);
        } catch (const fa::corpus::NotFound&) {
            // fall through to the metadata path
        }
    }
    if (!report) report = fa::audit::audit_record(fetch_record(a.doi, a, g), in, cfg, assess_ptr);

    nlohmann::ordered_json doc = fa::audit::report_to_json(*report);
    if (a.as_json)
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << fa::audit::render_text(doc);
    return report->resolution_note.empty() ? 0 : 2;
}

// ---- run <corpus> ------------------------------------------------------------

struct RunArgs {
    std::string corpus_path;
    std::string out_dir;
    std::string suite = "all";
    unsigned threads = 1;
    unsigned bootstrap = 1500;
};

int cmd_run(const RunArgs& a, const Globals& g) {
    fa::corpus::CorpusLoad load = fa::corpus::load_corpus(a.corpus_path);
    fa::audit::AuditInputs in = load_inputs(g);

    fa::audit::RunConfig rc;
    rc.suite = fa::audit::parse_suite(a.suite);
    rc.out_dir = a.out_dir;
    rc.seed = g.seed;
    rc.threads = a.threads;
    rc.audit = audit_config(g);
    rc.confirmatory.bootstrap_B = a.bootstrap;
    rc.input_hashes = input_hashes(g);

    fa::audit::RunResult res = fa::audit::corpus_run(load, in, rc);
    std::cout << "papers: " << res.papers << "\n"
              << "resolved: " << res.resolved << "\n"
              << "skipped: " << res.skipped << "\n";
    if (!load.errors.empty()) std::cout << "corpus line errors: " << load.errors.size() << "\n";
    std::cout << "wrote " << res.files.size() << " files to " << a.out_dir << "\n";
    for (const auto& f : res.files) std::cout << "  " << f << "\n";
    return res.exit_code;
}

// ---- sweep -------------------------------------------------------------------

struct SweepArgs {
    std::string corpus_path;
    std::string out_dir = "sweep-out";
    std::vector<std::string> lags;
    std::vector<std::string> taus;
    unsigned threads = 1;
};

int cmd_sweep(const SweepArgs& a, const Globals& g) {
    if (a.lags.empty() == a.taus.empty())
        throw fa::ConfigError("sweep needs exactly one of --lag and --tau");

    fa::corpus::CorpusLoad load = fa::corpus::load_corpus(a.corpus_path);
    fa::audit::AuditInputs in = load_inputs(g);

    fa::audit::RunConfig rc;
    rc.suite = fa::audit::Suite::sweeps;
    rc.out_dir = a.out_dir;
    rc.seed = g.seed;
    rc.threads = a.threads;
    rc.audit = audit_config(g);
    rc.input_hashes = input_hashes(g);
    if (!a.lags.empty()) rc.sweep_lags = parse_long_list(a.lags);
    if (!a.taus.empty()) rc.tau_percentiles = parse_double_list(a.taus);

    fa::audit::RunResult res = fa::audit::corpus_run(load, in, rc);
    std::string focus = a.lags.empty() ? "tau_sweep.csv" : "lag_grid.csv";
    std::cout << fa::detail::read_file(a.out_dir + "/" + focus);
    std::cerr << "full sweep bundle in " << a.out_dir << "\n";
    return res.exit_code;
}

// ---- frontier build ------------------------------------------------------------

struct FrontierArgs {
    std::string from;
    std::string to;
    std::string corpus_path;  // only for the domain-relative variant
    std::string domain;
};

int cmd_frontier_build(const FrontierArgs& a, const Globals& g) {
    fa::CapabilityTable table = fa::CapabilityTable::load(g.table);
    auto [lo, hi] = fa::audit::table_span(table);
    fa::Date from = a.from.empty() ? lo : fa::Date::parse(a.from);
    fa::Date to = a.to.empty() ? hi : fa::Date::parse(a.to);

    fa::FrontierQuery q;
    q.variant = fa::parse_frontier_variant(g.variant);
    q.price_multiple = g.price_multiple;

    fa::DomainEvalIndex index;
    if (q.variant == fa::FrontierVariant::domain_relative) {
        if (a.corpus_path.empty() || a.domain.empty())
            throw fa::ConfigError(
                "the domain_relative variant needs --corpus and --domain to know which "
                "models each domain actually evaluated");
        fa::corpus::CorpusLoad load = fa::corpus::load_corpus(a.corpus_path);
        fa::audit::AuditInputs in = load_inputs(g);
        for (fa::PaperRecord rec : load.records) {
            if (!fa::audit::resolve_record(rec, in).empty()) continue;
            index.add(std::string(fa::domain_name(rec.domain)), rec.publication_date.year(),
                      *rec.primary_model);
        }
        q.domain_index = &index;
        q.domain = a.domain;
    }

    fa::FrontierTrajectory traj =
        fa::FrontierTrajectory::build(table, fa::parse_scale(g.scale), from, to, q);
    std::cout << "month,model,score\n";
    for (const auto& step : traj.steps())
        std::cout << fa::Date::from_month_index(step.month_index).iso().substr(0, 7) << ","
                  << fa::detail::csv_escape(step.key) << "," << fa::audit::num(step.score)
                  << "\n";
    return 0;
}

// ---- checklist score -----------------------------------------------------------

struct ChecklistArgs {
    std::string assessment_path;
    std::string abstract_path;
    std::string fulltext_path;
};

fa::checklist::SurfaceAssessments load_surface(const std::string& path) {
    nlohmann::json doc = parse_json_file(path);
    if (!doc.is_object())
        throw fa::ParseError("surface file " + path + " must map DOI to assessment");
    fa::checklist::SurfaceAssessments out;
    for (auto it = doc.begin(); it != doc.end(); ++it)
        out[fa::corpus::normalize_doi(it.key())] =
            fa::checklist::ChecklistAssessment::from_json(it.value());
    return out;
}

int cmd_checklist_score(const ChecklistArgs& a) {
    bool single = !a.assessment_path.empty();
    bool ladder = !a.abstract_path.empty() || !a.fulltext_path.empty();
    if (single == ladder)
        throw fa::ConfigError(
            "checklist score takes either one assessment file or --abstract with --fulltext");

    if (ladder) {
        if (a.abstract_path.empty() || a.fulltext_path.empty())
            throw fa::ConfigError("the ladder needs both --abstract and --fulltext");
        auto rows = fa::checklist::disclosure_ladder(load_surface(a.abstract_path),
                                                     load_surface(a.fulltext_path));
        std::cout << fa::checklist::ladder_to_csv(rows);
        return 0;
    }

    fa::checklist::ChecklistAssessment assessment =
        fa::checklist::ChecklistAssessment::from_json(parse_json_file(a.assessment_path));
    fa::checklist::Core3Result core = fa::checklist::core3(assessment);

    nlohmann::ordered_json doc;
    doc["assessment"] = assessment.to_json();
    doc["core3"] = {{"pass", core.pass}, {"failing", core.failing}};
    try {
        doc["exemplar_floor"] = fa::checklist::exemplar_floor(assessment);
    } catch (const fa::checklist::MissingFields& e) {
        doc["exemplar_floor"] = nullptr;
        doc["exemplar_floor_note"] = e.what();
    }
    auto completeness = fa::checklist::elicitation_completeness(assessment);
    if (completeness)
        doc["elicitation_completeness"] = *completeness;
    else
        doc["elicitation_completeness"] = nullptr;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

// ---- waterfall compute ----------------------------------------------------------

int cmd_waterfall_compute(const std::string& chips_path) {
    fa::ChipSequence seq = fa::ChipSequence::from_csv_file(chips_path);
    if (seq.empty()) throw fa::ValidationError("chip file has no chips");

    nlohmann::ordered_json doc;
    nlohmann::ordered_json chips = nlohmann::ordered_json::array();
    for (const auto& c : seq.chips()) {
        nlohmann::ordered_json chip;
        chip["label"] = c.label;
        chip["before"] = c.before;
        chip["after"] = c.after;
        chip["kind"] = c.kind;
        if (!c.caveat.empty()) chip["caveat"] = c.caveat;
        chip["retained_fraction"] = c.retained_fraction();
        chips.push_back(std::move(chip));
    }
    doc["chips"] = std::move(chips);
    doc["chained"] = seq.chained();
    doc["baseline"] = seq.baseline();
    doc["final_score"] = seq.final_score();
    doc["compound_retained"] = seq.compound_total();
    doc["compound_drop"] = 1.0 - seq.compound_total();
    std::cout << doc.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frontier-gap audit reports over a frozen capability table"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--scale", g.scale, "Capability scale: eci|arena|aa")
        ->capture_default_str();
    app.add_option("--lag-days", g.lag_days, "Review-lag window for imputed eval dates")
        ->capture_default_str();
    app.add_option("--seed", g.seed, "Seed for resampling procedures")->capture_default_str();
    app.add_flag("--offline", g.offline, "Never touch the network; metadata comes from cache");
    app.add_option("--variant", g.variant,
                   "Frontier variant: absolute|deployment|domain_relative")
        ->capture_default_str();
    app.add_option("--price-multiple", g.price_multiple,
                   "Deployment-variant price cap, as a multiple of the cheapest base tier")
        ->capture_default_str();
    app.add_option("--table", g.table, "Capability table CSV (default $FA_DATA_DIR)");
    app.add_option("--aliases", g.aliases, "Model alias CSV");
    app.add_option("--admissibility", g.admissibility, "Domain admissibility rules JSON");
    app.add_option("--baselines", g.baselines, "Scaffolded baseline CSV");

    AuditArgs audit_args;
    auto* audit_cmd = app.add_subcommand("audit", "Audit one paper by DOI");
    audit_cmd->fallthrough();
    audit_cmd->add_option("doi", audit_args.doi, "DOI to audit")->required();
    audit_cmd->add_option("--corpus", audit_args.corpus_path, "Corpus JSONL to look up first");
    audit_cmd->add_option("--record", audit_args.record_path, "Single-record JSON file");
    audit_cmd->add_option("--assessment", audit_args.assessment_path,
                          "Checklist assessment JSON to fold into the report");
    audit_cmd->add_option("--cache-dir", audit_args.cache_dir, "Metadata cache directory")
        ->capture_default_str();
    audit_cmd->add_option("--contact", audit_args.contact,
                          "Contact address sent with metadata requests");
    audit_cmd->add_flag("--json", audit_args.as_json, "Emit the JSON document instead of text");

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run a report suite over a corpus");
    run_cmd->fallthrough();
    run_cmd->add_option("corpus", run_args.corpus_path, "Corpus JSONL")->required();
    run_cmd->add_option("--out", run_args.out_dir, "Output directory")->required();
    run_cmd->add_option("--suite", run_args.suite,
                        "confirmatory|descriptive|sweeps|coverage|all")
        ->capture_default_str();
    run_cmd->add_option("--threads", run_args.threads, "Worker threads for per-paper stages")
        ->capture_default_str();
    run_cmd->add_option("--bootstrap", run_args.bootstrap, "Bootstrap replicates")
        ->capture_default_str();

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Robustness sweeps over a corpus");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("corpus", sweep_args.corpus_path, "Corpus JSONL")->required();
    sweep_cmd->add_option("--out", sweep_args.out_dir, "Output directory")
        ->capture_default_str();
    sweep_cmd->add_option("--lag", sweep_args.lags, "Review-lag grid in days")->delimiter(',');
    sweep_cmd->add_option("--tau", sweep_args.taus, "Threshold percentiles of the gap spread")
        ->delimiter(',');
    sweep_cmd->add_option("--threads", sweep_args.threads, "Worker threads")
        ->capture_default_str();

    FrontierArgs frontier_args;
    auto* frontier_cmd = app.add_subcommand("frontier", "Frontier trajectory tools");
    frontier_cmd->require_subcommand(1);
    frontier_cmd->fallthrough();
    auto* build_cmd =
        frontier_cmd->add_subcommand("build", "Print the monthly frontier as CSV");
    build_cmd->fallthrough();
    build_cmd->add_option("--from", frontier_args.from, "First month (ISO date)");
    build_cmd->add_option("--to", frontier_args.to, "Last month (ISO date)");
    build_cmd->add_option("--corpus", frontier_args.corpus_path,
                          "Corpus JSONL (domain_relative only)");
    build_cmd->add_option("--domain", frontier_args.domain, "Domain (domain_relative only)");

    ChecklistArgs checklist_args;
    auto* checklist_cmd = app.add_subcommand("checklist", "Disclosure checklist tools");
    checklist_cmd->require_subcommand(1);
    checklist_cmd->fallthrough();
    auto* score_cmd = checklist_cmd->add_subcommand(
        "score", "Score one assessment, or build the two-surface ladder");
    score_cmd->fallthrough();
    score_cmd->add_option("assessment", checklist_args.assessment_path,
                          "Assessment JSON for a single paper");
    score_cmd->add_option("--abstract", checklist_args.abstract_path,
                          "DOI-to-assessment JSON coded from abstracts");
    score_cmd->add_option("--fulltext", checklist_args.fulltext_path,
                          "DOI-to-assessment JSON coded from full texts");

    std::string chips_path;
    auto* waterfall_cmd = app.add_subcommand("waterfall", "Attenuation waterfall tools");
    waterfall_cmd->require_subcommand(1);
    waterfall_cmd->fallthrough();
    auto* compute_cmd =
        waterfall_cmd->add_subcommand("compute", "Decompose a chip sequence");
    compute_cmd->fallthrough();
    compute_cmd->add_option("--chips", chips_path, "Chip CSV (default $FA_DATA_DIR)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    g.fill_defaults();
    if (chips_path.empty()) chips_path = default_data_dir() + "/waterfall_chips.csv";

    try {
        if (audit_cmd->parsed()) return cmd_audit(audit_args, g);
        if (run_cmd->parsed()) return cmd_run(run_args, g);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, g);
        if (frontier_cmd->parsed() && build_cmd->parsed())
            return cmd_frontier_build(frontier_args, g);
        if (checklist_cmd->parsed() && score_cmd->parsed())
            return cmd_checklist_score(checklist_args);
        if (waterfall_cmd->parsed() && compute_cmd->parsed())
            return cmd_waterfall_compute(chips_path);
    } catch (const fa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#pragma once

// Report assembly: one audited paper at a time, or a whole corpus emitting a
// reproducible bundle of CSV/JSON artifacts.
//
// Everything here is a pure function of (inputs, config, seed). Randomness
// flows through SeededRng replicate streams, output files are written in a
// fixed order with a manifest of content hashes, and per-paper work can be
// spread across threads without changing a single byte of output because
// results are aggregated in input order.

#include <algorithm>
#include <array>
#include <cstdint>
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

#include "capability_table.hpp"
#include "checklist.hpp"
#include "corpus_io.hpp"
#include "detail/csv.hpp"
#include "detail/sha256.hpp"
#include "errors.hpp"
#include "failure.hpp"
#include "frontier.hpp"
#include "gap.hpp"
#include "inference.hpp"
#include "model_resolver.hpp"
#include "paper_record.hpp"
#include "rng.hpp"
#include "scales.hpp"
#include "stats.hpp"

namespace frontier_audit::audit {

// Shortest decimal text that parses back to the exact double, courtesy of the
// JSON serializer. Text and JSON renderings share it so their numbers agree
// to the last bit.
inline std::string num(double x) { return nlohmann::json(x).dump(); }

enum class FramingBucket : unsigned char { ai_generic, model_specific, unknown };

inline std::string_view framing_bucket_name(FramingBucket b) {
    switch (b) {
        case FramingBucket::ai_generic:
            return "ai_generic";
        case FramingBucket::model_specific:
            return "model_specific";
        case FramingBucket::unknown:
            return "unknown";
    }
    return "?";
}

inline FramingBucket bucket_of(const PaperRecord& paper) {
    if (!paper.conclusion_framing) return FramingBucket::unknown;
    return *paper.conclusion_framing == Framing::ai_generic ? FramingBucket::ai_generic
                                                            : FramingBucket::model_specific;
}

// The frozen reference data every audit needs.
struct AuditInputs {
    CapabilityTable table;
    AliasMap aliases;
    AdmissibilityRules rules;
    ScaffoldedBaselines baselines;
};

struct AuditConfig {
    Scale scale = Scale::eci;  // headline scale for the compound verdict
    long lag_days = 180;
    FrontierVariant variant = FrontierVariant::absolute;
    double price_multiple = 10.0;
    ClassifierConfig classifier;
    MissingConfigPolicy missing = MissingConfigPolicy::null_as_undisclosed;
    uint64_t seed = 0;
};

struct Provenance {
    std::string snapshot_id;
    std::string trajectory_variant;
    std::string spec_tags;
    uint64_t seed = 0;
};

struct ChecklistSummary {
    std::array<checklist::Disclosure, checklist::kItemCount> items{};
    bool core3_pass = false;
    std::vector<int> core3_failing;
    std::optional<bool> exemplar_floor;  // unset when the frame fields are missing
    std::optional<double> completeness;
};

struct AuditReport {
    std::string doi;
    std::map<Scale, std::optional<GapVector>> gap_vector;
    PaperVerdict verdict;
    std::array<std::string, 3> reasons;  // capability, elicitation, interpretive
    std::optional<ChecklistSummary> checklist;
    FramingBucket framing_bucket = FramingBucket::unknown;
    std::string resolution_note;  // non-empty when the model stayed unresolved
    Provenance provenance;
};

inline std::pair<Date, Date> table_span(const CapabilityTable& table) {
    if (table.records().empty()) throw ValidationError("capability table is empty");
    Date lo = table.records().front().release_date;
    Date hi = lo;
    for (const auto& r : table.records()) {
        if (r.release_date < lo) lo = r.release_date;
        if (hi < r.release_date) hi = r.release_date;
    }
    return {lo, hi};
}

inline FrontierTrajectory build_trajectory(const CapabilityTable& table, Scale scale,
                                           const AuditConfig& cfg) {
    auto [lo, hi] = table_span(table);
    FrontierQuery q;
    q.variant = cfg.variant;
    q.price_multiple = cfg.price_multiple;
    return FrontierTrajectory::build(table, scale, lo, hi, q);
}

// Fills in primary_model from the raw mention when the record arrived
// unresolved. Returns the resolver's explanation when it gives up.
inline std::string resolve_record(PaperRecord& paper, const AuditInputs& in) {
    if (paper.primary_model) return "";
    ModelResolver resolver(in.table, in.aliases);
    ResolvedModel r = resolver.resolve(paper.primary_model_raw, paper.publication_date);
    if (r.ok()) {
        paper.primary_model = r.key;
        return "";
    }
    return r.note.empty() ? "mention '" + paper.primary_model_raw + "' did not resolve"
                          : r.note;
}

inline std::string capability_reason(const std::optional<GapVector>& gap, double tau,
                                     TriBool verdict) {
    if (!gap) return "no gap vector: the tested model is unresolved or unscored";
    std::string s = "temporal gap " + num(gap->temporal_gap) + " vs tau " + num(tau) + " (" +
                    std::string(tri_name(verdict)) + ")";
    if (gap->frontier_extrapolated) s += "; frontier held past table end";
    return s;
}

inline std::string elicitation_reason(TriBool verdict, const ClassifierConfig& cfg) {
    if (verdict == TriBool::Unknown)
        return "insufficient disclosure to score the " +
               std::string(elicitation_mode_name(cfg.elicitation)) + " clauses";
    return std::string(elicitation_mode_name(cfg.elicitation)) + " clauses -> " +
           std::string(tri_name(verdict));
}

inline std::string interpretive_reason(const PaperRecord& paper, const PaperVerdict& v,
                                       const ClassifierConfig& cfg) {
    std::string s = std::string(interpretive_mode_name(cfg.interpretive)) + " over comparator (";
    s += paper.human_comparator ? (*paper.human_comparator ? "present" : "absent") : "unknown";
    s += ", task " + std::string(admissibility_name(v.admissibility)) + ") and framing (";
    s += paper.conclusion_framing ? framing_name(*paper.conclusion_framing) : "unknown";
    s += ") -> " + std::string(tri_name(v.interpretive));
    return s;
}

inline ChecklistSummary summarize_checklist(const checklist::ChecklistAssessment& a) {
    ChecklistSummary s;
    for (int i = 1; i <= checklist::kItemCount; ++i)
        s.items[static_cast<size_t>(i - 1)] = a.item(i);
    checklist::Core3Result core = checklist::core3(a);
    s.core3_pass = core.pass;
    s.core3_failing = core.failing;
    try {
        s.exemplar_floor = checklist::exemplar_floor(a);
    } catch (const checklist::MissingFields&) {
        // frame fields absent; leave undecided
    }
    s.completeness = checklist::elicitation_completeness(a);
    return s;
}

// One paper, full report. Unknowns degrade the affected dimensions; nothing
// is ever imputed into the record itself.
inline AuditReport audit_record(PaperRecord paper, const AuditInputs& in,
                                const AuditConfig& cfg,
                                const checklist::ChecklistAssessment* assessment = nullptr) {
    AuditReport report;
    report.doi = paper.doi;
    report.resolution_note = resolve_record(paper, in);
    report.framing_bucket = bucket_of(paper);

    for (Scale scale : kAllScales) {
        std::optional<GapVector> gap;
        if (paper.primary_model) {
            FrontierTrajectory traj = build_trajectory(in.table, scale, cfg);
            GapConfig gc;
            gc.scale = scale;
            gc.lag_days = cfg.lag_days;
            gc.missing = cfg.missing;
            try {
                gap = compute_gap(paper, in.table, traj, gc);
            } catch (const MissingScore&) {
            } catch (const UnresolvedModel&) {
            }
        }
        report.gap_vector[scale] = gap;
    }

    const std::optional<GapVector>& headline = report.gap_vector.at(cfg.scale);
    report.verdict =
        classify_paper(paper, headline, in.table, in.rules, in.baselines, cfg.classifier);
    report.reasons[0] = capability_reason(headline, cfg.classifier.tau, report.verdict.capability);
    report.reasons[1] = elicitation_reason(report.verdict.elicitation, cfg.classifier);
    report.reasons[2] = interpretive_reason(paper, report.verdict, cfg.classifier);

    if (assessment) report.checklist = summarize_checklist(*assessment);

    report.provenance.snapshot_id = in.table.snapshot_id();
    report.provenance.trajectory_variant = std::string(frontier_variant_name(cfg.variant));
    report.provenance.spec_tags = cfg.classifier.tags() + ";scale=" +
                                  std::string(scale_name(cfg.scale)) +
                                  ";lag=" + std::to_string(cfg.lag_days);
    report.provenance.seed = cfg.seed;
    return report;
}

// DOI entry point over a loaded corpus. Lookup is by normalized DOI.
inline AuditReport audit_doi(const std::string& doi, const std::vector<PaperRecord>& corpus_records,
                             const AuditInputs& in, const AuditConfig& cfg,
                             const checklist::ChecklistAssessment* assessment = nullptr) {
    std::string norm = corpus::normalize_doi(doi);
    for (const PaperRecord& p : corpus_records) {
        if (corpus::normalize_doi(p.doi) == norm) return audit_record(p, in, cfg, assessment);
    }
    throw corpus::NotFound("doi " + norm + " is not in the corpus");
}

inline nlohmann::ordered_json gap_to_json(const GapVector& g) {
    nlohmann::ordered_json j;
    j["model"] = g.model_key;
    j["eval_date"] = g.eval_date.iso();
    j["eval_date_source"] = std::string(eval_date_source_name(g.eval_date_source));
    j["temporal_gap"] = g.temporal_gap;
    if (g.tier_gap) j["tier_gap"] = *g.tier_gap;
    if (g.elicitation_index) j["elicitation_index"] = *g.elicitation_index;
    if (g.shortfall) j["shortfall"] = *g.shortfall;
    j["scale"] = std::string(scale_name(g.scale));
    j["score_imputed"] = g.score_imputed;
    j["frontier_extrapolated"] = g.frontier_extrapolated;
    return j;
}

inline nlohmann::ordered_json report_to_json(const AuditReport& r) {
    nlohmann::ordered_json j;
    j["doi"] = r.doi;
    nlohmann::ordered_json gaps = nlohmann::ordered_json::object();
    for (Scale s : kAllScales) {
        const auto& gap = r.gap_vector.at(s);
        gaps[std::string(scale_name(s))] = gap ? gap_to_json(*gap) : nlohmann::ordered_json();
    }
    j["gap_vector"] = std::move(gaps);
    j["verdict"] = {{"capability", std::string(tri_name(r.verdict.capability))},
                    {"elicitation", std::string(tri_name(r.verdict.elicitation))},
                    {"interpretive", std::string(tri_name(r.verdict.interpretive))},
                    {"compound", std::string(tri_name(r.verdict.compound))},
                    {"admissibility", std::string(admissibility_name(r.verdict.admissibility))}};
    j["reasons"] = {{"capability", r.reasons[0]},
                    {"elicitation", r.reasons[1]},
                    {"interpretive", r.reasons[2]}};
    if (r.checklist) {
        nlohmann::ordered_json c;
        nlohmann::ordered_json items = nlohmann::ordered_json::object();
        for (int i = 1; i <= checklist::kItemCount; ++i)
            items[std::to_string(i)] = std::string(
                checklist::disclosure_name(r.checklist->items[static_cast<size_t>(i - 1)]));
        c["items"] = std::move(items);
        c["core3_pass"] = r.checklist->core3_pass;
        c["core3_failing"] = r.checklist->core3_failing;
        if (r.checklist->exemplar_floor) c["exemplar_floor"] = *r.checklist->exemplar_floor;
        if (r.checklist->completeness) c["elicitation_completeness"] = *r.checklist->completeness;
        j["checklist"] = std::move(c);
    }
    j["framing_bucket"] = std::string(framing_bucket_name(r.framing_bucket));
    if (!r.resolution_note.empty()) j["resolution_note"] = r.resolution_note;
    j["provenance"] = {{"snapshot_id", r.provenance.snapshot_id},
                       {"trajectory_variant", r.provenance.trajectory_variant},
                       {"spec_tags", r.provenance.spec_tags},
                       {"seed", r.provenance.seed}};
    return j;
}

// Text rendering is generated from the JSON document so both carry the same
// numbers by construction.
inline std::string render_text(const nlohmann::ordered_json& j) {
    std::string out;
    out += "audit " + j.at("doi").get<std::string>() + "\n";
    for (auto it = j.at("gap_vector").begin(); it != j.at("gap_vector").end(); ++it) {
        out += "  gap[" + it.key() + "]: ";
        if (it.value().is_null()) {
            out += "unavailable\n";
            continue;
        }
        const auto& g = it.value();
        out += g.at("temporal_gap").dump() + " (model " + g.at("model").get<std::string>() +
               ", eval " + g.at("eval_date").get<std::string>() + " [" +
               g.at("eval_date_source").get<std::string>() + "]";
        if (g.contains("tier_gap")) out += ", tier gap " + g.at("tier_gap").dump();
        if (g.contains("elicitation_index"))
            out += ", elicitation index " + g.at("elicitation_index").dump();
        if (g.contains("shortfall")) out += ", shortfall " + g.at("shortfall").dump();
        out += ")\n";
    }
    const auto& v = j.at("verdict");
    out += "  verdict: compound " + v.at("compound").get<std::string>() + " (capability " +
           v.at("capability").get<std::string>() + ", elicitation " +
           v.at("elicitation").get<std::string>() + ", interpretive " +
           v.at("interpretive").get<std::string>() + ")\n";
    const auto& reasons = j.at("reasons");
    out += "    capability: " + reasons.at("capability").get<std::string>() + "\n";
    out += "    elicitation: " + reasons.at("elicitation").get<std::string>() + "\n";
    out += "    interpretive: " + reasons.at("interpretive").get<std::string>() + "\n";
    if (j.contains("checklist")) {
        const auto& c = j.at("checklist");
        out += "  checklist: core3 ";
        out += c.at("core3_pass").get<bool>() ? "pass" : "fail";
        if (c.contains("exemplar_floor"))
            out += std::string(", exemplar floor ") +
                   (c.at("exemplar_floor").get<bool>() ? "pass" : "fail");
        if (c.contains("elicitation_completeness"))
            out += ", completeness " + c.at("elicitation_completeness").dump();
        out += "\n";
    }
    out += "  framing bucket: " + j.at("framing_bucket").get<std::string>() + "\n";
    if (j.contains("resolution_note"))
        out += "  note: " + j.at("resolution_note").get<std::string>() + "\n";
    const auto& p = j.at("provenance");
    out += "  provenance: table " + p.at("snapshot_id").get<std::string>() + ", frontier " +
           p.at("trajectory_variant").get<std::string>() + ", seed " + p.at("seed").dump() +
           "\n    tags " + p.at("spec_tags").get<std::string>() + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Corpus runs

enum class Suite : unsigned char { confirmatory, descriptive, sweeps, coverage, all };

inline std::string_view suite_name(Suite s) {
    switch (s) {
        case Suite::confirmatory:
            return "confirmatory";
        case Suite::descriptive:
            return "descriptive";
        case Suite::sweeps:
            return "sweeps";
        case Suite::coverage:
            return "coverage";
        case Suite::all:
            return "all";
    }
    return "?";
}

inline Suite parse_suite(std::string_view text) {
    for (Suite s : {Suite::confirmatory, Suite::descriptive, Suite::sweeps, Suite::coverage,
                    Suite::all})
        if (text == suite_name(s)) return s;
    throw ParseError("unknown suite '" + std::string(text) + "'");
}

struct RunConfig {
    Suite suite = Suite::all;
    std::string out_dir;
    uint64_t seed = 0;
    unsigned threads = 1;
    AuditConfig audit;
    inference::ConfirmatoryConfig confirmatory;
    std::vector<long> sweep_lags{0, 90, 180, 270, 365};
    std::vector<double> tau_percentiles{25.0, 50.0, 75.0, 90.0};
    std::map<std::string, std::string> input_hashes;  // label -> sha256, from the caller
};

struct RunResult {
    std::vector<std::string> files;  // relative names, manifest last
    int exit_code = 0;               // 0 clean, 2 partial (skips or line errors)
    size_t papers = 0;
    size_t resolved = 0;
    size_t skipped = 0;
    nlohmann::ordered_json manifest;
};

namespace run_detail {

// Resolves models and computes headline-scale gaps, parallelized over papers
// but aggregated in input order so the thread count never shows in output.
struct PreparedCorpus {
    std::vector<PaperRecord> papers;  // primary_model filled where possible
    std::vector<std::optional<GapVector>> gaps;
    size_t resolved = 0;
};

inline PreparedCorpus prepare(const std::vector<PaperRecord>& records, const AuditInputs& in,
                              const AuditConfig& cfg, unsigned threads) {
    PreparedCorpus prep;
    prep.papers = records;
    ModelResolver resolver(in.table, in.aliases);
    for (PaperRecord& p : prep.papers) {
        if (p.primary_model) continue;
        ResolvedModel r = resolver.resolve(p.primary_model_raw, p.publication_date);
        if (r.ok()) p.primary_model = r.key;
    }

    FrontierTrajectory traj = build_trajectory(in.table, cfg.scale, cfg);
    GapConfig gc;
    gc.scale = cfg.scale;
    gc.lag_days = cfg.lag_days;
    gc.missing = cfg.missing;

    prep.gaps.resize(prep.papers.size());
    auto work = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            try {
                prep.gaps[i] = compute_gap(prep.papers[i], in.table, traj, gc);
            } catch (const UnresolvedModel&) {
            } catch (const MissingScore&) {
            }
        }
    };
    if (threads <= 1 || prep.papers.size() < 2) {
        work(0, prep.papers.size());
    } else {
        unsigned k = std::min<unsigned>(threads, 8);
        std::vector<std::thread> pool;
        size_t chunk = (prep.papers.size() + k - 1) / k;
        for (unsigned t = 0; t < k; ++t) {
            size_t lo = t * chunk;
            size_t hi = std::min(prep.papers.size(), lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& g : prep.gaps)
        if (g) ++prep.resolved;
    return prep;
}

inline std::string hypothesis_to_json_str(const inference::HypothesisReport& h) {
    nlohmann::ordered_json j;
    j["id"] = h.id;
    j["estimate"] = h.estimate;
    j["ci"] = {h.ci.lo, h.ci.hi};
    if (h.p) j["p"] = *h.p;
    if (h.post_holm_reject) j["post_holm_reject"] = *h.post_holm_reject;
    j["n"] = h.n;
    j["spec_tags"] = h.spec_tags;
    return j.dump();
}

}  // namespace run_detail

inline RunResult corpus_run(const corpus::CorpusLoad& corpus_load, const AuditInputs& in,
                            RunConfig cfg) {
    namespace fs = std::filesystem;
    if (cfg.out_dir.empty()) throw ConfigError("corpus run needs an output directory");
    fs::create_directories(cfg.out_dir);
    cfg.audit.seed = cfg.seed;

    RunResult result;
    result.papers = corpus_load.records.size();
    SeededRng rng(cfg.seed);

    run_detail::PreparedCorpus prep =
        run_detail::prepare(corpus_load.records, in, cfg.audit, cfg.threads);
    result.resolved = prep.resolved;
    result.skipped = result.papers - prep.resolved;

    std::map<std::string, std::string> outputs;  // name -> content
    bool want_conf = cfg.suite == Suite::confirmatory || cfg.suite == Suite::all;
    bool want_desc = cfg.suite == Suite::descriptive || cfg.suite == Suite::all;
    bool want_sweeps = cfg.suite == Suite::sweeps || cfg.suite == Suite::all;
    bool want_cov = cfg.suite == Suite::coverage || cfg.suite == Suite::all;

    if (want_conf) {
        std::vector<inference::GapObservation> obs =
            inference::collect_observations(prep.papers, prep.gaps);
        inference::ConfirmatoryFamily family =
            inference::run_confirmatory_family(obs, cfg.confirmatory, rng);
        std::string doc = "{\n";
        doc += "  \"h1\": " + run_detail::hypothesis_to_json_str(family.h1) + ",\n";
        doc += "  \"h3\": " + run_detail::hypothesis_to_json_str(family.h3) + ",\n";
        doc += "  \"h6\": " + run_detail::hypothesis_to_json_str(family.h6) + "\n";
        doc += "}\n";
        outputs["confirmatory.json"] = doc;
    }

    if (want_desc) {
        std::vector<PaperVerdict> verdicts;
        verdicts.reserve(prep.papers.size());
        for (size_t i = 0; i < prep.papers.size(); ++i)
            verdicts.push_back(classify_paper(prep.papers[i], prep.gaps[i], in.table, in.rules,
                                              in.baselines, cfg.audit.classifier));

        std::string rates = "denominator,k,n,rate,wilson_lo,wilson_hi\n";
        for (Denominator d : {Denominator::strict_dropnone, Denominator::trivalued,
                              Denominator::admissibility_expected, Denominator::full}) {
            RateResult r = corpus_rates(verdicts, d);
            stats::Interval ci = stats::wilson(r.k, r.n, 0.95);
            rates += std::string(denominator_name(d)) + "," + std::to_string(r.k) + "," +
                     std::to_string(r.n) + "," + num(r.rate) + "," + num(ci.lo) + "," +
                     num(ci.hi) + "\n";
        }
        outputs["rates.csv"] = rates;

        UpsetCells cells = upset_decomposition(verdicts);
        std::string upset = "cell,capability,elicitation,interpretive,count\n";
        for (size_t mask = 0; mask < 8; ++mask) {
            upset += std::to_string(mask) + "," + ((mask & 1) ? "1" : "0") + "," +
                     ((mask & 2) ? "1" : "0") + "," + ((mask & 4) ? "1" : "0") + "," +
                     std::to_string(cells.cells[mask]) + "\n";
        }
        outputs["upset.csv"] = upset;
        std::string margins = "dimension,rate,strict_n\n";
        margins += "capability," + num(cells.capability_rate) + "," +
                   std::to_string(cells.strict_n) + "\n";
        margins += "elicitation," + num(cells.elicitation_rate) + "," +
                   std::to_string(cells.strict_n) + "\n";
        margins += "interpretive," + num(cells.interpretive_rate) + "," +
                   std::to_string(cells.strict_n) + "\n";
        outputs["upset_margins.csv"] = margins;

        size_t generic = 0, specific = 0, unknown = 0;
        for (const PaperRecord& p : prep.papers) {
            switch (bucket_of(p)) {
                case FramingBucket::ai_generic:
                    ++generic;
                    break;
                case FramingBucket::model_specific:
                    ++specific;
                    break;
                case FramingBucket::unknown:
                    ++unknown;
                    break;
            }
        }
        size_t coded = generic + specific;
        std::string framing = "bucket,count\nai_generic," + std::to_string(generic) +
                              "\nmodel_specific," + std::to_string(specific) + "\nunknown," +
                              std::to_string(unknown) + "\n";
        if (coded > 0) {
            stats::Interval ci = stats::wilson(generic, coded, 0.95);
            framing += "share_ai_generic," + num(static_cast<double>(generic) /
                                                 static_cast<double>(coded)) +
                       "\nshare_wilson_lo," + num(ci.lo) + "\nshare_wilson_hi," + num(ci.hi) +
                       "\n";
        }
        outputs["framing.csv"] = framing;
    }

    if (want_sweeps) {
        std::map<Scale, FrontierTrajectory> trajs;
        trajs.emplace(cfg.audit.scale, build_trajectory(in.table, cfg.audit.scale, cfg.audit));
        std::vector<std::optional<long>> lags;
        for (long L : cfg.sweep_lags) lags.emplace_back(L);
        GapConfig base;
        base.missing = cfg.audit.missing;
        std::vector<inference::LagCell> grid =
            inference::lag_sweep(prep.papers, in.table, trajs, lags, nullptr, base);
        std::string lag_csv =
            "scale,lag_days,h1_median,h2_slope,h3_median,n,n_clipped,n_dyads,n_extrapolated\n";
        for (const auto& cell : grid) {
            lag_csv += std::string(scale_name(cell.scale)) + "," +
                       std::to_string(cell.lag_days.value()) + "," + num(cell.h1_median) + "," +
                       (cell.h2_slope ? num(*cell.h2_slope) : "") + "," +
                       (cell.h3_median ? num(*cell.h3_median) : "") + "," +
                       std::to_string(cell.n) + "," + std::to_string(cell.n_clipped) + "," +
                       std::to_string(cell.n_dyads) + "," +
                       std::to_string(cell.n_extrapolated) + "\n";
        }
        outputs["lag_grid.csv"] = lag_csv;

        std::vector<double> observed_gaps;
        for (const auto& g : prep.gaps)
            if (g) observed_gaps.push_back(g->temporal_gap);
        std::vector<double> taus;
        for (double t : percentile_taus(observed_gaps, cfg.tau_percentiles))
            if (t > 0.0) taus.push_back(t);  // frontier-model papers gap at <= 0
        if (taus.empty()) taus.push_back(cfg.audit.classifier.tau);
        std::vector<SweepPoint> sweep =
            threshold_sweep(prep.papers, prep.gaps, in.table, in.rules, in.baselines, taus,
                            Denominator::trivalued, cfg.audit.classifier);
        std::string tau_csv = "tau,k,n,rate\n";
        for (const auto& pt : sweep)
            tau_csv += num(pt.tau) + "," + std::to_string(pt.rate.k) + "," +
                       std::to_string(pt.rate.n) + "," + num(pt.rate.rate) + "\n";
        outputs["tau_sweep.csv"] = tau_csv;

        // Headline-estimate multiverse: median temporal gap across the
        // pre-registered scale x lag x frontier-variant grid. First levels
        // form the primary cell.
        std::vector<inference::SpecAxis> axes = {
            {"scale", {std::string(scale_name(cfg.audit.scale))}},
            {"lag_days", {"180", "90", "270", "365"}},
            {"frontier", {"absolute", "deployment"}},
        };
        auto evaluate = [&](const std::map<std::string, std::string>& choice) {
            AuditConfig acfg = cfg.audit;
            acfg.lag_days = std::stol(choice.at("lag_days"));
            acfg.variant = choice.at("frontier") == "deployment" ? FrontierVariant::deployment
                                                                 : FrontierVariant::absolute;
            FrontierTrajectory traj = build_trajectory(in.table, cfg.audit.scale, acfg);
            GapConfig gc;
            gc.scale = cfg.audit.scale;
            gc.lag_days = acfg.lag_days;
            gc.missing = acfg.missing;
            std::vector<double> gaps;
            for (const PaperRecord& p : prep.papers) {
                try {
                    gaps.push_back(compute_gap(p, in.table, traj, gc).temporal_gap);
                } catch (const UnresolvedModel&) {
                } catch (const MissingScore&) {
                }
            }
            if (gaps.empty()) return std::make_pair(0.0, false);
            stats::TestResult t = stats::wilcoxon_signed_rank(gaps, stats::Alternative::greater);
            double med = stats::median(gaps);
            return std::make_pair(med, t.p_value <= 0.05 && med > 0.0);
        };
        inference::SpecCurveResult curve = inference::specification_curve(axes, evaluate);
        std::string spec_csv = "scale,lag_days,frontier,estimate,reject\n";
        for (const auto& cell : curve.cells)
            spec_csv += cell.choice.at("scale") + "," + cell.choice.at("lag_days") + "," +
                        cell.choice.at("frontier") + "," + num(cell.estimate) + "," +
                        (cell.reject ? "1" : "0") + "\n";
        outputs["spec_curve.csv"] = spec_csv;
        nlohmann::ordered_json sj;
        sj["cells"] = curve.cells.size();
        sj["primary_estimate"] = curve.primary_estimate;
        sj["reject_fraction"] = curve.reject_fraction;
        sj["p10"] = curve.p10;
        sj["p50"] = curve.p50;
        sj["p90"] = curve.p90;
        sj["confirmatory"] = curve.confirmatory;
        outputs["spec_curve.json"] = sj.dump(2) + "\n";
    }

    if (want_cov) {
        std::string cov = "metric,value\n";
        cov += "papers," + std::to_string(result.papers) + "\n";
        cov += "with_gap," + std::to_string(prep.resolved) + "\n";
        cov += "skipped," + std::to_string(result.skipped) + "\n";
        cov += "corpus_line_errors," + std::to_string(corpus_load.errors.size()) + "\n";
        size_t disclosed_eval = 0, clipped = 0, extrapolated = 0, dyads = 0;
        for (const auto& g : prep.gaps) {
            if (!g) continue;
            if (g->eval_date_source == EvalDateSource::disclosed) ++disclosed_eval;
            if (g->eval_date_source == EvalDateSource::clipped_to_release) ++clipped;
            if (g->frontier_extrapolated) ++extrapolated;
            if (g->tier_gap) ++dyads;
        }
        cov += "eval_date_disclosed," + std::to_string(disclosed_eval) + "\n";
        cov += "eval_date_clipped," + std::to_string(clipped) + "\n";
        cov += "frontier_extrapolated," + std::to_string(extrapolated) + "\n";
        cov += "tier_dyads," + std::to_string(dyads) + "\n";
        for (const auto& [domain, count] : corpus_load.by_domain)
            cov += "domain_" + std::string(domain_name(domain)) + "," + std::to_string(count) +
                   "\n";
        for (const auto& [year, count] : corpus_load.by_year)
            cov += "year_" + std::to_string(year) + "," + std::to_string(count) + "\n";
        outputs["coverage.csv"] = cov;

        // Single-surface disclosure ladder: per-item rates over the corpus
        // records' own configuration fields.
        std::string ladder = "item,k,n,rate\n";
        for (ConfigKey key : kAllConfigKeys) {
            size_t k = 0, n = 0;
            for (const PaperRecord& p : prep.papers) {
                const auto& f = p.config[key];
                if (f && f->status == DisclosureStatus::not_applicable) continue;
                ++n;
                if (f && f->status == DisclosureStatus::disclosed) ++k;
            }
            double rate = n ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
            ladder += std::string(config_key_name(key)) + "," + std::to_string(k) + "," +
                      std::to_string(n) + "," + num(rate) + "\n";
        }
        outputs["ladder.csv"] = ladder;
    }

    // Manifest last: content hashes of everything, inputs included.
    nlohmann::ordered_json manifest;
    manifest["suite"] = std::string(suite_name(cfg.suite));
    manifest["seed"] = cfg.seed;
    // thread count deliberately absent: bundles must not depend on it
    manifest["papers"] = result.papers;
    manifest["resolved"] = result.resolved;
    manifest["skipped"] = result.skipped;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    inputs["corpus"] = corpus_load.content_hash;
    inputs["table_snapshot"] = in.table.snapshot_id();
    for (const auto& [label, hash] : cfg.input_hashes) inputs[label] = hash;
    manifest["inputs"] = std::move(inputs);
    nlohmann::ordered_json listed = nlohmann::ordered_json::object();
    for (const auto& [name, content] : outputs) listed[name] = detail::sha256_hex(content);
    manifest["outputs"] = std::move(listed);
    manifest["spec_tags"] = cfg.audit.classifier.tags();
    manifest["exit_code"] =
        (result.skipped > 0 || !corpus_load.errors.empty()) ? 2 : 0;

    for (const auto& [name, content] : outputs) {
        detail::write_file((fs::path(cfg.out_dir) / name).string(), content);
        result.files.push_back(name);
    }
    std::string manifest_text = manifest.dump(2) + "\n";
    detail::write_file((fs::path(cfg.out_dir) / "manifest.json").string(), manifest_text);
    result.files.push_back("manifest.json");
    result.manifest = std::move(manifest);
    result.exit_code = result.manifest.at("exit_code").get<int>();
    return result;
}

}  // namespace frontier_audit::audit

#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <vector>

#include "frontier_audit/gap.hpp"
#include "support/fixtures.hpp"

using namespace frontier_audit;
using Catch::Approx;

namespace {

const CapabilityTable& curated_table() {
    static CapabilityTable table = CapabilityTable::load(fixtures::data_path("eci_scores.csv"));
    return table;
}

const FrontierTrajectory& curated_traj() {
    static FrontierTrajectory traj = FrontierTrajectory::build(
        curated_table(), Scale::eci, Date::parse("2023-03-01"), Date::parse("2026-03-01"));
    return traj;
}

std::string table_csv(std::initializer_list<const char*> rows) {
    std::string out;
    for (const auto& col : CapabilityTable::columns()) {
        if (!out.empty()) out += ',';
        out += col;
    }
    out += '\n';
    for (const char* r : rows) out += std::string(r) + "\n";
    return out;
}

PaperRecord make_paper(const std::string& primary, const std::string& pub_date) {
    PaperRecord p;
    p.doi = "10.1234/fixture";
    p.publication_date = Date::parse(pub_date);
    p.journal = "J Fixtures";
    p.domain = Domain::medicine;
    p.primary_model_raw = primary;
    p.primary_model = primary;
    p.models_evaluated = {primary};
    return p;
}

ConfigField field_with(DisclosureStatus s) { return {s, ""}; }

// Independent recomputation: collect per-component scores into a vector,
// then average, with applicability spelled out longhand.
std::optional<double> oracle_elicitation(const EvalConfig& config, const ModelCaps& caps,
                                         MissingConfigPolicy policy) {
    std::vector<double> comps;
    for (ConfigKey key : kElicitationKeys) {
        bool applicable = true;
        if (key == ConfigKey::reasoning_mode || key == ConfigKey::thinking_effort)
            applicable = caps.reasoning_capable;
        if (key == ConfigKey::tool_use) applicable = caps.tool_capable;
        if (!applicable) continue;
        const auto& f = config[key];
        if (!f) {
            if (policy == MissingConfigPolicy::null_as_undisclosed) comps.push_back(0.0);
            continue;
        }
        if (f->status == DisclosureStatus::disclosed) comps.push_back(1.0);
        if (f->status == DisclosureStatus::undisclosed) comps.push_back(0.0);
    }
    if (comps.empty()) return std::nullopt;
    double sum = 0.0;
    for (double c : comps) sum += c;
    return sum / static_cast<double>(comps.size());
}

}  // namespace

TEST_CASE("eval date imputation", "[gap]") {
    SECTION("publication minus the lag, when the model is old enough") {
        EvalDate ed = impute_eval_date(Date::parse("2024-06-30"), Date::parse("2023-03-14"), 180);
        CHECK(ed.date.iso() == "2024-01-02");
        CHECK(ed.source == EvalDateSource::imputed);
    }

    SECTION("a young model clips the date to its release") {
        EvalDate ed = impute_eval_date(Date::parse("2024-06-30"), Date::parse("2024-05-01"), 180);
        CHECK(ed.date.iso() == "2024-05-01");
        CHECK(ed.source == EvalDateSource::clipped_to_release);
    }

    SECTION("zero lag is the identity on the publication date") {
        EvalDate ed = impute_eval_date(Date::parse("2024-06-30"), Date::parse("2023-01-01"), 0);
        CHECK(ed.date.iso() == "2024-06-30");
        CHECK(ed.source == EvalDateSource::imputed);
    }

    SECTION("exact tie goes to the imputation label") {
        Date pub = Date::parse("2024-06-30");
        EvalDate ed = impute_eval_date(pub, pub.minus_days(180), 180);
        CHECK(ed.date == pub.minus_days(180));
        CHECK(ed.source == EvalDateSource::imputed);
    }

    SECTION("negative lags are refused") {
        CHECK_THROWS_AS(impute_eval_date(Date::parse("2024-06-30"), Date::parse("2023-01-01"), -1),
                        ConfigError);
    }

    SECTION("result is bounded by release and publication") {
        std::mt19937 gen(11);
        std::uniform_int_distribution<long> day(0, 1500), lag(0, 400);
        Date base = Date::parse("2022-01-01");
        for (int i = 0; i < 500; ++i) {
            Date release = base.plus_days(day(gen));
            Date pub = release.plus_days(day(gen));
            long L = lag(gen);
            EvalDate ed = impute_eval_date(pub, release, L);
            CHECK(release <= ed.date);
            CHECK(ed.date <= pub);
        }
    }

    SECTION("a disclosed date bypasses imputation even where clipping would bind") {
        PaperRecord p = make_paper("gpt-4o", "2024-06-30");
        p.eval_date_disclosed = Date::parse("2024-02-10");
        EvalDate ed = resolve_eval_date(p, Date::parse("2024-05-13"), 180);
        CHECK(ed.date.iso() == "2024-02-10");
        CHECK(ed.source == EvalDateSource::disclosed);
    }
}

TEST_CASE("disclosed eval dates pass the proxy filter", "[gap]") {
    PaperRecord p = make_paper("gpt-4o", "2024-06-30");

    SECTION("absent disclosure is fine") { CHECK_NOTHROW(validate_eval_date(p)); }

    SECTION("a clean disclosed date is fine") {
        p.eval_date_disclosed = Date::parse("2024-03-15");
        p.proxy_dates["submission_date"] = Date::parse("2024-04-01");
        CHECK_NOTHROW(validate_eval_date(p));
        CHECK(forbidden_proxy_hits(p).empty());
    }

    SECTION("equality with the publication date is a proxy") {
        p.eval_date_disclosed = p.publication_date;
        auto hits = forbidden_proxy_hits(p);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0] == "publication_date");
        CHECK_THROWS_AS(validate_eval_date(p), ValidationError);
    }

    SECTION("equality with any recorded proxy date is rejected") {
        p.eval_date_disclosed = Date::parse("2024-04-01");
        p.proxy_dates["submission_date"] = Date::parse("2024-04-01");
        p.proxy_dates["training_cutoff"] = Date::parse("2023-10-01");
        auto hits = forbidden_proxy_hits(p);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0] == "submission_date");
        CHECK_THROWS_AS(validate_eval_date(p), ValidationError);
    }

    SECTION("a date after publication is impossible") {
        p.eval_date_disclosed = Date::parse("2024-07-01");
        CHECK_THROWS_AS(validate_eval_date(p), ValidationError);
    }
}

TEST_CASE("capability flags resolve at the eval date", "[gap]") {
    const CapabilityTable& t = curated_table();

    SECTION("a dated reasoning rollout switches the flag on") {
        const ModelRecord& o1 = t.at("o1");
        CHECK_FALSE(caps_at(o1, Date::parse("2024-11-01")).reasoning_capable);
        CHECK(caps_at(o1, Date::parse("2024-12-05")).reasoning_capable);
        CHECK(caps_at(o1, Date::parse("2025-06-01")).reasoning_capable);
    }

    SECTION("tool capability has no rollout date") {
        const ModelRecord& g4 = t.at("gpt-4");
        CHECK(caps_at(g4, Date::parse("2023-03-14")).tool_capable);
        CHECK_FALSE(caps_at(g4, Date::parse("2023-03-14")).reasoning_capable);
    }

    SECTION("an undated reasoning flag holds from release") {
        CapabilityTable synth = CapabilityTable::from_csv(
            table_csv({"m1,fam,t,2024-01-01,100.0,,,,,false,true,,true,"}), "s");
        CHECK(caps_at(synth.at("m1"), Date::parse("2024-01-01")).reasoning_capable);
    }
}

TEST_CASE("elicitation index arithmetic", "[gap]") {
    ModelCaps full{true, true};

    SECTION("all six disclosed") {
        EvalConfig c;
        for (ConfigKey k : kElicitationKeys) c[k] = field_with(DisclosureStatus::disclosed);
        CHECK(elicitation_index(c, full) == Approx(1.0));
    }

    SECTION("three disclosed, three undisclosed") {
        EvalConfig c;
        c[ConfigKey::reasoning_mode] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::thinking_effort] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::tool_use] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::scaffolding] = field_with(DisclosureStatus::undisclosed);
        c[ConfigKey::multi_agent] = field_with(DisclosureStatus::undisclosed);
        c[ConfigKey::prompting_strategy] = field_with(DisclosureStatus::undisclosed);
        CHECK(elicitation_index(c, full) == Approx(0.5));
    }

    SECTION("model capabilities drop the reasoning components") {
        ModelCaps no_reasoning{false, true};
        EvalConfig c;
        // Both reasoning fields are marked disclosed but cannot count.
        c[ConfigKey::reasoning_mode] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::thinking_effort] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::tool_use] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::scaffolding] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::multi_agent] = field_with(DisclosureStatus::undisclosed);
        c[ConfigKey::prompting_strategy] = field_with(DisclosureStatus::undisclosed);
        CHECK(elicitation_index(c, no_reasoning) == Approx(0.5));
    }

    SECTION("field-level not_applicable drops out the same way") {
        EvalConfig c;
        c[ConfigKey::reasoning_mode] = field_with(DisclosureStatus::not_applicable);
        c[ConfigKey::thinking_effort] = field_with(DisclosureStatus::not_applicable);
        c[ConfigKey::tool_use] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::scaffolding] = field_with(DisclosureStatus::disclosed);
        c[ConfigKey::multi_agent] = field_with(DisclosureStatus::undisclosed);
        c[ConfigKey::prompting_strategy] = field_with(DisclosureStatus::undisclosed);
        CHECK(elicitation_index(c, full) == Approx(0.5));
    }

    SECTION("holes score zero under the primary policy, drop under the sensitivity") {
        EvalConfig c;
        for (size_t i = 0; i + 1 < kElicitationKeys.size(); ++i)
            c[kElicitationKeys[i]] = field_with(DisclosureStatus::disclosed);
        // prompting_strategy left unset
        CHECK(elicitation_index(c, full, MissingConfigPolicy::null_as_undisclosed) ==
              Approx(5.0 / 6.0));
        CHECK(elicitation_index(c, full, MissingConfigPolicy::null_as_missing) == Approx(1.0));
    }

    SECTION("everything inapplicable yields no index") {
        ModelCaps none{false, false};
        EvalConfig c;
        c[ConfigKey::scaffolding] = field_with(DisclosureStatus::not_applicable);
        c[ConfigKey::multi_agent] = field_with(DisclosureStatus::not_applicable);
        c[ConfigKey::prompting_strategy] = field_with(DisclosureStatus::not_applicable);
        CHECK_FALSE(elicitation_index(c, none, MissingConfigPolicy::null_as_missing).has_value());
    }

    SECTION("random fixtures agree with the longhand recomputation") {
        std::mt19937 gen(23);
        std::uniform_int_distribution<int> state(0, 3), flag(0, 1);
        for (int trial = 0; trial < 400; ++trial) {
            EvalConfig c;
            for (ConfigKey k : kElicitationKeys) {
                switch (state(gen)) {
                    case 0:
                        break;  // hole
                    case 1:
                        c[k] = field_with(DisclosureStatus::disclosed);
                        break;
                    case 2:
                        c[k] = field_with(DisclosureStatus::undisclosed);
                        break;
                    case 3:
                        c[k] = field_with(DisclosureStatus::not_applicable);
                        break;
                }
            }
            ModelCaps caps{flag(gen) == 1, flag(gen) == 1};
            for (MissingConfigPolicy policy : {MissingConfigPolicy::null_as_undisclosed,
                                               MissingConfigPolicy::null_as_missing}) {
                auto got = elicitation_index(c, caps, policy);
                auto expect = oracle_elicitation(c, caps, policy);
                REQUIRE(got.has_value() == expect.has_value());
                if (got) {
                    CHECK(*got == Approx(*expect).epsilon(1e-12));
                    CHECK(*got >= 0.0);
                    CHECK(*got <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("tier gap finds the stronger untested sibling", "[gap]") {
    const CapabilityTable& t = curated_table();

    SECTION("the flagship released the same week dominates the tested mid-tier") {
        auto gap = tier_gap(t, "claude-3-sonnet", 120.08, Date::parse("2024-03-10"), Scale::eci);
        REQUIRE(gap.has_value());
        CHECK(*gap == Approx(124.5 - 120.08).margin(1e-9));
    }

    SECTION("the family's top scorer has no dyad") {
        CHECK_FALSE(
            tier_gap(t, "claude-3-opus", 124.5, Date::parse("2024-03-10"), Scale::eci).has_value());
    }

    SECTION("window edges are inclusive at 90 and empty at 91 days") {
        CapabilityTable synth = CapabilityTable::from_csv(
            table_csv({"tested,fam,t,2024-01-01,100.0,,,,,false,false,,false,",
                       "sibling,fam,u,2024-06-09,110.0,,,,,false,false,,false,"}),
            "s");
        Date eval = Date::parse("2024-03-11");  // sibling lands exactly eval + 90
        REQUIRE(Date::parse("2024-06-09").days_since(eval) == 90);
        auto at90 = tier_gap(synth, "tested", 100.0, eval, Scale::eci);
        REQUIRE(at90.has_value());
        CHECK(*at90 == Approx(10.0));
        auto at91 = tier_gap(synth, "tested", 100.0, Date::parse("2024-03-10"), Scale::eci);
        CHECK_FALSE(at91.has_value());
    }

    SECTION("the sensitivity variant only admits siblings already released") {
        CapabilityTable synth = CapabilityTable::from_csv(
            table_csv({"tested,fam,t,2024-01-01,100.0,,,,,false,false,,false,",
                       "later,fam,u,2024-04-01,110.0,,,,,false,false,,false,"}),
            "s");
        Date eval = Date::parse("2024-03-01");
        CHECK(tier_gap(synth, "tested", 100.0, eval, Scale::eci).has_value());
        TierGapConfig strict;
        strict.require_release_before_eval = true;
        CHECK_FALSE(tier_gap(synth, "tested", 100.0, eval, Scale::eci, strict).has_value());
    }

    SECTION("equal-scored siblings do not count, higher is strict") {
        CapabilityTable synth = CapabilityTable::from_csv(
            table_csv({"tested,fam,t,2024-01-01,100.0,,,,,false,false,,false,",
                       "twin,fam,u,2024-01-15,100.0,,,,,false,false,,false,"}),
            "s");
        CHECK_FALSE(
            tier_gap(synth, "tested", 100.0, Date::parse("2024-02-01"), Scale::eci).has_value());
    }

    SECTION("multiple qualifying siblings reduce to the max") {
        CapabilityTable synth = CapabilityTable::from_csv(
            table_csv({"tested,fam,t,2024-01-01,100.0,,,,,false,false,,false,",
                       "better,fam,u,2024-01-15,105.0,,,,,false,false,,false,",
                       "best,fam,v,2024-02-01,112.0,,,,,false,false,,false,"}),
            "s");
        auto gap = tier_gap(synth, "tested", 100.0, Date::parse("2024-02-10"), Scale::eci);
        REQUIRE(gap.has_value());
        CHECK(*gap == Approx(12.0));
    }

    SECTION("brute-force family scan agrees across the curated table") {
        for (const char* key : {"claude-3-sonnet", "claude-3-opus", "claude-3.5-sonnet",
                                "claude-3.5-haiku", "claude-opus-4", "gpt-4o", "gemini-1.0-pro"}) {
            const ModelRecord& tested = t.at(key);
            for (const char* day :
                 {"2024-03-10", "2024-07-01", "2024-11-15", "2025-03-01", "2025-12-01"}) {
                Date eval = Date::parse(day);
                for (Scale s : kAllScales) {
                    auto direct = tested.score(s);
                    if (!direct) continue;
                    std::optional<double> expect;
                    for (const auto& cand : t.records()) {
                        if (cand.family != tested.family ||
                            cand.canonical_key == tested.canonical_key)
                            continue;
                        long delta = cand.release_date.days_since(eval);
                        if (delta < -90 || delta > 90) continue;
                        auto sc = cand.score(s);
                        if (!sc || *sc <= *direct) continue;
                        double g = *sc - *direct;
                        if (!expect || g > *expect) expect = g;
                    }
                    auto got = tier_gap(t, key, *direct, eval, s);
                    REQUIRE(got.has_value() == expect.has_value());
                    if (got) CHECK(*got == Approx(*expect).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("gap vectors assemble the full audit readout", "[gap]") {
    const CapabilityTable& t = curated_table();
    const FrontierTrajectory& traj = curated_traj();

    SECTION("worked vendor-pair example") {
        CapabilityTable synth = CapabilityTable::from_csv(
            table_csv(
                {"claude-3.7-sonnet,claude,sonnet,2025-02-24,142.00,,,3.00,15.00,false,true,"
                 "2025-02-24,true,",
                 "claude-opus-4.5,claude,opus,2025-11-24,149.90,,,5.00,25.00,true,true,"
                 "2025-11-24,true,"}),
            "s");
        FrontierTrajectory vendor_traj = FrontierTrajectory::build(
            synth, Scale::eci, Date::parse("2025-03-01"), Date::parse("2026-01-01"));

        PaperRecord p = make_paper("claude-3.7-sonnet", "2026-06-01");
        GapVector g = compute_gap(p, synth, vendor_traj);

        CHECK(g.eval_date.iso() == "2025-12-03");
        CHECK(g.eval_date_source == EvalDateSource::imputed);
        CHECK(g.temporal_gap == Approx(7.9).margin(1e-9));
        REQUIRE(g.tier_gap.has_value());
        CHECK(*g.tier_gap == Approx(7.9).margin(1e-9));
        // Nothing extracted: every applicable component scores zero, so the
        // whole temporal gap is unexplained elicitation-wise.
        REQUIRE(g.elicitation_index.has_value());
        CHECK(*g.elicitation_index == 0.0);
        REQUIRE(g.shortfall.has_value());
        CHECK(*g.shortfall == Approx(g.temporal_gap));
        CHECK_FALSE(g.score_imputed);
        CHECK_FALSE(g.frontier_extrapolated);
    }

    SECTION("the frontier model itself has zero gap") {
        PaperRecord p = make_paper("gpt-5", "2026-03-01");
        for (ConfigKey k : kElicitationKeys)
            p.config[k] = field_with(DisclosureStatus::disclosed);
        GapVector g = compute_gap(p, t, traj);
        CHECK(g.temporal_gap == 0.0);
        CHECK_FALSE(g.tier_gap.has_value());
        CHECK(*g.elicitation_index == 1.0);
        CHECK(*g.shortfall == 0.0);
    }

    SECTION("unresolved and unknown models raise typed errors") {
        PaperRecord none = make_paper("gpt-5", "2025-01-01");
        none.primary_model.reset();
        CHECK_THROWS_AS(compute_gap(none, t, traj), UnresolvedModel);

        PaperRecord ghost = make_paper("phantom-model", "2025-01-01");
        CHECK_THROWS_AS(compute_gap(ghost, t, traj), UnresolvedModel);
    }

    SECTION("score holes respect the lookup policy") {
        PaperRecord p = make_paper("claude-3.5-sonnet-v2", "2025-02-01");
        CHECK_THROWS_AS(compute_gap(p, t, traj), MissingScore);

        GapConfig cfg;
        cfg.lookup = LookupPolicy::sibling_impute;
        GapVector g = compute_gap(p, t, traj, cfg);
        CHECK(g.score_imputed);
        // Borrowed score: 130.0 from the June sibling.
        Date eval = g.eval_date;
        CHECK(g.temporal_gap == Approx(traj.value_at(eval).score - 130.0));
    }

    SECTION("disclosed dates flow through to the vector") {
        PaperRecord p = make_paper("gpt-4o", "2025-03-01");
        p.eval_date_disclosed = Date::parse("2024-06-15");
        GapVector g = compute_gap(p, t, traj);
        CHECK(g.eval_date.iso() == "2024-06-15");
        CHECK(g.eval_date_source == EvalDateSource::disclosed);
    }

    SECTION("queries past the trajectory end are flagged as extrapolated") {
        FrontierTrajectory short_traj = FrontierTrajectory::build(
            t, Scale::eci, Date::parse("2023-03-01"), Date::parse("2024-12-01"));
        PaperRecord p = make_paper("gpt-4o", "2025-12-01");
        GapConfig cfg;
        cfg.lag_days = 0;
        GapVector g = compute_gap(p, t, short_traj, cfg);
        CHECK(g.frontier_extrapolated);
        CHECK(g.eval_date.iso() == "2025-12-01");
    }

    SECTION("temporal gap is non-negative whenever the table covers the model") {
        for (const char* key : {"gpt-4", "gpt-4o", "claude-3-opus", "gemini-1.5-pro",
                                "llama-3.1-405b", "deepseek-r1"}) {
            PaperRecord p = make_paper(key, "2025-09-01");
            GapVector g = compute_gap(p, t, traj);
            CHECK(g.temporal_gap >= 0.0);
            if (g.shortfall) {
                CHECK(*g.shortfall >= 0.0);
                CHECK(*g.shortfall <= g.temporal_gap);
            }
        }
    }

    SECTION("raising the lag never raises the temporal gap") {
        PaperRecord p = make_paper("claude-3-sonnet", "2025-06-01");
        double prev = std::numeric_limits<double>::infinity();
        for (long L = 0; L <= 390; L += 30) {
            GapConfig cfg;
            cfg.lag_days = L;
            GapVector g = compute_gap(p, t, traj, cfg);
            CHECK(g.temporal_gap <= prev);
            prev = g.temporal_gap;
        }
    }
}

TEST_CASE("review-lag medians and the rational-lag baseline", "[gap]") {
    SECTION("the curated config loads") {
        LagMedians m = load_lag_medians(fixtures::data_path("lag_medians.json"));
        CHECK(m.at(Domain::medicine) == 189);
        CHECK(m.at(Domain::coding) == 155);
        CHECK(m.at(Domain::education) == 231);
        CHECK(m.at(Domain::scientific_reasoning) == 97);
        CHECK(m.at(Domain::law) == 180);
        CHECK(m.at(Domain::other) == 180);
    }

    SECTION("malformed configs are rejected") {
        CHECK_THROWS_AS(parse_lag_medians("not json"), ParseError);
        CHECK_THROWS_AS(parse_lag_medians(R"({"schema":"other/v1","days":{}})"), ValidationError);
        CHECK_THROWS_AS(parse_lag_medians(R"({"schema":"lag_medians/v1"})"), ValidationError);
        CHECK_THROWS_AS(parse_lag_medians(R"({"schema":"lag_medians/v1","days":{"medicine":-5}})"),
                        ValidationError);
        CHECK_THROWS_AS(
            parse_lag_medians(R"({"schema":"lag_medians/v1","days":{"alchemy":100}})"),
            ParseError);
        CHECK_THROWS_AS(
            parse_lag_medians(R"({"schema":"lag_medians/v1","days":{"medicine":18.5}})"),
            ValidationError);
    }

    SECTION("a linear frontier turns the median straight into points") {
        std::string csv = "month,key,score\n";
        double score = 100.0;
        for (int year = 2024; year <= 2025; ++year)
            for (int month = 1; month <= (year == 2025 ? 6 : 12); ++month) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%04d-%02d,m,%g\n", year, month, score);
                csv += buf;
                score += 1.0;
            }
        FrontierTrajectory traj =
            FrontierTrajectory::from_csv(csv, Scale::eci, FrontierVariant::absolute);

        LagMedians medians{{Domain::coding, 180}};
        double implied =
            rational_lag_baseline(Domain::coding, medians, traj, Date::parse("2025-06-15"));
        CHECK(implied == Approx(6.0));
    }

    SECTION("zero latency implies zero baseline") {
        const FrontierTrajectory& traj = curated_traj();
        LagMedians medians{{Domain::other, 0}};
        CHECK(rational_lag_baseline(Domain::other, medians, traj, Date::parse("2025-06-15")) ==
              0.0);
    }

    SECTION("unknown domains are a configuration error") {
        LagMedians medians{{Domain::coding, 155}};
        CHECK_THROWS_AS(
            rational_lag_baseline(Domain::law, medians, curated_traj(), Date::parse("2025-06-15")),
            ConfigError);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "frontier_audit/capability_table.hpp"
#include "frontier_audit/detail/csv.hpp"
#include "support/fixtures.hpp"

using namespace frontier_audit;
using Catch::Approx;

namespace {

const CapabilityTable& curated_table() {
    static CapabilityTable table = CapabilityTable::load(fixtures::data_path("eci_scores.csv"));
    return table;
}

// Builds a minimal table body for validation tests. Each row string must
// already carry all fourteen cells.
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

}  // namespace

TEST_CASE("curated score table loads with its digest verified", "[table]") {
    const CapabilityTable& t = curated_table();
    CHECK(t.records().size() == 23);
    CHECK(t.snapshot_id() == "2026-04-frozen");
    CHECK(t.content_hash() ==
          "79bf86171b011999b25e31919270cb02ff41c2bda87a815b9ce7b4727b5497f7");

    SECTION("reference anchors hold their pinned values") {
        CHECK(t.at("gpt-5").score(Scale::eci) == 150.0);
        CHECK(t.at("gpt-5").release_date.iso() == "2025-08-07");
        CHECK(t.at("claude-3.5-sonnet").score(Scale::eci) == 130.0);
        CHECK(*t.at("gpt-5").score(Scale::eci) - *t.at("claude-3.5-sonnet").score(Scale::eci) ==
              Approx(20.0));
    }

    SECTION("same-tier generation gaps average to the default materiality step") {
        auto gap = [&](const char* newer, const char* older) {
            return *t.at(newer).score(Scale::eci) - *t.at(older).score(Scale::eci);
        };
        double pairs[4] = {
            gap("claude-3.5-sonnet", "claude-3-sonnet"),
            gap("claude-opus-4.6", "claude-opus-4"),
            gap("claude-opus-4", "claude-3-opus"),
            gap("gemini-1.5-pro", "gemini-1.0-pro"),
        };
        CHECK(pairs[0] == Approx(9.92).margin(1e-9));
        CHECK(pairs[1] == Approx(11.72).margin(1e-9));
        CHECK(pairs[2] == Approx(16.30).margin(1e-9));
        CHECK(pairs[3] == Approx(11.22).margin(1e-9));
        double mean = (pairs[0] + pairs[1] + pairs[2] + pairs[3]) / 4.0;
        CHECK(mean == Approx(12.29).margin(1e-9));
        CHECK(std::round(mean) == 12.0);
    }

    SECTION("adjacent same-vendor releases sit one short step apart") {
        CHECK(*t.at("claude-opus-4.5").score(Scale::eci) -
                  *t.at("claude-3.7-sonnet").score(Scale::eci) ==
              Approx(7.9).margin(1e-9));
    }

    SECTION("capability flags parsed as declared") {
        CHECK(t.at("gpt-5").reasoning_capable);
        CHECK(t.at("gpt-5").tool_capable);
        CHECK(t.at("gpt-5").is_frontier_tier);
        CHECK_FALSE(t.at("gpt-4o-mini").is_frontier_tier);
        CHECK_FALSE(t.at("o1").tool_capable);
        REQUIRE(t.at("o1").reasoning_available_date.has_value());
        CHECK(t.at("o1").reasoning_available_date->iso() == "2024-12-05");
        CHECK_FALSE(t.at("gpt-4").reasoning_available_date.has_value());
    }

    SECTION("alias column is queryable") {
        CHECK(t.has_alias("gpt4"));
        CHECK(t.key_for_alias("gpt4") == "gpt-4");
        CHECK(t.key_for_alias("gpt-4") == "gpt-4");
        CHECK_FALSE(t.key_for_alias("made-up-model").has_value());
    }

    SECTION("family listing") {
        CHECK(t.family_members("claude").size() == 9);
        CHECK(t.family_members("gemini").size() == 3);
        CHECK(t.family_members("nonexistent").empty());
    }

    SECTION("unknown keys come back as a typed outcome, not an exception") {
        ScoreLookup miss = t.lookup_score("not-a-model", Scale::eci);
        CHECK(miss.outcome == LookupOutcome::unknown_key);
        CHECK_FALSE(miss.ok());
        CHECK_THROWS_AS(t.at("not-a-model"), LookupError);
    }
}

TEST_CASE("digest mismatch is fatal at load time", "[table]") {
    std::string bytes = detail::read_file(fixtures::data_path("eci_scores.csv"));
    std::string good = detail::sha256_hex(bytes);

    CHECK_NOTHROW(CapabilityTable::from_csv(bytes, "snap", good));

    std::string tampered = bytes;
    tampered[tampered.find("150.00")] = '9';  // nudge one anchor score
    CHECK_THROWS_AS(CapabilityTable::from_csv(tampered, "snap", good), IntegrityError);

    SECTION("a stale companion file blocks the load") {
        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path() / "fa_table_digest";
        fs::create_directories(dir);
        fs::path csv = dir / "scores.csv";
        std::ofstream(csv) << bytes;
        std::ofstream(csv.string() + ".sha256")
            << std::string(64, '0') << "  scores.csv\n";
        CHECK_THROWS_AS(CapabilityTable::load(csv.string()), IntegrityError);

        std::ofstream(csv.string() + ".sha256") << good << "\n";
        CHECK_NOTHROW(CapabilityTable::load(csv.string()));
        fs::remove_all(dir);
    }

    SECTION("absent companion means no verification, stem names the snapshot") {
        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path() / "fa_table_nodigest";
        fs::create_directories(dir);
        fs::path csv = dir / "unverified.csv";
        std::ofstream(csv) << table_csv(
            {"m1,fam,t,2024-01-01,100.0,,,,,false,false,,false,"});
        CapabilityTable t = CapabilityTable::load(csv.string());
        CHECK(t.records().size() == 1);
        CHECK(t.snapshot_id() == "unverified");
        fs::remove_all(dir);
    }
}

TEST_CASE("sibling imputation fills a missing score from the nearest peer", "[table]") {
    const CapabilityTable& t = curated_table();

    SECTION("strict policy reports the hole instead of guessing") {
        ScoreLookup strict = t.lookup_score("claude-3.5-sonnet-v2", Scale::eci);
        CHECK(strict.outcome == LookupOutcome::missing_score);
        CHECK_FALSE(strict.ok());
        CHECK(std::isnan(strict.value));
        CHECK(strict.source_key == "claude-3.5-sonnet-v2");
    }

    SECTION("imputing policy borrows from the release-date neighbour") {
        ScoreLookup imp =
            t.lookup_score("claude-3.5-sonnet-v2", Scale::eci, LookupPolicy::sibling_impute);
        REQUIRE(imp.ok());
        CHECK(imp.value == 130.0);
        CHECK(imp.imputed);
        CHECK(imp.source_key == "claude-3.5-sonnet");

        ScoreLookup aa =
            t.lookup_score("claude-3.5-sonnet-v2", Scale::aa_index, LookupPolicy::sibling_impute);
        REQUIRE(aa.ok());
        CHECK(aa.value == 40.0);
        CHECK(aa.imputed);
    }

    SECTION("a direct score is never overridden by the policy") {
        ScoreLookup direct = t.lookup_score("claude-3.5-sonnet-v2", Scale::arena_elo,
                                            LookupPolicy::sibling_impute);
        REQUIRE(direct.ok());
        CHECK(direct.value == 1283.0);
        CHECK_FALSE(direct.imputed);
    }

    SECTION("the 90-day window is a hard edge") {
        // The donor sits 87 days before the target's release.
        long dist = t.at("claude-3.5-sonnet-v2")
                        .release_date.days_since(t.at("claude-3.5-sonnet").release_date);
        REQUIRE(dist == 87);
        CHECK(t.lookup_score("claude-3.5-sonnet-v2", Scale::eci, LookupPolicy::sibling_impute, 87)
                  .ok());
        CHECK(t.lookup_score("claude-3.5-sonnet-v2", Scale::eci, LookupPolicy::sibling_impute, 86)
                  .outcome == LookupOutcome::no_sibling);
    }
}

TEST_CASE("sibling donor selection is deterministic under ties", "[table]") {
    SECTION("equidistant donors break toward the earlier release") {
        CapabilityTable t = CapabilityTable::from_csv(
            table_csv({"target,fam,t,2024-06-01,,,,,,false,false,,false,",
                       "early,fam,t,2024-05-02,110.0,,,,,false,false,,false,",
                       "late,fam,t,2024-07-01,118.0,,,,,false,false,,false,"}),
            "synthetic");
        ScoreLookup got = t.lookup_score("target", Scale::eci, LookupPolicy::sibling_impute);
        REQUIRE(got.ok());
        CHECK(got.source_key == "early");
        CHECK(got.value == 110.0);
    }

    SECTION("same release date falls back to key order") {
        CapabilityTable t = CapabilityTable::from_csv(
            table_csv({"target,fam,t,2024-06-01,,,,,,false,false,,false,",
                       "mb,fam,t,2024-05-02,118.0,,,,,false,false,,false,",
                       "ma,fam,t,2024-05-02,110.0,,,,,false,false,,false,"}),
            "synthetic");
        ScoreLookup got = t.lookup_score("target", Scale::eci, LookupPolicy::sibling_impute);
        REQUIRE(got.ok());
        CHECK(got.source_key == "ma");
    }

    SECTION("nearer donor wins regardless of row order") {
        CapabilityTable t = CapabilityTable::from_csv(
            table_csv({"target,fam,t,2024-06-01,,,,,,false,false,,false,",
                       "far,fam,t,2024-03-10,105.0,,,,,false,false,,false,",
                       "near,fam,t,2024-06-20,112.0,,,,,false,false,,false,"}),
            "synthetic");
        ScoreLookup got = t.lookup_score("target", Scale::eci, LookupPolicy::sibling_impute);
        REQUIRE(got.ok());
        CHECK(got.source_key == "near");
    }

    SECTION("donation is single-hop: a scoreless sibling cannot relay") {
        CapabilityTable t = CapabilityTable::from_csv(
            table_csv({"target,fam,t,2024-06-01,,1200,,,,false,false,,false,",
                       "hole,fam,t,2024-05-20,,1210,,,,false,false,,false,",
                       "donor,fam,t,2024-01-15,109.0,,,,,false,false,,false,"}),
            "synthetic");
        // "hole" is within the window but has no eci itself; "donor" has one
        // but sits far outside the window. Nothing propagates.
        CHECK(t.lookup_score("target", Scale::eci, LookupPolicy::sibling_impute).outcome ==
              LookupOutcome::no_sibling);
    }

    SECTION("family and tier must both match") {
        CapabilityTable t = CapabilityTable::from_csv(
            table_csv({"target,fam,t,2024-06-01,,,,,,false,false,,false,",
                       "other-tier,fam,u,2024-06-02,120.0,,,,,false,false,,false,",
                       "other-family,gam,t,2024-06-02,121.0,,,,,false,false,,false,"}),
            "synthetic");
        CHECK(t.lookup_score("target", Scale::eci, LookupPolicy::sibling_impute).outcome ==
              LookupOutcome::no_sibling);
    }
}

TEST_CASE("table validation rejects malformed rows", "[table]") {
    SECTION("structural errors") {
        CHECK_THROWS_AS(CapabilityTable::from_csv("", "s"), ParseError);
        CHECK_THROWS_AS(CapabilityTable::from_csv("bad,header\n", "s"), ParseError);
        CHECK_THROWS_AS(CapabilityTable::from_csv(table_csv({"only,three,cells"}), "s"),
                        ParseError);
    }

    SECTION("key and alias uniqueness") {
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"dup,fam,t,2024-01-01,100.0,,,,,false,false,,false,",
                           "dup,fam,t,2024-02-01,101.0,,,,,false,false,,false,"}),
                "s"),
            ValidationError);
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"m1,fam,t,2024-01-01,100.0,,,,,false,false,,false,shared",
                           "m2,fam,t,2024-02-01,101.0,,,,,false,false,,false,shared"}),
                "s"),
            ValidationError);
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"m1,fam,t,2024-01-01,100.0,,,,,false,false,,false,m2",
                           "m2,fam,t,2024-02-01,101.0,,,,,false,false,,false,"}),
                "s"),
            ValidationError);
    }

    SECTION("cell-level parsing") {
        CHECK_THROWS_AS(CapabilityTable::from_csv(
                            table_csv({",fam,t,2024-01-01,100.0,,,,,false,false,,false,"}), "s"),
                        ValidationError);
        CHECK_THROWS_AS(CapabilityTable::from_csv(
                            table_csv({"m1,,t,2024-01-01,100.0,,,,,false,false,,false,"}), "s"),
                        ValidationError);
        CHECK_THROWS_AS(CapabilityTable::from_csv(
                            table_csv({"m1,fam,t,01/01/2024,100.0,,,,,false,false,,false,"}), "s"),
                        ParseError);
        CHECK_THROWS_AS(CapabilityTable::from_csv(
                            table_csv({"m1,fam,t,2024-01-01,12x,,,,,false,false,,false,"}), "s"),
                        ParseError);
        CHECK_THROWS_AS(CapabilityTable::from_csv(
                            table_csv({"m1,fam,t,2024-01-01,100.0,,,,,maybe,false,,false,"}), "s"),
                        ParseError);
    }

    SECTION("integer-grade scale rejects fractional and scientific cells") {
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"m1,fam,t,2024-01-01,100.0,,40.5,,,false,false,,false,"}), "s"),
            ValidationError);
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"m1,fam,t,2024-01-01,100.0,,4e1,,,false,false,,false,"}), "s"),
            ValidationError);
        CHECK_NOTHROW(CapabilityTable::from_csv(
            table_csv({"m1,fam,t,2024-01-01,100.0,,40,,,false,false,,false,"}), "s"));
    }

    SECTION("declared score interval is enforced as an open interval") {
        std::string meta = "# snapshot=s eci_min=50 eci_max=250\n";
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                meta + table_csv({"m1,fam,t,2024-01-01,250.0,,,,,false,false,,false,"}), "d"),
            ValidationError);
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                meta + table_csv({"m1,fam,t,2024-01-01,50.0,,,,,false,false,,false,"}), "d"),
            ValidationError);
        CHECK_NOTHROW(CapabilityTable::from_csv(
            meta + table_csv({"m1,fam,t,2024-01-01,249.9,,,,,false,false,,false,"}), "d"));
    }

    SECTION("prices must be positive when present") {
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"m1,fam,t,2024-01-01,100.0,,,0.0,,false,false,,false,"}), "s"),
            ValidationError);
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"m1,fam,t,2024-01-01,100.0,,,,-3,false,false,,false,"}), "s"),
            ValidationError);
    }

    SECTION("a reasoning switch date implies the capability flag") {
        CHECK_THROWS_AS(
            CapabilityTable::from_csv(
                table_csv({"m1,fam,t,2024-01-01,100.0,,,,,false,false,2024-06-01,false,"}), "s"),
            ValidationError);
        CHECK_NOTHROW(CapabilityTable::from_csv(
            table_csv({"m1,fam,t,2024-01-01,100.0,,,,,false,true,2024-06-01,false,"}), "s"));
    }

    SECTION("metadata line overrides the fallback snapshot id") {
        CapabilityTable t = CapabilityTable::from_csv(
            "# snapshot=frozen-x\n" +
                table_csv({"m1,fam,t,2024-01-01,100.0,,,,,false,false,,false,"}),
            "fallback");
        CHECK(t.snapshot_id() == "frozen-x");
        CapabilityTable t2 = CapabilityTable::from_csv(
            table_csv({"m1,fam,t,2024-01-01,100.0,,,,,false,false,,false,"}), "fallback");
        CHECK(t2.snapshot_id() == "fallback");
    }
}

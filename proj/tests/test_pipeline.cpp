#include <doctest.h>

#include <cmath>
#include <fstream>

#include "lakecomp/config.hpp"
#include "lakecomp/errors.hpp"
#include "lakecomp/pipeline.hpp"

using namespace lakecomp;

namespace {

constexpr Timestamp kNow = 1'700'000'000;

std::string fixture(const std::string& name) {
    return std::string(LAKECOMP_FIXTURE_DIR) + "/" + name;
}

SnapshotDocument fixture_snapshot() { return load_snapshot_file(fixture("snapshot.json")); }

EngineConfig fixture_engine() {
    return load_cli_config_file(fixture("config.json")).engine;
}

}  // namespace

// The fixture was traced by hand: candidates alpha.events, alpha.logs,
// beta.fresh, beta.metrics; fresh is filtered (600 s old); traits and
// selection below are spreadsheet arithmetic over the file sizes.
TEST_CASE("fixture pipeline matches the hand trace") {
    PipelineResult res = run_pipeline(fixture_snapshot(), fixture_engine(), kNow);

    REQUIRE(res.pool.size() == 4);
    REQUIRE(res.dropped.size() == 1);
    CHECK(res.dropped[0].candidate_id == "beta.fresh");
    CHECK(res.dropped[0].rule_name == "recent_creation");
    REQUIRE(res.kept.size() == 3);
    CHECK(res.kept[0].candidate_id == "alpha.events");
    CHECK(res.kept[1].candidate_id == "alpha.logs");
    CHECK(res.kept[2].candidate_id == "beta.metrics");

    // Hand-computed stats.
    CHECK(res.kept[0].stats.file_count == 7);
    CHECK(res.kept[0].stats.total_bytes == 1'090'519'040);
    CHECK(res.kept[0].stats.small_file_count == 6);
    CHECK(res.kept[1].stats.total_bytes == 660'602'880);
    CHECK(res.kept[1].stats.small_file_count == 2);
    CHECK(res.kept[2].stats.total_bytes == 2'133'852'160);
    CHECK(res.kept[2].stats.small_file_count == 2);  // 512 MiB file is not small

    // Raw traits: reduction 6/2/2; cost = 8 * bytes / 2e11.
    CHECK(res.raw_traits[0].at("file_count_reduction") == 6.0);
    CHECK(res.raw_traits[1].at("file_count_reduction") == 2.0);
    CHECK(res.raw_traits[2].at("file_count_reduction") == 2.0);
    double cost_events = 8.0 * (1'090'519'040.0 / 200e9);
    double cost_logs = 8.0 * (660'602'880.0 / 200e9);
    double cost_metrics = 8.0 * (2'133'852'160.0 / 200e9);
    CHECK(res.raw_traits[0].at("compute_cost_gbhr") ==
          doctest::Approx(cost_events).epsilon(1e-12));
    CHECK(res.raw_traits[1].at("compute_cost_gbhr") == doctest::Approx(cost_logs).epsilon(1e-12));
    CHECK(res.raw_traits[2].at("compute_cost_gbhr") ==
          doctest::Approx(cost_metrics).epsilon(1e-12));

    // Normalized: reduction -> 1/0/0; cost -> events interpolated, logs 0, metrics 1.
    CHECK(res.normalized_traits[0].at("file_count_reduction") == 1.0);
    CHECK(res.normalized_traits[1].at("file_count_reduction") == 0.0);
    CHECK(res.normalized_traits[2].at("file_count_reduction") == 0.0);
    double norm_cost_events = (cost_events - cost_logs) / (cost_metrics - cost_logs);
    CHECK(res.normalized_traits[0].at("compute_cost_gbhr") ==
          doctest::Approx(norm_cost_events).epsilon(1e-12));
    CHECK(res.normalized_traits[1].at("compute_cost_gbhr") == 0.0);
    CHECK(res.normalized_traits[2].at("compute_cost_gbhr") == 1.0);

    // Scores: 0.7*dF' - 0.3*cost'.
    CHECK(res.scored[0].score ==
          doctest::Approx(0.7 - 0.3 * norm_cost_events).epsilon(1e-12));
    CHECK(res.scored[1].score == 0.0);
    CHECK(res.scored[2].score == doctest::Approx(-0.3).epsilon(1e-12));

    // Budget 0.05: events fits (0.0436...), logs and metrics exceed the rest.
    REQUIRE(res.plan.tasks.size() == 1);
    CHECK(res.plan.tasks[0].candidate_id == "alpha.events");
    CHECK(res.plan.total_estimated_gbhr == doctest::Approx(cost_events).epsilon(1e-12));
    REQUIRE(res.plan.excluded.size() == 2);
    CHECK(res.plan.excluded[0].candidate_id == "alpha.logs");
    CHECK(res.plan.excluded[0].reason == "budget_exceeded");
    REQUIRE(res.plan.excluded[0].remaining_budget_gbhr.has_value());
    CHECK(*res.plan.excluded[0].remaining_budget_gbhr ==
          doctest::Approx(0.05 - cost_events).epsilon(1e-9));
    CHECK(res.plan.excluded[1].candidate_id == "beta.metrics");

    // One task -> one wave.
    REQUIRE(res.schedule.waves.size() == 1);
    CHECK(res.schedule.waves[0][0].candidate_id == "alpha.events");

    // Task scores equal the sum of their rationale contributions.
    for (const auto& task : res.plan.tasks) {
        double sum = 0.0;
        for (const auto& entry : task.rationale) sum += entry.contribution;
        CHECK(std::abs(task.score - sum) <= 1e-9);
    }
}

TEST_CASE("golden plan bytes are stable") {
    PipelineResult res = run_pipeline(fixture_snapshot(), fixture_engine(), kNow);
    std::string plan_bytes = to_canonical_string(plan_to_json(res.plan));
    std::string schedule_bytes = to_canonical_string(schedule_to_json(res.schedule));

    std::ifstream golden_plan(fixture("golden_plan.json"), std::ios::binary);
    REQUIRE(golden_plan.good());
    std::string expected_plan((std::istreambuf_iterator<char>(golden_plan)),
                              std::istreambuf_iterator<char>());
    CHECK(plan_bytes == expected_plan);

    std::ifstream golden_schedule(fixture("golden_schedule.json"), std::ios::binary);
    REQUIRE(golden_schedule.good());
    std::string expected_schedule((std::istreambuf_iterator<char>(golden_schedule)),
                                  std::istreambuf_iterator<char>());
    CHECK(schedule_bytes == expected_schedule);
}

TEST_CASE("pipeline output is invariant under input permutations") {
    SnapshotDocument doc = fixture_snapshot();
    EngineConfig cfg = fixture_engine();
    std::string baseline = to_canonical_string(plan_to_json(run_pipeline(doc, cfg, kNow).plan));

    SnapshotDocument permuted = doc;
    std::reverse(permuted.databases.begin(), permuted.databases.end());
    for (auto& db : permuted.databases) std::reverse(db.tables.begin(), db.tables.end());
    CHECK(to_canonical_string(plan_to_json(run_pipeline(permuted, cfg, kNow).plan)) == baseline);
}

TEST_CASE("threshold mode selects at the exact boundary") {
    SnapshotDocument doc = fixture_snapshot();
    EngineConfig cfg = fixture_engine();
    cfg.ranking_mode = RankingMode::ThresholdUnconstrained;
    cfg.budget_gbhr.reset();
    cfg.thresholds = {{"small_file_fraction", 0.10}};

    PipelineResult res = run_pipeline(doc, cfg, kNow);
    // fractions: events 6/7, logs 2/3, metrics 2/4 -- all above 0.10.
    CHECK(res.plan.tasks.size() == 3);
    for (const auto& task : res.plan.tasks) {
        CHECK(task.score == 0.0);
        CHECK(task.rationale.empty());
    }

    cfg.thresholds = {{"small_file_fraction", 0.51}};
    PipelineResult res2 = run_pipeline(doc, cfg, kNow);
    // metrics at exactly 0.50 no longer selected.
    REQUIRE(res2.plan.tasks.size() == 2);
    CHECK(res2.plan.tasks[0].candidate_id == "alpha.events");
    CHECK(res2.plan.tasks[1].candidate_id == "alpha.logs");
    bool metrics_excluded = false;
    for (const auto& e : res2.plan.excluded)
        if (e.candidate_id == "beta.metrics" && e.reason == "below_threshold")
            metrics_excluded = true;
    CHECK(metrics_excluded);
}

TEST_CASE("quota-adaptive weights favor databases near their quota") {
    SnapshotDocument doc = fixture_snapshot();
    EngineConfig cfg = fixture_engine();
    cfg.quota_adaptive_w1 = true;
    cfg.budget_gbhr.reset();
    cfg.k = 10;

    PipelineResult res = run_pipeline(doc, cfg, kNow);
    // alpha is at 60% quota: w1 = 0.5 * 1.6 = 0.8; beta at 10%: w1 = 0.55.
    REQUIRE(res.scored.size() == 3);
    for (const auto& sc : res.scored) {
        double expected_w1 = sc.candidate_id.rfind("alpha.", 0) == 0 ? 0.8 : 0.55;
        for (const auto& entry : sc.rationale) {
            if (entry.trait_name == "file_count_reduction")
                CHECK(entry.weight == doctest::Approx(expected_w1).epsilon(1e-12));
            if (entry.trait_name == "compute_cost_gbhr")
                CHECK(entry.weight == doctest::Approx(1.0 - expected_w1).epsilon(1e-12));
        }
    }
}

TEST_CASE("feedback then re-plan drops the compacted candidate") {
    SnapshotDocument doc = fixture_snapshot();
    EngineConfig cfg = fixture_engine();
    PipelineResult res = run_pipeline(doc, cfg, kNow);
    REQUIRE(res.plan.tasks.size() == 1);
    const CompactionTask& executed = res.plan.tasks[0];

    // Execution model: alpha.events' 1040 MiB repacked at the 512 MiB target
    // leaves 3 files (2 full + remainder), only one of them small.
    TableState post;
    post.table_id = executed.scope.table_id;
    post.created_at = 1'600'000'000;
    post.last_write_at = kNow;
    post.is_partitioned = true;
    post.partitions["2024-01"] = {
        {"n1", 536'870'912, kNow, "2024-01"},
        {"n2", 536'870'912, kNow, "2024-01"},
        {"n3", 16'777'216, kNow, "2024-01"},
    };

    ObservationCache cache;
    cache.feedback(executed, {true, kNow + 60}, post, cfg);
    auto stats = cache.lookup(executed.candidate_id);
    REQUIRE(stats.has_value());
    CHECK(stats->small_file_count == 1);

    // Same stale snapshot, refreshed cache: nothing_to_do now drops it.
    PipelineResult replanned = run_pipeline(doc, cfg, kNow + 120, nullptr, &cache);
    bool dropped = false;
    for (const auto& d : replanned.dropped)
        if (d.candidate_id == executed.candidate_id && d.rule_name == "nothing_to_do")
            dropped = true;
    CHECK(dropped);
    for (const auto& task : replanned.plan.tasks)
        CHECK(task.candidate_id != executed.candidate_id);
}

TEST_CASE("explain covers selected, excluded and filtered candidates") {
    SnapshotDocument doc = fixture_snapshot();
    EngineConfig cfg = fixture_engine();
    PipelineResult res = run_pipeline(doc, cfg, kNow);

    SUBCASE("selected candidate's contributions sum to the printed score") {
        auto report = explain_candidate(res, cfg, "alpha.events");
        CHECK(report.at("status") == "selected");
        CHECK(report.at("rank") == 1);
        double sum = 0.0;
        for (const auto& entry : report.at("contributions"))
            sum += entry.at("contribution").get<double>();
        CHECK(std::abs(report.at("score").get<double>() - sum) <= 1e-9);
        std::string text = explain_to_text(report);
        CHECK(text.find("status: selected (rank 1)") != std::string::npos);
    }

    SUBCASE("filtered candidate names the dropping rule") {
        auto report = explain_candidate(res, cfg, "beta.fresh");
        CHECK(report.at("status") == "filtered_out");
        CHECK(report.at("filter").at("rule") == "recent_creation");
        std::string text = explain_to_text(report);
        CHECK(text.find("dropped by recent_creation") != std::string::npos);
    }

    SUBCASE("budget-excluded candidate reports the remaining budget") {
        auto report = explain_candidate(res, cfg, "alpha.logs");
        CHECK(report.at("status") == "excluded");
        CHECK(report.at("exclusion_reason") == "budget_exceeded");
        double cost_events = 8.0 * (1'090'519'040.0 / 200e9);
        CHECK(report.at("remaining_budget_gbhr").get<double>() ==
              doctest::Approx(0.05 - cost_events).epsilon(1e-9));
    }

    SUBCASE("unknown candidate raises") {
        CHECK_THROWS_AS(explain_candidate(res, cfg, "no.such"), UnknownCandidateError);
    }
}

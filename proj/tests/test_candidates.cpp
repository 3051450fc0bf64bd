#include <doctest.h>

#include <random>
#include <set>

#include "lakecomp/candidates.hpp"

using namespace lakecomp;

namespace {

constexpr std::int64_t kMiB = 1024 * 1024;

TableState make_table(const std::string& db, const std::string& name, bool partitioned,
                      int partitions, int files_per_partition, Timestamp created_at = 0) {
    TableState t;
    t.table_id = {db, name};
    t.created_at = created_at;
    t.last_write_at = created_at;
    t.is_partitioned = partitioned;
    int serial = 0;
    int n_parts = partitioned ? partitions : 1;
    for (int p = 0; p < n_parts; ++p) {
        std::string key = partitioned ? "p" + std::to_string(p) : kDefaultPartitionKey;
        auto& slot = t.partitions[key];
        for (int f = 0; f < files_per_partition; ++f) {
            FileRecord file;
            file.file_id = name + "_" + std::to_string(serial++);
            file.size_bytes = 10 * kMiB;
            file.created_at = created_at;
            file.partition_key = key;
            slot.push_back(std::move(file));
        }
    }
    return t;
}

SnapshotDocument make_snapshot(std::vector<TableState> tables) {
    SnapshotDocument doc;
    std::map<std::string, DatabaseState> dbs;
    for (auto& t : tables) {
        auto& db = dbs[t.table_id.database];
        db.database_id = t.table_id.database;
        db.total_quota = 1'000'000;
        db.tables.push_back(std::move(t));
    }
    for (auto& [id, db] : dbs) doc.databases.push_back(std::move(db));
    return doc;
}

}  // namespace

TEST_CASE("table-only strategy emits one candidate per table") {
    SnapshotDocument doc = make_snapshot({make_table("a", "t1", false, 0, 3),
                                          make_table("a", "t2", false, 0, 5)});
    EngineConfig cfg;
    auto candidates = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);
    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0].candidate_id == "a.t1");
    CHECK(candidates[1].candidate_id == "a.t2");
    CHECK(candidates[0].stats.file_count == 3);
    CHECK(candidates[1].stats.file_count == 5);
}

TEST_CASE("hybrid strategy: partitions for partitioned tables, table scope otherwise") {
    SnapshotDocument doc = make_snapshot({make_table("a", "part", true, 12, 2),
                                          make_table("a", "flat", false, 0, 4)});
    EngineConfig cfg;

    auto hybrid = generate_candidates(doc, ScopeStrategy::Hybrid, cfg);
    CHECK(hybrid.size() == 13);  // 12 partition scopes + 1 table scope
    int partition_scopes = 0;
    for (const auto& c : hybrid)
        if (c.scope.kind == ScopeKind::Partition) ++partition_scopes;
    CHECK(partition_scopes == 12);

    auto table_only = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);
    CHECK(table_only.size() == 2);
}

TEST_CASE("candidates partition the snapshot's files with no overlap") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 20; ++round) {
        std::vector<TableState> tables;
        int n_tables = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < n_tables; ++i) {
            bool partitioned = rng() % 2 == 0;
            tables.push_back(make_table("db" + std::to_string(rng() % 2), "t" + std::to_string(i),
                                        partitioned, 1 + static_cast<int>(rng() % 4),
                                        static_cast<int>(rng() % 4)));
        }
        SnapshotDocument doc = make_snapshot(std::move(tables));
        std::set<std::string> all_files;
        std::int64_t total = 0;
        for (const auto& db : doc.databases)
            for (const auto& t : db.tables)
                for (const auto& [key, files] : t.partitions)
                    for (const auto& f : files) {
                        all_files.insert(t.table_id.str() + "/" + f.file_id);
                        ++total;
                    }

        EngineConfig cfg;
        for (auto strategy : {ScopeStrategy::TableOnly, ScopeStrategy::Hybrid}) {
            auto candidates = generate_candidates(doc, strategy, cfg);
            std::set<std::string> seen;
            std::int64_t count = 0;
            for (const auto& c : candidates)
                for (const auto& f : c.files) {
                    CHECK(seen.insert(c.scope.table_id.str() + "/" + f.file_id).second);
                    ++count;
                }
            CHECK(count == total);
            CHECK(seen == all_files);
        }
    }
}

TEST_CASE("generation is deterministic") {
    SnapshotDocument doc = make_snapshot({make_table("a", "part", true, 5, 3),
                                          make_table("b", "flat", false, 0, 2)});
    EngineConfig cfg;
    auto first = generate_candidates(doc, ScopeStrategy::Hybrid, cfg);
    auto second = generate_candidates(doc, ScopeStrategy::Hybrid, cfg);
    CHECK(first == second);
}

TEST_CASE("recent_creation filter drops young tables") {
    Timestamp now = 1'700'000'000;
    SnapshotDocument doc =
        make_snapshot({make_table("a", "young", false, 0, 5, now - 600),
                       make_table("a", "old", false, 0, 5, now - 200'000)});
    EngineConfig cfg;  // min_table_age_seconds = 86400
    auto candidates = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);

    auto outcome = apply_filters(candidates, {recent_creation_rule()}, cfg, now);
    REQUIRE(outcome.kept.size() == 1);
    CHECK(outcome.kept[0].candidate_id == "a.old");
    REQUIRE(outcome.dropped.size() == 1);
    CHECK(outcome.dropped[0].candidate_id == "a.young");
    CHECK(outcome.dropped[0].rule_name == "recent_creation");
}

TEST_CASE("too_small filter drops candidates below the byte floor") {
    SnapshotDocument doc = make_snapshot({make_table("a", "t", false, 0, 2)});
    EngineConfig cfg;
    cfg.min_candidate_bytes = 100 * kMiB;  // candidate holds 20 MiB
    auto candidates = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);
    auto outcome = apply_filters(candidates, {too_small_rule()}, cfg, 1'700'000'000);
    CHECK(outcome.kept.empty());
    REQUIRE(outcome.dropped.size() == 1);
    CHECK(outcome.dropped[0].rule_name == "too_small");
}

TEST_CASE("empty rule list keeps everything") {
    SnapshotDocument doc = make_snapshot({make_table("a", "t", false, 0, 2)});
    EngineConfig cfg;
    auto candidates = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);
    auto outcome = apply_filters(candidates, {}, cfg, 0);
    CHECK(outcome.kept == candidates);
    CHECK(outcome.dropped.empty());
}

TEST_CASE("first failing rule wins and partition is exact") {
    Timestamp now = 1'700'000'000;
    SnapshotDocument doc = make_snapshot({make_table("a", "young", false, 0, 1, now - 60)});
    EngineConfig cfg;
    cfg.min_candidate_bytes = 1ll << 40;
    auto candidates = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);
    // Fails recent_creation, too_small and nothing_to_do; only the first
    // should be reported.
    auto outcome = apply_filters(candidates, default_filter_rules(cfg), cfg, now);
    REQUIRE(outcome.dropped.size() == 1);
    CHECK(outcome.dropped[0].rule_name == "recent_creation");
    CHECK(outcome.kept.size() + outcome.dropped.size() == candidates.size());
}

TEST_CASE("nothing_to_do drops candidates with at most one small file") {
    EngineConfig cfg;
    SnapshotDocument doc = make_snapshot({make_table("a", "t", false, 0, 1)});
    auto candidates = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);
    auto outcome = apply_filters(candidates, {nothing_to_do_rule()}, cfg, 0);
    CHECK(outcome.kept.empty());
    REQUIRE(outcome.dropped.size() == 1);
    CHECK(outcome.dropped[0].rule_name == "nothing_to_do");
}

TEST_CASE("filters never mutate candidates and preserve order") {
    SnapshotDocument doc = make_snapshot({make_table("a", "t1", false, 0, 4),
                                          make_table("a", "t2", false, 0, 4),
                                          make_table("a", "t3", false, 0, 4)});
    EngineConfig cfg;
    auto candidates = generate_candidates(doc, ScopeStrategy::TableOnly, cfg);
    auto before = candidates;
    auto outcome = apply_filters(candidates, default_filter_rules(cfg), cfg, 1'700'000'000);
    CHECK(candidates == before);
    CHECK(outcome.kept == candidates);  // all pass, order preserved
}

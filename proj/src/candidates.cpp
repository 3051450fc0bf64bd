#include "lakecomp/candidates.hpp"

#include <algorithm>

namespace lakecomp {

namespace {

CandidateStats stats_for(const std::vector<FileRecord>& files, const TableState& table,
                         const EngineConfig& config) {
    CandidateStats s;
    s.file_count = static_cast<std::int64_t>(files.size());
    for (const auto& f : files) {
        s.total_bytes += f.size_bytes;
        if (f.size_bytes < config.target_file_size_bytes) ++s.small_file_count;
    }
    s.created_at = table.created_at;
    s.last_write_at = table.last_write_at;
    return s;
}

}  // namespace

Candidate make_candidate(const CandidateScope& scope, const TableState& table,
                         const EngineConfig& config) {
    Candidate c;
    c.scope = scope;
    c.candidate_id = candidate_id_of(scope);
    if (scope.kind == ScopeKind::Table) {
        for (const auto& [key, files] : table.partitions)
            c.files.insert(c.files.end(), files.begin(), files.end());
    } else {
        auto it = table.partitions.find(scope.partition_key.value());
        if (it != table.partitions.end()) c.files = it->second;
    }
    c.stats = stats_for(c.files, table, config);
    return c;
}

std::vector<Candidate> generate_candidates(const SnapshotDocument& snapshot,
                                           ScopeStrategy strategy, const EngineConfig& config) {
    std::vector<Candidate> out;
    for (const auto& db : snapshot.databases) {
        for (const auto& table : db.tables) {
            bool partition_scoped =
                strategy == ScopeStrategy::Hybrid && table.is_partitioned;
            if (partition_scoped) {
                for (const auto& [key, files] : table.partitions) {
                    CandidateScope scope{ScopeKind::Partition, table.table_id, key};
                    out.push_back(make_candidate(scope, table, config));
                }
            } else {
                CandidateScope scope{ScopeKind::Table, table.table_id, std::nullopt};
                out.push_back(make_candidate(scope, table, config));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        return a.candidate_id < b.candidate_id;
    });
    return out;
}

FilterOutcome apply_filters(const std::vector<Candidate>& candidates,
                            const std::vector<FilterRule>& rules, const EngineConfig& config,
                            Timestamp now) {
    FilterOutcome outcome;
    for (const auto& c : candidates) {
        bool kept = true;
        for (const auto& rule : rules) {
            FilterDecision d = rule.predicate(c, config, now);
            if (!d.keep) {
                outcome.dropped.push_back({c.candidate_id, rule.name, d.reason});
                kept = false;
                break;
            }
        }
        if (kept) outcome.kept.push_back(c);
    }
    return outcome;
}

FilterRule recent_creation_rule() {
    return {"recent_creation",
            [](const Candidate& c, const EngineConfig& config, Timestamp now) {
                std::int64_t age = now - c.stats.created_at;
                if (age < config.min_table_age_seconds)
                    return FilterDecision::drop("table created " + std::to_string(age) +
                                                "s ago, minimum age " +
                                                std::to_string(config.min_table_age_seconds) + "s");
                return FilterDecision::pass();
            }};
}

FilterRule recent_write_rule() {
    return {"recent_write",
            [](const Candidate& c, const EngineConfig& config, Timestamp now) {
                std::int64_t idle = now - c.stats.last_write_at;
                if (idle < config.recent_write_window_seconds)
                    return FilterDecision::drop(
                        "written " + std::to_string(idle) + "s ago, quiet window " +
                        std::to_string(config.recent_write_window_seconds) + "s");
                return FilterDecision::pass();
            }};
}

FilterRule too_small_rule() {
    return {"too_small",
            [](const Candidate& c, const EngineConfig& config, Timestamp) {
                if (c.stats.total_bytes < config.min_candidate_bytes)
                    return FilterDecision::drop(
                        std::to_string(c.stats.total_bytes) + " bytes below minimum " +
                        std::to_string(config.min_candidate_bytes));
                return FilterDecision::pass();
            }};
}

FilterRule nothing_to_do_rule() {
    return {"nothing_to_do",
            [](const Candidate& c, const EngineConfig&, Timestamp) {
                if (c.stats.small_file_count <= 1)
                    return FilterDecision::drop("only " +
                                                std::to_string(c.stats.small_file_count) +
                                                " small file(s), compaction cannot reduce count");
                return FilterDecision::pass();
            }};
}

std::vector<FilterRule> default_filter_rules(const EngineConfig& config) {
    std::vector<FilterRule> rules;
    if (config.min_table_age_seconds > 0) rules.push_back(recent_creation_rule());
    if (config.recent_write_window_seconds > 0) rules.push_back(recent_write_rule());
    if (config.min_candidate_bytes > 0) rules.push_back(too_small_rule());
    rules.push_back(nothing_to_do_rule());
    return rules;
}

}  // namespace lakecomp

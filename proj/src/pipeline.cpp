#include "lakecomp/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "lakecomp/errors.hpp"

namespace lakecomp {

namespace {

using nlohmann::json;

std::string dump_number(double v) { return json(v).dump(); }

// Per-trait min-max normalization across the kept pool.
std::vector<TraitVector> normalize_pool(const std::vector<TraitVector>& raw,
                                        const TraitRegistry& registry) {
    std::vector<TraitVector> normalized(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) normalized[i].candidate_id = raw[i].candidate_id;
    for (const auto& def : registry.definitions()) {
        std::vector<std::pair<std::string, double>> column;
        column.reserve(raw.size());
        for (const auto& v : raw) column.emplace_back(v.candidate_id, v.at(def.name));
        auto scaled = normalize(column);
        for (std::size_t i = 0; i < scaled.size(); ++i)
            normalized[i].values[def.name] = scaled[i].second;
    }
    return normalized;
}

std::map<std::string, double> weights_for_candidate(const Candidate& candidate,
                                                    const RankingPolicy& policy,
                                                    const TraitRegistry& registry,
                                                    const SnapshotDocument& snapshot) {
    std::map<std::string, double> weights = policy.weights;
    if (!policy.quota_adaptive_w1) return weights;
    const DatabaseState* db = snapshot.find_database(candidate.scope.table_id.database);
    if (!db)
        throw UnknownTableError("candidate '" + candidate.candidate_id +
                                "' references unknown database '" +
                                candidate.scope.table_id.database + "'");
    double w1 = quota_weight(db->used_quota, db->total_quota);
    for (auto& [name, w] : weights)
        w = registry.direction_of(name) == TraitDirection::Benefit ? w1 : 1.0 - w1;
    return weights;
}

}  // namespace

PipelineResult run_pipeline(const SnapshotDocument& snapshot, const EngineConfig& config,
                            Timestamp now, const TraitRegistry* registry,
                            const ObservationCache* cache) {
    config.validate();
    TraitRegistry default_registry;
    if (!registry) {
        default_registry = default_trait_registry();
        registry = &default_registry;
    }
    RankingPolicy policy = ranking_policy_from(config);
    policy.validate(*registry);

    PipelineResult result;
    result.pool = generate_candidates(snapshot, config.scope_strategy, config);
    if (cache) {
        for (auto& candidate : result.pool) {
            if (auto stats = cache->lookup(candidate.candidate_id)) candidate.stats = *stats;
        }
    }

    FilterOutcome filtered =
        apply_filters(result.pool, default_filter_rules(config), config, now);
    result.dropped = std::move(filtered.dropped);
    result.kept = std::move(filtered.kept);

    result.raw_traits = compute_traits(result.kept, config, *registry);
    result.normalized_traits = normalize_pool(result.raw_traits, *registry);

    const bool has_cost_trait = registry->contains("compute_cost_gbhr");
    auto estimated_gbhr_of = [&](std::size_t i) {
        return has_cost_trait ? result.raw_traits[i].at("compute_cost_gbhr") : 0.0;
    };

    if (config.ranking_mode == RankingMode::MoopConstrained) {
        for (std::size_t i = 0; i < result.kept.size(); ++i) {
            const Candidate& c = result.kept[i];
            auto weights = weights_for_candidate(c, policy, *registry, snapshot);
            result.scored.push_back(score_candidate(c.candidate_id, c.scope, result.raw_traits[i],
                                                    result.normalized_traits[i], weights,
                                                    *registry, estimated_gbhr_of(i)));
        }
        result.plan = select_budgeted(result.scored, policy.budget_gbhr, policy.fixed_k, now);
    } else {
        std::vector<std::string> selected = select_threshold(result.raw_traits, policy.thresholds);
        result.plan.generated_at = now;
        for (std::size_t i = 0; i < result.kept.size(); ++i) {
            const Candidate& c = result.kept[i];
            bool is_selected =
                std::binary_search(selected.begin(), selected.end(), c.candidate_id);
            if (is_selected) {
                result.plan.tasks.push_back(
                    {c.candidate_id, c.scope, estimated_gbhr_of(i), 0.0, {}});
                result.plan.total_estimated_gbhr += estimated_gbhr_of(i);
            } else {
                result.plan.excluded.push_back({c.candidate_id, "below_threshold", std::nullopt});
            }
        }
        // kept is id-sorted already, so tasks and exclusions are too.
    }

    result.schedule = build_schedule(result.plan, config.max_parallel);
    return result;
}

json scope_to_json(const CandidateScope& scope) {
    json j;
    j["kind"] = scope.kind == ScopeKind::Table ? "table" : "partition";
    j["database"] = scope.table_id.database;
    j["table"] = scope.table_id.name;
    if (scope.kind == ScopeKind::Partition) j["partition_key"] = scope.partition_key.value();
    return j;
}

json plan_to_json(const CompactionPlan& plan) {
    json j;
    j["generated_at"] = plan.generated_at;
    j["total_estimated_gbhr"] = plan.total_estimated_gbhr;
    json tasks = json::array();
    for (const auto& task : plan.tasks) {
        json jt;
        jt["candidate_id"] = task.candidate_id;
        jt["scope"] = scope_to_json(task.scope);
        jt["estimated_gbhr"] = task.estimated_gbhr;
        jt["score"] = task.score;
        json rationale = json::array();
        for (const auto& entry : task.rationale) {
            json je;
            je["trait"] = entry.trait_name;
            je["raw"] = entry.raw_value;
            je["normalized"] = entry.normalized_value;
            je["weight"] = entry.weight;
            je["contribution"] = entry.contribution;
            rationale.push_back(std::move(je));
        }
        jt["rationale"] = std::move(rationale);
        tasks.push_back(std::move(jt));
    }
    j["tasks"] = std::move(tasks);
    json excluded = json::array();
    for (const auto& e : plan.excluded) {
        json je;
        je["candidate_id"] = e.candidate_id;
        je["reason"] = e.reason;
        if (e.remaining_budget_gbhr) je["remaining_budget_gbhr"] = *e.remaining_budget_gbhr;
        excluded.push_back(std::move(je));
    }
    j["excluded"] = std::move(excluded);
    return j;
}

json schedule_to_json(const DispatchSchedule& schedule) {
    json waves = json::array();
    for (const auto& wave : schedule.waves) {
        json ids = json::array();
        for (const auto& task : wave) ids.push_back(task.candidate_id);
        waves.push_back(std::move(ids));
    }
    json j;
    j["waves"] = std::move(waves);
    return j;
}

std::string to_canonical_string(const json& j) { return j.dump(2) + "\n"; }

json explain_candidate(const PipelineResult& result, const EngineConfig& config,
                       const std::string& candidate_id) {
    auto pool_it = std::find_if(result.pool.begin(), result.pool.end(),
                                [&](const Candidate& c) { return c.candidate_id == candidate_id; });
    if (pool_it == result.pool.end())
        throw UnknownCandidateError("unknown candidate '" + candidate_id + "'");

    json report;
    report["candidate_id"] = candidate_id;
    report["scope"] = scope_to_json(pool_it->scope);
    report["stats"] = {{"file_count", pool_it->stats.file_count},
                       {"total_bytes", pool_it->stats.total_bytes},
                       {"small_file_count", pool_it->stats.small_file_count}};

    for (const auto& d : result.dropped) {
        if (d.candidate_id != candidate_id) continue;
        report["filter"] = {{"passed", false}, {"rule", d.rule_name}, {"reason", d.reason}};
        report["status"] = "filtered_out";
        return report;
    }
    report["filter"] = {{"passed", true}};

    auto kept_index = [&]() -> std::size_t {
        for (std::size_t i = 0; i < result.kept.size(); ++i)
            if (result.kept[i].candidate_id == candidate_id) return i;
        throw UnknownCandidateError("candidate '" + candidate_id + "' missing from kept pool");
    }();

    json traits = json::object();
    for (const auto& [name, raw] : result.raw_traits[kept_index].values) {
        traits[name] = {{"raw", raw},
                        {"normalized", result.normalized_traits[kept_index].at(name)}};
    }
    report["traits"] = std::move(traits);

    if (config.ranking_mode == RankingMode::MoopConstrained) {
        const ScoredCandidate& sc = result.scored[kept_index];
        json contributions = json::array();
        for (const auto& entry : sc.rationale) {
            contributions.push_back({{"trait", entry.trait_name},
                                     {"raw", entry.raw_value},
                                     {"normalized", entry.normalized_value},
                                     {"weight", entry.weight},
                                     {"contribution", entry.contribution}});
        }
        report["contributions"] = std::move(contributions);
        report["score"] = sc.score;
    } else {
        json checks = json::array();
        for (const auto& [name, threshold] : config.thresholds) {
            double value = result.raw_traits[kept_index].at(name);
            checks.push_back({{"trait", name},
                              {"value", value},
                              {"threshold", threshold},
                              {"met", value >= threshold}});
        }
        report["threshold_checks"] = std::move(checks);
    }

    for (std::size_t rank = 0; rank < result.plan.tasks.size(); ++rank) {
        if (result.plan.tasks[rank].candidate_id == candidate_id) {
            report["status"] = "selected";
            report["rank"] = rank + 1;
            return report;
        }
    }
    for (const auto& e : result.plan.excluded) {
        if (e.candidate_id == candidate_id) {
            report["status"] = "excluded";
            report["exclusion_reason"] = e.reason;
            if (e.remaining_budget_gbhr)
                report["remaining_budget_gbhr"] = *e.remaining_budget_gbhr;
            return report;
        }
    }
    report["status"] = "not_ranked";
    return report;
}

std::string explain_to_text(const json& report) {
    std::ostringstream out;
    out << "candidate: " << report.at("candidate_id").get<std::string>() << "\n";
    const json& scope = report.at("scope");
    out << "scope: " << scope.at("kind").get<std::string>() << " "
        << scope.at("database").get<std::string>() << "." << scope.at("table").get<std::string>();
    if (scope.contains("partition_key"))
        out << "/" << scope.at("partition_key").get<std::string>();
    out << "\n";
    const json& stats = report.at("stats");
    out << "stats: files=" << stats.at("file_count") << " bytes=" << stats.at("total_bytes")
        << " small_files=" << stats.at("small_file_count") << "\n";

    const json& filter = report.at("filter");
    if (!filter.at("passed").get<bool>()) {
        out << "filter: dropped by " << filter.at("rule").get<std::string>() << " ("
            << filter.at("reason").get<std::string>() << ")\n";
        out << "status: filtered_out\n";
        return out.str();
    }
    out << "filter: passed\n";

    if (report.contains("traits")) {
        out << "traits:\n";
        for (const auto& [name, t] : report.at("traits").items()) {
            out << "  " << name << ": raw=" << dump_number(t.at("raw").get<double>())
                << " normalized=" << dump_number(t.at("normalized").get<double>()) << "\n";
        }
    }
    if (report.contains("contributions")) {
        out << "contributions:\n";
        for (const auto& entry : report.at("contributions")) {
            out << "  " << entry.at("trait").get<std::string>()
                << ": weight=" << dump_number(entry.at("weight").get<double>())
                << " normalized=" << dump_number(entry.at("normalized").get<double>())
                << " contribution=" << dump_number(entry.at("contribution").get<double>()) << "\n";
        }
        out << "score: " << dump_number(report.at("score").get<double>()) << "\n";
    }
    if (report.contains("threshold_checks")) {
        out << "threshold checks:\n";
        for (const auto& check : report.at("threshold_checks")) {
            out << "  " << check.at("trait").get<std::string>() << ": value="
                << dump_number(check.at("value").get<double>())
                << " threshold=" << dump_number(check.at("threshold").get<double>())
                << (check.at("met").get<bool>() ? " met" : " not met") << "\n";
        }
    }

    std::string status = report.at("status").get<std::string>();
    out << "status: " << status;
    if (status == "selected") out << " (rank " << report.at("rank").get<std::size_t>() << ")";
    if (status == "excluded") {
        out << ": " << report.at("exclusion_reason").get<std::string>();
        if (report.contains("remaining_budget_gbhr"))
            out << " (remaining budget "
                << dump_number(report.at("remaining_budget_gbhr").get<double>()) << " GBHr)";
    }
    out << "\n";
    return out.str();
}

}  // namespace lakecomp

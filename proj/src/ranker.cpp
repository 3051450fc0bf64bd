#include "lakecomp/ranker.hpp"

#include <algorithm>

#include "lakecomp/errors.hpp"

namespace lakecomp {

void RankingPolicy::validate(const TraitRegistry& registry) const {
    if (mode == RankingMode::MoopConstrained) {
        for (const auto& [name, w] : weights) {
            if (!registry.contains(name))
                throw MissingTraitError("weighted trait '" + name + "' is not registered");
        }
        if (quota_adaptive_w1) {
            int benefits = 0;
            int costs = 0;
            for (const auto& [name, w] : weights) {
                if (registry.direction_of(name) == TraitDirection::Benefit)
                    ++benefits;
                else
                    ++costs;
            }
            if (benefits != 1 || costs != 1)
                throw ConfigError(
                    "quota_adaptive_w1 requires exactly one benefit and one cost trait");
        }
    } else {
        for (const auto& [name, t] : thresholds) {
            if (!registry.contains(name))
                throw MissingTraitError("threshold trait '" + name + "' is not registered");
        }
    }
}

RankingPolicy ranking_policy_from(const EngineConfig& config) {
    RankingPolicy policy;
    policy.mode = config.ranking_mode;
    policy.thresholds = config.thresholds;
    policy.weights = config.weights;
    policy.quota_adaptive_w1 = config.quota_adaptive_w1;
    policy.budget_gbhr = config.budget_gbhr;
    policy.fixed_k = config.k;
    return policy;
}

std::vector<std::pair<std::string, double>> normalize(
    const std::vector<std::pair<std::string, double>>& raw_values) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(raw_values.size());
    if (raw_values.empty()) return out;

    double lo = raw_values.front().second;
    double hi = lo;
    for (const auto& [id, v] : raw_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span = hi - lo;
    for (const auto& [id, v] : raw_values) {
        out.emplace_back(id, span > 0.0 ? (v - lo) / span : 0.0);
    }
    return out;
}

double quota_weight(std::int64_t used_quota, std::int64_t total_quota) {
    double ratio = static_cast<double>(used_quota) / static_cast<double>(total_quota);
    ratio = std::min(ratio, 1.0);
    return 0.5 * (1.0 + ratio);
}

ScoredCandidate score_candidate(const std::string& candidate_id, const CandidateScope& scope,
                                const TraitVector& raw, const TraitVector& normalized,
                                const std::map<std::string, double>& weights,
                                const TraitRegistry& registry, double estimated_gbhr) {
    ScoredCandidate sc;
    sc.candidate_id = candidate_id;
    sc.scope = scope;
    sc.estimated_gbhr = estimated_gbhr;
    for (const auto& [name, weight] : weights) {
        RationaleEntry entry;
        entry.trait_name = name;
        entry.raw_value = raw.at(name);
        entry.normalized_value = normalized.at(name);
        entry.weight = weight;
        double sign = registry.direction_of(name) == TraitDirection::Benefit ? 1.0 : -1.0;
        entry.contribution = sign * weight * entry.normalized_value;
        sc.score += entry.contribution;
        sc.rationale.push_back(std::move(entry));
    }
    return sc;
}

std::vector<std::string> select_threshold(const std::vector<TraitVector>& raw_traits,
                                          const std::map<std::string, double>& thresholds) {
    std::vector<std::string> selected;
    for (const auto& v : raw_traits) {
        for (const auto& [name, threshold] : thresholds) {
            if (v.at(name) >= threshold) {
                selected.push_back(v.candidate_id);
                break;
            }
        }
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

CompactionPlan select_budgeted(std::vector<ScoredCandidate> ranked,
                               std::optional<double> budget_gbhr,
                               std::optional<std::int64_t> fixed_k, Timestamp generated_at) {
    std::sort(ranked.begin(), ranked.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.candidate_id < b.candidate_id;
    });

    CompactionPlan plan;
    plan.generated_at = generated_at;
    double remaining = budget_gbhr.value_or(0.0);
    for (auto& sc : ranked) {
        if (fixed_k && static_cast<std::int64_t>(plan.tasks.size()) >= *fixed_k) {
            plan.excluded.push_back({sc.candidate_id, "count_limit_reached", std::nullopt});
            continue;
        }
        if (budget_gbhr && sc.estimated_gbhr > remaining) {
            plan.excluded.push_back({sc.candidate_id, "budget_exceeded", remaining});
            continue;
        }
        if (budget_gbhr) remaining -= sc.estimated_gbhr;
        plan.total_estimated_gbhr += sc.estimated_gbhr;
        plan.tasks.push_back({sc.candidate_id, sc.scope, sc.estimated_gbhr, sc.score,
                              std::move(sc.rationale)});
    }
    return plan;
}

}  // namespace lakecomp

#pragma once
// Decide phase: min-max normalization over the candidate pool, weighted-sum
// scalarization into a single score, and selection under either a threshold
// regime (unconstrained) or a budget/count-constrained greedy regime.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lakecomp/traits.hpp"
#include "lakecomp/types.hpp"

namespace lakecomp {

struct RankingPolicy {
    RankingMode mode = RankingMode::MoopConstrained;
    std::map<std::string, double> thresholds;
    std::map<std::string, double> weights;
    bool quota_adaptive_w1 = false;
    std::optional<double> budget_gbhr;
    std::optional<std::int64_t> fixed_k;

    // Checks that every referenced trait is registered and, for the
    // quota-adaptive mode, that exactly one benefit and one cost trait are
    // weighted.
    void validate(const TraitRegistry& registry) const;
};

RankingPolicy ranking_policy_from(const EngineConfig& config);

// (raw - min) / (max - min), each result in [0, 1]. When max == min every
// value maps to 0 and the trait is non-discriminative for the run.
std::vector<std::pair<std::string, double>> normalize(
    const std::vector<std::pair<std::string, double>>& raw_values);

// Benefit weight from quota utilization: 0.5 * (1 + used/total), with the
// ratio clamped to 1 so a quota breach saturates at weight 1.0.
double quota_weight(std::int64_t used_quota, std::int64_t total_quota);

struct ScoredCandidate {
    std::string candidate_id;
    CandidateScope scope;
    double estimated_gbhr = 0.0;
    double score = 0.0;
    std::vector<RationaleEntry> rationale;
};

// Signed weighted sum over the given weights: benefit traits contribute
// +w * normalized, cost traits -w * normalized. Rationale records each term
// in trait-name order; the score is their sum.
ScoredCandidate score_candidate(const std::string& candidate_id, const CandidateScope& scope,
                                const TraitVector& raw, const TraitVector& normalized,
                                const std::map<std::string, double>& weights,
                                const TraitRegistry& registry, double estimated_gbhr);

// Every candidate with at least one raw trait value meeting or exceeding its
// configured threshold, ordered by candidate_id.
std::vector<std::string> select_threshold(const std::vector<TraitVector>& raw_traits,
                                          const std::map<std::string, double>& thresholds);

// Greedy first-fit-decreasing selection: scan by descending score (ties by
// ascending candidate_id); admit a candidate iff its cost fits the remaining
// budget and the count limit is not reached; keep scanning past misfits.
// Skipped candidates land in `excluded` with a reason.
CompactionPlan select_budgeted(std::vector<ScoredCandidate> ranked,
                               std::optional<double> budget_gbhr,
                               std::optional<std::int64_t> fixed_k, Timestamp generated_at);

}  // namespace lakecomp

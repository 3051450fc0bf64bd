#pragma once
// Trait computation. Traits are per-candidate characteristics produced by an
// extensible registry; each is evaluated independently of the others. Benefit
// traits favor compaction, cost traits count against it.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lakecomp/types.hpp"

namespace lakecomp {

enum class TraitDirection { Benefit, Cost };

struct TraitDefinition {
    std::string name;
    TraitDirection direction = TraitDirection::Benefit;
    // Must be pure; non-finite results are evaluation errors.
    std::function<double(const Candidate&, const EngineConfig&)> evaluator;
};

class TraitRegistry {
public:
    void register_trait(TraitDefinition def);
    bool contains(const std::string& name) const;
    TraitDirection direction_of(const std::string& name) const;  // throws MissingTraitError
    const std::vector<TraitDefinition>& definitions() const { return definitions_; }
    bool empty() const { return definitions_.empty(); }

private:
    std::vector<TraitDefinition> definitions_;
};

struct TraitVector {
    std::string candidate_id;
    std::map<std::string, double> values;

    double at(const std::string& trait_name) const;  // throws MissingTraitError
};

// Number of files the candidate would shed: files strictly below the target
// size each collapse into the packed output.
std::int64_t file_count_reduction(const Candidate& candidate,
                                  std::int64_t target_file_size_bytes);

// Same estimate but respecting partition boundaries: a partition with one or
// fewer small files contributes nothing, since compaction cannot merge
// across partitions.
std::int64_t file_count_reduction_partition_aware(const Candidate& candidate,
                                                  std::int64_t target_file_size_bytes);

// Memory-hours needed to rewrite the candidate:
// executor_memory_gb * total_bytes / rewrite_bytes_per_hour.
double compute_cost_gbhr(const Candidate& candidate, double executor_memory_gb,
                         double rewrite_bytes_per_hour);

// Mean squared shortfall of file sizes against the target, in [0, 1]:
// (1/N) * sum(max(0, target - size)^2 / target^2). Zero iff no file is
// strictly below the target; 1 when every file is empty.
double file_entropy(const Candidate& candidate, std::int64_t target_file_size_bytes);

// file_count_reduction / file_count, in [0, 1]; 0 for empty candidates.
double small_file_fraction(const Candidate& candidate, std::int64_t target_file_size_bytes);

// Built-in traits: file_count_reduction (benefit), compute_cost_gbhr (cost),
// file_entropy (benefit), small_file_fraction (benefit),
// file_count_reduction_partition_aware (benefit).
TraitRegistry default_trait_registry();

// One TraitVector per candidate, in input order. Throws TraitEvaluationError
// naming the trait and candidate if an evaluator yields a non-finite value.
std::vector<TraitVector> compute_traits(const std::vector<Candidate>& candidates,
                                        const EngineConfig& config,
                                        const TraitRegistry& registry);

}  // namespace lakecomp

#pragma once
// Candidate generation and filtering. A candidate is the file set of one
// table or one partition; the scope strategy decides which. Filters run
// between statistics extraction and trait computation and are ordered: a
// candidate is dropped by the first failing rule only.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lakecomp/snapshot.hpp"
#include "lakecomp/types.hpp"

namespace lakecomp {

struct FilterDecision {
    bool keep = true;
    std::string reason;  // set when dropped

    static FilterDecision pass() { return {true, {}}; }
    static FilterDecision drop(std::string why) { return {false, std::move(why)}; }
};

// Predicates must be pure and deterministic.
struct FilterRule {
    std::string name;
    std::function<FilterDecision(const Candidate&, const EngineConfig&, Timestamp now)> predicate;
};

struct DroppedCandidate {
    std::string candidate_id;
    std::string rule_name;
    std::string reason;

    friend bool operator==(const DroppedCandidate&, const DroppedCandidate&) = default;
};

struct FilterOutcome {
    std::vector<Candidate> kept;
    std::vector<DroppedCandidate> dropped;
};

// TableOnly: one table-scope candidate per table. Hybrid: one candidate per
// partition for partitioned tables, table scope otherwise, so scopes never
// overlap. Output sorted by candidate_id. Stats use the config's target file
// size for the small-file count.
std::vector<Candidate> generate_candidates(const SnapshotDocument& snapshot,
                                           ScopeStrategy strategy, const EngineConfig& config);

// Builds one candidate for an explicit scope against the given table state.
Candidate make_candidate(const CandidateScope& scope, const TableState& table,
                         const EngineConfig& config);

FilterOutcome apply_filters(const std::vector<Candidate>& candidates,
                            const std::vector<FilterRule>& rules, const EngineConfig& config,
                            Timestamp now);

// Built-in rules, individually constructible for custom chains.
FilterRule recent_creation_rule();
FilterRule recent_write_rule();
FilterRule too_small_rule();
FilterRule nothing_to_do_rule();

// The default chain: recent_creation and recent_write/too_small when their
// config windows are non-zero, then nothing_to_do.
std::vector<FilterRule> default_filter_rules(const EngineConfig& config);

}  // namespace lakecomp

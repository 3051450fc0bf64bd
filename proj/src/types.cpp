#include "lakecomp/types.hpp"

#include <cmath>

#include "lakecomp/errors.hpp"

namespace lakecomp {

std::int64_t TableState::file_count() const {
    std::int64_t n = 0;
    for (const auto& [key, files] : partitions) n += static_cast<std::int64_t>(files.size());
    return n;
}

std::int64_t TableState::total_bytes() const {
    std::int64_t n = 0;
    for (const auto& [key, files] : partitions)
        for (const auto& f : files) n += f.size_bytes;
    return n;
}

std::string candidate_id_of(const CandidateScope& scope) {
    std::string id = scope.table_id.str();
    if (scope.kind == ScopeKind::Partition) {
        id += "/" + scope.partition_key.value();
    }
    return id;
}

void EngineConfig::validate() const {
    if (target_file_size_bytes <= 0) throw ConfigError("target_file_size_bytes must be > 0");
    if (executor_memory_gb <= 0) throw ConfigError("executor_memory_gb must be > 0");
    if (rewrite_bytes_per_hour <= 0) throw ConfigError("rewrite_bytes_per_hour must be > 0");
    if (min_table_age_seconds < 0) throw ConfigError("min_table_age_seconds must be >= 0");
    if (recent_write_window_seconds < 0)
        throw ConfigError("recent_write_window_seconds must be >= 0");
    if (min_candidate_bytes < 0) throw ConfigError("min_candidate_bytes must be >= 0");
    if (max_parallel <= 0) throw ConfigError("max_parallel must be > 0");
    if (budget_gbhr && *budget_gbhr <= 0) throw ConfigError("budget_gbhr must be > 0");
    if (k && *k <= 0) throw ConfigError("k must be > 0");

    if (ranking_mode == RankingMode::MoopConstrained) {
        if (weights.empty()) throw ConfigError("moop mode requires at least one weight");
        double sum = 0.0;
        for (const auto& [name, w] : weights) {
            if (!std::isfinite(w) || w < 0)
                throw ConfigError("weight for trait '" + name + "' must be finite and >= 0");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ConfigError("weights must sum to 1 (got " + std::to_string(sum) + ")");
        if (!budget_gbhr && !k)
            throw ConfigError("constrained mode requires budget_gbhr or k");
        if (quota_adaptive_w1 && weights.size() != 2)
            throw ConfigError(
                "quota_adaptive_w1 requires exactly two weighted traits "
                "(one benefit, one cost)");
    } else {
        if (thresholds.empty()) throw ConfigError("threshold mode requires at least one threshold");
        for (const auto& [name, t] : thresholds) {
            if (!std::isfinite(t))
                throw ConfigError("threshold for trait '" + name + "' must be finite");
        }
    }
}

}  // namespace lakecomp

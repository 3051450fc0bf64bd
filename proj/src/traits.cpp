#include "lakecomp/traits.hpp"

#include <cmath>
#include <map>

#include "lakecomp/errors.hpp"

namespace lakecomp {

void TraitRegistry::register_trait(TraitDefinition def) {
    for (const auto& existing : definitions_) {
        if (existing.name == def.name)
            throw ConfigError("trait '" + def.name + "' registered twice");
    }
    definitions_.push_back(std::move(def));
}

bool TraitRegistry::contains(const std::string& name) const {
    for (const auto& def : definitions_)
        if (def.name == name) return true;
    return false;
}

TraitDirection TraitRegistry::direction_of(const std::string& name) const {
    for (const auto& def : definitions_)
        if (def.name == name) return def.direction;
    throw MissingTraitError("trait '" + name + "' is not registered");
}

double TraitVector::at(const std::string& trait_name) const {
    auto it = values.find(trait_name);
    if (it == values.end())
        throw MissingTraitError("trait '" + trait_name + "' missing for candidate '" +
                                candidate_id + "'");
    return it->second;
}

std::int64_t file_count_reduction(const Candidate& candidate,
                                  std::int64_t target_file_size_bytes) {
    std::int64_t n = 0;
    for (const auto& f : candidate.files)
        if (f.size_bytes < target_file_size_bytes) ++n;
    return n;
}

std::int64_t file_count_reduction_partition_aware(const Candidate& candidate,
                                                  std::int64_t target_file_size_bytes) {
    std::map<std::string, std::int64_t> small_per_partition;
    for (const auto& f : candidate.files)
        if (f.size_bytes < target_file_size_bytes) ++small_per_partition[f.partition_key];
    std::int64_t n = 0;
    for (const auto& [key, count] : small_per_partition)
        if (count > 1) n += count;
    return n;
}

double compute_cost_gbhr(const Candidate& candidate, double executor_memory_gb,
                         double rewrite_bytes_per_hour) {
    double total = static_cast<double>(candidate.stats.total_bytes);
    return executor_memory_gb * (total / rewrite_bytes_per_hour);
}

double file_entropy(const Candidate& candidate, std::int64_t target_file_size_bytes) {
    if (candidate.files.empty()) return 0.0;
    double target = static_cast<double>(target_file_size_bytes);
    double sum = 0.0;
    for (const auto& f : candidate.files) {
        double shortfall = target - static_cast<double>(f.size_bytes);
        if (shortfall > 0.0) sum += (shortfall * shortfall) / (target * target);
    }
    return sum / static_cast<double>(candidate.files.size());
}

double small_file_fraction(const Candidate& candidate, std::int64_t target_file_size_bytes) {
    if (candidate.files.empty()) return 0.0;
    return static_cast<double>(file_count_reduction(candidate, target_file_size_bytes)) /
           static_cast<double>(candidate.files.size());
}

TraitRegistry default_trait_registry() {
    TraitRegistry registry;
    registry.register_trait(
        {"file_count_reduction", TraitDirection::Benefit,
         [](const Candidate& c, const EngineConfig& cfg) {
             return static_cast<double>(file_count_reduction(c, cfg.target_file_size_bytes));
         }});
    registry.register_trait(
        {"compute_cost_gbhr", TraitDirection::Cost,
         [](const Candidate& c, const EngineConfig& cfg) {
             return compute_cost_gbhr(c, cfg.executor_memory_gb, cfg.rewrite_bytes_per_hour);
         }});
    registry.register_trait(
        {"file_entropy", TraitDirection::Benefit,
         [](const Candidate& c, const EngineConfig& cfg) {
             return file_entropy(c, cfg.target_file_size_bytes);
         }});
    registry.register_trait(
        {"small_file_fraction", TraitDirection::Benefit,
         [](const Candidate& c, const EngineConfig& cfg) {
             return small_file_fraction(c, cfg.target_file_size_bytes);
         }});
    registry.register_trait(
        {"file_count_reduction_partition_aware", TraitDirection::Benefit,
         [](const Candidate& c, const EngineConfig& cfg) {
             return static_cast<double>(
                 file_count_reduction_partition_aware(c, cfg.target_file_size_bytes));
         }});
    return registry;
}

std::vector<TraitVector> compute_traits(const std::vector<Candidate>& candidates,
                                        const EngineConfig& config,
                                        const TraitRegistry& registry) {
    if (registry.empty()) throw ConfigError("trait registry is empty");
    std::vector<TraitVector> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        TraitVector v;
        v.candidate_id = c.candidate_id;
        for (const auto& def : registry.definitions()) {
            double value = def.evaluator(c, config);
            if (!std::isfinite(value))
                throw TraitEvaluationError("trait '" + def.name + "' produced a non-finite value "
                                           "for candidate '" + c.candidate_id + "'");
            v.values[def.name] = value;
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace lakecomp

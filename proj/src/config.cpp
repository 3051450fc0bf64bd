#include "lakecomp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lakecomp/errors.hpp"

namespace lakecomp {

namespace {

using nlohmann::json;

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
}

void check_fields(const json& j, const std::set<std::string>& known, const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ParseError(path + "." + key, "unknown field");
    }
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& path,
                     std::int64_t fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) throw ParseError(path + "." + key, "expected an integer");
    return it->get<std::int64_t>();
}

double get_number(const json& j, const std::string& key, const std::string& path,
                  double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ParseError(path + "." + key, "expected a number");
    return it->get<double>();
}

bool get_bool(const json& j, const std::string& key, const std::string& path, bool fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) throw ParseError(path + "." + key, "expected a boolean");
    return it->get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& path,
                       const std::string& fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_string()) throw ParseError(path + "." + key, "expected a string");
    return it->get<std::string>();
}

std::map<std::string, double> get_number_map(const json& j, const std::string& key,
                                             const std::string& path,
                                             std::map<std::string, double> fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_object()) throw ParseError(path + "." + key, "expected an object of numbers");
    std::map<std::string, double> out;
    for (const auto& [name, value] : it->items()) {
        if (!value.is_number())
            throw ParseError(path + "." + key + "." + name, "expected a number");
        out[name] = value.get<double>();
    }
    return out;
}

}  // namespace

EngineConfig engine_config_from_json(const json& j, const std::string& path) {
    expect_object(j, path);
    check_fields(j,
                 {"target_file_size_bytes", "executor_memory_gb", "rewrite_bytes_per_hour",
                  "ranking_mode", "weights", "thresholds", "budget_gbhr", "k", "scope_strategy",
                  "min_table_age_seconds", "recent_write_window_seconds", "min_candidate_bytes",
                  "quota_adaptive_w1", "max_parallel"},
                 path);
    EngineConfig cfg;
    cfg.target_file_size_bytes =
        get_int(j, "target_file_size_bytes", path, cfg.target_file_size_bytes);
    cfg.executor_memory_gb = get_number(j, "executor_memory_gb", path, cfg.executor_memory_gb);
    cfg.rewrite_bytes_per_hour =
        get_number(j, "rewrite_bytes_per_hour", path, cfg.rewrite_bytes_per_hour);

    std::string mode = get_string(j, "ranking_mode", path, "moop");
    if (mode == "moop")
        cfg.ranking_mode = RankingMode::MoopConstrained;
    else if (mode == "threshold")
        cfg.ranking_mode = RankingMode::ThresholdUnconstrained;
    else
        throw ParseError(path + ".ranking_mode", "expected 'moop' or 'threshold'");

    cfg.weights = get_number_map(j, "weights", path, cfg.weights);
    cfg.thresholds = get_number_map(j, "thresholds", path, cfg.thresholds);

    if (j.contains("budget_gbhr") && !j.at("budget_gbhr").is_null())
        cfg.budget_gbhr = get_number(j, "budget_gbhr", path, 0.0);
    if (j.contains("k") && !j.at("k").is_null()) cfg.k = get_int(j, "k", path, 0);

    std::string strategy = get_string(j, "scope_strategy", path, "table_only");
    if (strategy == "table_only")
        cfg.scope_strategy = ScopeStrategy::TableOnly;
    else if (strategy == "hybrid")
        cfg.scope_strategy = ScopeStrategy::Hybrid;
    else
        throw ParseError(path + ".scope_strategy", "expected 'table_only' or 'hybrid'");

    cfg.min_table_age_seconds =
        get_int(j, "min_table_age_seconds", path, cfg.min_table_age_seconds);
    cfg.recent_write_window_seconds =
        get_int(j, "recent_write_window_seconds", path, cfg.recent_write_window_seconds);
    cfg.min_candidate_bytes = get_int(j, "min_candidate_bytes", path, cfg.min_candidate_bytes);
    cfg.quota_adaptive_w1 = get_bool(j, "quota_adaptive_w1", path, cfg.quota_adaptive_w1);
    cfg.max_parallel = get_int(j, "max_parallel", path, cfg.max_parallel);

    cfg.validate();
    return cfg;
}

TriggerMode trigger_mode_from_json(const json& j, const std::string& path) {
    expect_object(j, path);
    check_fields(j, {"kind", "interval_seconds", "debounce_seconds", "thresholds",
                     "blackout_windows"},
                 path);
    TriggerMode trigger;
    std::string kind = get_string(j, "kind", path, "periodic");
    if (kind == "periodic")
        trigger.kind = TriggerMode::Kind::Periodic;
    else if (kind == "post_write")
        trigger.kind = TriggerMode::Kind::PostWrite;
    else
        throw ParseError(path + ".kind", "expected 'periodic' or 'post_write'");

    trigger.interval_seconds = get_int(j, "interval_seconds", path, trigger.interval_seconds);
    trigger.debounce_seconds = get_int(j, "debounce_seconds", path, trigger.debounce_seconds);
    trigger.thresholds = get_number_map(j, "thresholds", path, trigger.thresholds);

    if (auto it = j.find("blackout_windows"); it != j.end()) {
        if (!it->is_array()) throw ParseError(path + ".blackout_windows", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& w = (*it)[i];
            std::string wpath = path + ".blackout_windows[" + std::to_string(i) + "]";
            expect_object(w, wpath);
            check_fields(w, {"start_second_of_day", "end_second_of_day"}, wpath);
            BlackoutWindow window;
            window.start_second_of_day = get_int(w, "start_second_of_day", wpath, 0);
            window.end_second_of_day = get_int(w, "end_second_of_day", wpath, 0);
            trigger.blackout_windows.push_back(window);
        }
    }
    trigger.validate();
    return trigger;
}

namespace {

PatternSpec pattern_from_json(const json& j, const std::string& path) {
    expect_object(j, path);
    check_fields(j,
                 {"kind", "base_rate", "amplitude", "period_seconds", "burst_seconds",
                  "spacing_seconds", "fire_times", "write_mix", "files_per_write",
                  "file_size_bytes"},
                 path);
    PatternSpec p;
    std::string kind = get_string(j, "kind", path, "sinusoidal");
    if (kind == "sinusoidal")
        p.kind = PatternSpec::Kind::Sinusoidal;
    else if (kind == "short_burst")
        p.kind = PatternSpec::Kind::ShortBurst;
    else if (kind == "large_burst")
        p.kind = PatternSpec::Kind::LargeBurst;
    else if (kind == "clocked")
        p.kind = PatternSpec::Kind::Clocked;
    else
        throw ParseError(path + ".kind",
                         "expected 'sinusoidal', 'short_burst', 'large_burst' or 'clocked'");

    p.base_rate = get_number(j, "base_rate", path, p.base_rate);
    p.amplitude = get_number(j, "amplitude", path, p.amplitude);
    p.period_seconds = get_int(j, "period_seconds", path, p.period_seconds);
    p.burst_seconds = get_int(j, "burst_seconds", path, p.burst_seconds);
    p.spacing_seconds = get_int(j, "spacing_seconds", path, p.spacing_seconds);
    if (auto it = j.find("fire_times"); it != j.end()) {
        if (!it->is_array()) throw ParseError(path + ".fire_times", "expected an array");
        for (const auto& v : *it) {
            if (!v.is_number_integer())
                throw ParseError(path + ".fire_times", "expected integers");
            p.fire_times.push_back(v.get<std::int64_t>());
        }
    }
    p.write_mix = get_number(j, "write_mix", path, p.write_mix);
    if (auto it = j.find("files_per_write"); it != j.end()) {
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
            !(*it)[1].is_number_integer())
            throw ParseError(path + ".files_per_write", "expected [min, max] integers");
        p.files_per_write_min = (*it)[0].get<std::int64_t>();
        p.files_per_write_max = (*it)[1].get<std::int64_t>();
    }
    if (auto it = j.find("file_size_bytes"); it != j.end()) {
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
            !(*it)[1].is_number_integer())
            throw ParseError(path + ".file_size_bytes", "expected [min, max] integers");
        p.file_size_min_bytes = (*it)[0].get<std::int64_t>();
        p.file_size_max_bytes = (*it)[1].get<std::int64_t>();
    }
    return p;
}

CompactionSetup compaction_from_json(const json& j, const std::string& path) {
    expect_object(j, path);
    check_fields(j, {"engine", "trigger"}, path);
    CompactionSetup setup;
    if (auto it = j.find("engine"); it != j.end())
        setup.engine = engine_config_from_json(*it, path + ".engine");
    if (auto it = j.find("trigger"); it != j.end())
        setup.trigger = trigger_mode_from_json(*it, path + ".trigger");
    return setup;
}

}  // namespace

SimConfig sim_config_from_json(const json& j, const std::string& path) {
    expect_object(j, path);
    check_fields(j,
                 {"seed", "duration_seconds", "metrics_interval_seconds", "database_count",
                  "start_epoch", "topology", "patterns", "compaction", "conflict", "execution",
                  "strategies"},
                 path);
    SimConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(get_int(j, "seed", path, 1));
    cfg.duration_seconds = get_int(j, "duration_seconds", path, cfg.duration_seconds);
    cfg.metrics_interval_seconds =
        get_int(j, "metrics_interval_seconds", path, cfg.metrics_interval_seconds);
    cfg.database_count = get_int(j, "database_count", path, cfg.database_count);
    cfg.start_epoch = get_int(j, "start_epoch", path, cfg.start_epoch);

    if (auto it = j.find("topology"); it != j.end()) {
        std::string tpath = path + ".topology";
        expect_object(*it, tpath);
        check_fields(*it,
                     {"partitioned_tables_per_database", "initial_partitions_per_table",
                      "initial_files_per_partition", "unpartitioned_tables_per_database",
                      "initial_files_per_unpartitioned_table", "partition_bucket_seconds",
                      "partitioned_write_weight", "unpartitioned_write_weight",
                      "total_quota_per_database", "initial_table_age_seconds"},
                     tpath);
        TopologySpec& t = cfg.topology;
        t.partitioned_tables_per_database =
            get_int(*it, "partitioned_tables_per_database", tpath,
                    t.partitioned_tables_per_database);
        t.initial_partitions_per_table =
            get_int(*it, "initial_partitions_per_table", tpath, t.initial_partitions_per_table);
        t.initial_files_per_partition =
            get_int(*it, "initial_files_per_partition", tpath, t.initial_files_per_partition);
        t.unpartitioned_tables_per_database =
            get_int(*it, "unpartitioned_tables_per_database", tpath,
                    t.unpartitioned_tables_per_database);
        t.initial_files_per_unpartitioned_table =
            get_int(*it, "initial_files_per_unpartitioned_table", tpath,
                    t.initial_files_per_unpartitioned_table);
        t.partition_bucket_seconds =
            get_int(*it, "partition_bucket_seconds", tpath, t.partition_bucket_seconds);
        t.partitioned_write_weight =
            get_number(*it, "partitioned_write_weight", tpath, t.partitioned_write_weight);
        t.unpartitioned_write_weight =
            get_number(*it, "unpartitioned_write_weight", tpath, t.unpartitioned_write_weight);
        t.total_quota_per_database =
            get_int(*it, "total_quota_per_database", tpath, t.total_quota_per_database);
        t.initial_table_age_seconds =
            get_int(*it, "initial_table_age_seconds", tpath, t.initial_table_age_seconds);
    }

    if (auto it = j.find("patterns"); it != j.end()) {
        if (!it->is_array()) throw ParseError(path + ".patterns", "expected an array");
        cfg.patterns.clear();
        for (std::size_t i = 0; i < it->size(); ++i)
            cfg.patterns.push_back(
                pattern_from_json((*it)[i], path + ".patterns[" + std::to_string(i) + "]"));
    } else {
        cfg.patterns.push_back(PatternSpec{});
    }

    if (auto it = j.find("compaction"); it != j.end() && !it->is_null())
        cfg.compaction = compaction_from_json(*it, path + ".compaction");

    if (auto it = j.find("conflict"); it != j.end()) {
        std::string cpath = path + ".conflict";
        expect_object(*it, cpath);
        check_fields(*it,
                     {"client_conflict_prob_per_overlap", "cluster_abort_on_overlap",
                      "client_retry_backoff_seconds"},
                     cpath);
        cfg.conflict.client_conflict_prob_per_overlap =
            get_number(*it, "client_conflict_prob_per_overlap", cpath,
                       cfg.conflict.client_conflict_prob_per_overlap);
        cfg.conflict.cluster_abort_on_overlap = get_bool(
            *it, "cluster_abort_on_overlap", cpath, cfg.conflict.cluster_abort_on_overlap);
        cfg.conflict.client_retry_backoff_seconds =
            get_int(*it, "client_retry_backoff_seconds", cpath,
                    cfg.conflict.client_retry_backoff_seconds);
    }

    if (auto it = j.find("execution"); it != j.end()) {
        std::string epath = path + ".execution";
        expect_object(*it, epath);
        check_fields(*it, {"rewrite_bytes_per_hour", "target_file_size_bytes"}, epath);
        cfg.execution.rewrite_bytes_per_hour = get_number(
            *it, "rewrite_bytes_per_hour", epath, cfg.execution.rewrite_bytes_per_hour);
        if (it->contains("target_file_size_bytes"))
            cfg.execution.target_file_size_bytes =
                get_int(*it, "target_file_size_bytes", epath, 0);
    }

    if (auto it = j.find("strategies"); it != j.end()) {
        if (!it->is_array()) throw ParseError(path + ".strategies", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& s = (*it)[i];
            std::string spath = path + ".strategies[" + std::to_string(i) + "]";
            expect_object(s, spath);
            check_fields(s, {"name", "compaction"}, spath);
            StrategySpec spec;
            spec.name = get_string(s, "name", spath, "");
            if (auto cit = s.find("compaction"); cit != s.end() && !cit->is_null())
                spec.compaction = compaction_from_json(*cit, spath + ".compaction");
            cfg.strategies.push_back(std::move(spec));
        }
    }

    cfg.validate();
    return cfg;
}

CliConfig parse_cli_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("<config>", e.what());
    }
    expect_object(root, "$");
    check_fields(root, {"engine", "trigger", "simulator"}, "$");

    CliConfig cfg;
    if (auto it = root.find("engine"); it != root.end())
        cfg.engine = engine_config_from_json(*it, "$.engine");
    else
        cfg.engine.validate();
    if (auto it = root.find("trigger"); it != root.end())
        cfg.trigger = trigger_mode_from_json(*it, "$.trigger");
    if (auto it = root.find("simulator"); it != root.end() && !it->is_null())
        cfg.simulator = sim_config_from_json(*it, "$.simulator");
    return cfg;
}

CliConfig load_cli_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_cli_config(buffer.str());
}

}  // namespace lakecomp

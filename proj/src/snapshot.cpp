#include "lakecomp/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lakecomp/errors.hpp"

namespace lakecomp {

namespace {

using nlohmann::json;

// Pull a field out of a JSON object, reporting the full path on failure.
const json& require_field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key, "missing required field");
    return *it;
}

std::int64_t require_int(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require_field(obj, key, path);
    if (!v.is_number_integer()) throw ParseError(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require_field(obj, key, path);
    if (!v.is_string()) throw ParseError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

bool require_bool(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require_field(obj, key, path);
    if (!v.is_boolean()) throw ParseError(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

void check_known_fields(const json& obj, const std::set<std::string>& known,
                        const std::string& path, const LoadOptions& options) {
    for (const auto& [key, value] : obj.items()) {
        if (known.count(key)) continue;
        if (!options.lenient) throw ParseError(path + "." + key, "unknown field");
        if (options.warnings)
            options.warnings->push_back("ignoring unknown field " + path + "." + key);
    }
}

FileRecord parse_file(const json& j, const std::string& partition_key, const std::string& path,
                      const LoadOptions& options) {
    check_known_fields(j, {"file_id", "size_bytes", "created_at"}, path, options);
    FileRecord f;
    f.file_id = require_string(j, "file_id", path);
    f.size_bytes = require_int(j, "size_bytes", path);
    f.created_at = require_int(j, "created_at", path);
    f.partition_key = partition_key;
    return f;
}

TableState parse_table(const json& j, const std::string& path, const LoadOptions& options) {
    check_known_fields(
        j, {"database", "name", "created_at", "last_write_at", "is_partitioned", "partitions"},
        path, options);
    TableState t;
    t.table_id.database = require_string(j, "database", path);
    t.table_id.name = require_string(j, "name", path);
    t.created_at = require_int(j, "created_at", path);
    t.last_write_at = require_int(j, "last_write_at", path);
    t.is_partitioned = require_bool(j, "is_partitioned", path);

    const json& parts = require_field(j, "partitions", path);
    if (!parts.is_object()) throw ParseError(path + ".partitions", "expected an object");
    for (const auto& [key, files] : parts.items()) {
        if (!files.is_array())
            throw ParseError(path + ".partitions." + key, "expected an array of files");
        auto& slot = t.partitions[key];
        for (std::size_t i = 0; i < files.size(); ++i) {
            std::string fpath = path + ".partitions." + key + "[" + std::to_string(i) + "]";
            slot.push_back(parse_file(files[i], key, fpath, options));
        }
    }
    return t;
}

DatabaseState parse_database(const json& j, const std::string& path, const LoadOptions& options) {
    check_known_fields(j, {"database_id", "used_quota", "total_quota", "tables"}, path, options);
    DatabaseState db;
    db.database_id = require_string(j, "database_id", path);
    db.used_quota = require_int(j, "used_quota", path);
    db.total_quota = require_int(j, "total_quota", path);

    const json& tables = require_field(j, "tables", path);
    if (!tables.is_array()) throw ParseError(path + ".tables", "expected an array");
    for (std::size_t i = 0; i < tables.size(); ++i) {
        db.tables.push_back(
            parse_table(tables[i], path + ".tables[" + std::to_string(i) + "]", options));
    }
    return db;
}

json file_to_json(const FileRecord& f) {
    json j;
    j["file_id"] = f.file_id;
    j["size_bytes"] = f.size_bytes;
    j["created_at"] = f.created_at;
    return j;
}

json table_to_json(const TableState& t) {
    json j;
    j["database"] = t.table_id.database;
    j["name"] = t.table_id.name;
    j["created_at"] = t.created_at;
    j["last_write_at"] = t.last_write_at;
    j["is_partitioned"] = t.is_partitioned;
    json parts = json::object();
    for (const auto& [key, files] : t.partitions) {
        json arr = json::array();
        for (const auto& f : files) arr.push_back(file_to_json(f));
        parts[key] = std::move(arr);
    }
    j["partitions"] = std::move(parts);
    return j;
}

}  // namespace

const TableState* SnapshotDocument::find_table(const TableId& id) const {
    for (const auto& db : databases) {
        if (db.database_id != id.database) continue;
        for (const auto& t : db.tables)
            if (t.table_id == id) return &t;
    }
    return nullptr;
}

const DatabaseState* SnapshotDocument::find_database(const std::string& database_id) const {
    for (const auto& db : databases)
        if (db.database_id == database_id) return &db;
    return nullptr;
}

SnapshotDocument parse_snapshot(const std::string& text, const LoadOptions& options) {
    std::istringstream in(text);
    return load_snapshot(in, options);
}

SnapshotDocument load_snapshot(std::istream& in, const LoadOptions& options) {
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("<document>", e.what());
    }
    if (!root.is_object()) throw ParseError("<document>", "top level must be an object");
    check_known_fields(root, {"format_version", "captured_at", "databases"}, "$", options);

    std::int64_t version = require_int(root, "format_version", "$");
    if (version != kSnapshotFormatVersion)
        throw UnsupportedVersionError("unsupported snapshot format_version " +
                                      std::to_string(version));

    SnapshotDocument doc;
    doc.format_version = static_cast<int>(version);
    doc.captured_at = require_int(root, "captured_at", "$");

    const json& dbs = require_field(root, "databases", "$");
    if (!dbs.is_array()) throw ParseError("$.databases", "expected an array");
    for (std::size_t i = 0; i < dbs.size(); ++i) {
        doc.databases.push_back(
            parse_database(dbs[i], "$.databases[" + std::to_string(i) + "]", options));
    }

    validate_snapshot(doc);
    canonicalize_snapshot(doc);
    return doc;
}

SnapshotDocument load_snapshot_file(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    return load_snapshot(in, options);
}

void validate_snapshot(const SnapshotDocument& doc) {
    if (doc.format_version != kSnapshotFormatVersion)
        throw UnsupportedVersionError("unsupported snapshot format_version " +
                                      std::to_string(doc.format_version));

    std::set<std::string> database_ids;
    std::set<std::string> table_ids;
    for (const auto& db : doc.databases) {
        if (db.database_id.empty()) throw ValidationError("database_id must be non-empty");
        if (db.database_id.find('.') != std::string::npos ||
            db.database_id.find('/') != std::string::npos)
            throw ValidationError("database_id '" + db.database_id +
                                  "' must not contain '.' or '/'");
        if (!database_ids.insert(db.database_id).second)
            throw ValidationError("duplicate database_id '" + db.database_id + "'");
        if (db.used_quota < 0)
            throw ValidationError("database '" + db.database_id + "': used_quota must be >= 0");
        if (db.total_quota <= 0)
            throw ValidationError("database '" + db.database_id + "': total_quota must be > 0");

        for (const auto& t : db.tables) {
            if (t.table_id.database != db.database_id)
                throw ValidationError("table '" + t.table_id.str() +
                                      "' listed under database '" + db.database_id + "'");
            if (t.table_id.name.empty())
                throw ValidationError("table name must be non-empty in database '" +
                                      db.database_id + "'");
            if (t.table_id.name.find('/') != std::string::npos)
                throw ValidationError("table name '" + t.table_id.name +
                                      "' must not contain '/'");
            if (!table_ids.insert(t.table_id.str()).second)
                throw ValidationError("duplicate table '" + t.table_id.str() + "'");

            if (!t.is_partitioned) {
                if (t.partitions.size() != 1 ||
                    t.partitions.begin()->first != kDefaultPartitionKey)
                    throw ValidationError("unpartitioned table '" + t.table_id.str() +
                                          "' must use the single partition key '" +
                                          kDefaultPartitionKey + "'");
            }

            std::set<std::string> file_ids;
            for (const auto& [key, files] : t.partitions) {
                if (key.empty())
                    throw ValidationError("table '" + t.table_id.str() +
                                          "': partition keys must be non-empty");
                if (t.is_partitioned && key == kDefaultPartitionKey)
                    throw ValidationError("partitioned table '" + t.table_id.str() +
                                          "' must not use the reserved key '" +
                                          kDefaultPartitionKey + "'");
                for (const auto& f : t.partitions.at(key)) {
                    if (f.file_id.empty())
                        throw ValidationError("table '" + t.table_id.str() +
                                              "': file_id must be non-empty");
                    if (f.size_bytes < 0)
                        throw ValidationError("file '" + f.file_id + "' in table '" +
                                              t.table_id.str() + "': size_bytes must be >= 0");
                    if (f.partition_key != key)
                        throw ValidationError("file '" + f.file_id + "' in table '" +
                                              t.table_id.str() +
                                              "': partition_key does not match its map key");
                    if (!file_ids.insert(f.file_id).second)
                        throw ValidationError("duplicate file_id '" + f.file_id +
                                              "' in table '" + t.table_id.str() + "'");
                }
            }
        }
    }
}

void canonicalize_snapshot(SnapshotDocument& doc) {
    std::sort(doc.databases.begin(), doc.databases.end(),
              [](const DatabaseState& a, const DatabaseState& b) {
                  return a.database_id < b.database_id;
              });
    for (auto& db : doc.databases) {
        std::sort(db.tables.begin(), db.tables.end(),
                  [](const TableState& a, const TableState& b) {
                      return a.table_id < b.table_id;
                  });
        for (auto& t : db.tables) {
            // std::map already keeps partitions sorted by key.
            for (auto& [key, files] : t.partitions) {
                std::sort(files.begin(), files.end(),
                          [](const FileRecord& a, const FileRecord& b) {
                              return a.file_id < b.file_id;
                          });
            }
        }
    }
}

std::string write_snapshot(const SnapshotDocument& doc) {
    SnapshotDocument canon = doc;
    canonicalize_snapshot(canon);

    json root;
    root["format_version"] = canon.format_version;
    root["captured_at"] = canon.captured_at;
    json dbs = json::array();
    for (const auto& db : canon.databases) {
        json jdb;
        jdb["database_id"] = db.database_id;
        jdb["used_quota"] = db.used_quota;
        jdb["total_quota"] = db.total_quota;
        json tables = json::array();
        for (const auto& t : db.tables) tables.push_back(table_to_json(t));
        jdb["tables"] = std::move(tables);
        dbs.push_back(std::move(jdb));
    }
    root["databases"] = std::move(dbs);
    return root.dump(2) + "\n";
}

void write_snapshot_file(const SnapshotDocument& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EngineError("cannot open '" + path + "' for writing");
    out << write_snapshot(doc);
}

}  // namespace lakecomp

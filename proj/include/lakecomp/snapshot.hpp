#pragma once
// Catalog-agnostic metadata snapshot ingestion. A snapshot is a single JSON
// document describing databases, tables and their data files; any real
// catalog connector only has to emit this format.
//
// Loading is strict by default: unknown fields are parse errors. Lenient mode
// downgrades unknown fields to warnings but never relaxes numeric invariants.
// Loaded documents are canonicalized in memory (databases sorted by id,
// tables by table id, files by file id) so serialization is order-independent
// of the input.

#include <iosfwd>
#include <string>
#include <vector>

#include "lakecomp/types.hpp"

namespace lakecomp {

constexpr int kSnapshotFormatVersion = 1;

struct SnapshotDocument {
    int format_version = kSnapshotFormatVersion;
    Timestamp captured_at = 0;
    std::vector<DatabaseState> databases;

    const TableState* find_table(const TableId& id) const;
    const DatabaseState* find_database(const std::string& database_id) const;

    friend bool operator==(const SnapshotDocument&, const SnapshotDocument&) = default;
};

struct LoadOptions {
    bool lenient = false;
    // Populated with one message per unknown field when lenient.
    std::vector<std::string>* warnings = nullptr;
};

// Throws ParseError (malformed syntax or schema, with a field locus),
// ValidationError (invariant violation) or UnsupportedVersionError.
SnapshotDocument load_snapshot(std::istream& in, const LoadOptions& options = {});
SnapshotDocument load_snapshot_file(const std::string& path, const LoadOptions& options = {});
SnapshotDocument parse_snapshot(const std::string& text, const LoadOptions& options = {});

// Canonical serialization: sorted keys, stable field order, sorted entity
// lists, 2-space indent, trailing newline. Equal documents produce identical
// bytes.
std::string write_snapshot(const SnapshotDocument& doc);
void write_snapshot_file(const SnapshotDocument& doc, const std::string& path);

// Validates every model invariant (sizes, quotas, uniqueness, partition-key
// consistency, id characters). Called by load_snapshot; exposed for documents
// built in memory.
void validate_snapshot(const SnapshotDocument& doc);

// Sorts databases, tables, partitions and files into canonical order.
void canonicalize_snapshot(SnapshotDocument& doc);

}  // namespace lakecomp

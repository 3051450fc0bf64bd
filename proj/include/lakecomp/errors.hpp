#pragma once
// Error taxonomy shared across the engine. All errors derive from EngineError
// so the CLI can map them onto exit codes in one place: input problems
// (parse/validation/config/unknown-entity) exit 1, anything else exits 2.

#include <stdexcept>
#include <string>

namespace lakecomp {

class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input syntax. `locus` points at the offending field or line.
class ParseError : public EngineError {
public:
    ParseError(const std::string& locus, const std::string& msg)
        : EngineError(locus + ": " + msg), locus_(locus) {}
    const std::string& locus() const { return locus_; }

private:
    std::string locus_;
};

// Structurally valid input that violates a model invariant.
class ValidationError : public EngineError {
public:
    using EngineError::EngineError;
};

class UnsupportedVersionError : public EngineError {
public:
    using EngineError::EngineError;
};

class ConfigError : public EngineError {
public:
    using EngineError::EngineError;
};

class MissingTraitError : public EngineError {
public:
    using EngineError::EngineError;
};

class TraitEvaluationError : public EngineError {
public:
    using EngineError::EngineError;
};

class UnknownTableError : public EngineError {
public:
    using EngineError::EngineError;
};

class UnknownCandidateError : public EngineError {
public:
    using EngineError::EngineError;
};

}  // namespace lakecomp

#pragma once

#include <stdexcept>
#include <string>

namespace sciencemap {

// Bad or inconsistent configuration (paths, flags, parameter ranges).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or contradictory input data.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A pipeline stage was invoked before its dependencies produced their
// artifacts, or a dependency artifact is stale.
struct StageDependencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedRow : DataError {
    MalformedRow(std::size_t line, const std::string& reason)
        : DataError("malformed row at line " + std::to_string(line) + ": " + reason),
          line(line), reason(reason) {}
    std::size_t line;
    std::string reason;
};

struct DuplicateId : DataError {
    explicit DuplicateId(const std::string& doc_id)
        : DataError("duplicate doc_id: " + doc_id), doc_id(doc_id) {}
    std::string doc_id;
};

struct UnknownSource : DataError {
    UnknownSource(const std::string& doc_id, const std::string& source_id)
        : DataError("document " + doc_id + " refers to undefined source " + source_id),
          doc_id(doc_id), source_id(source_id) {}
    std::string doc_id;
    std::string source_id;
};

struct CoreTermExcluded : DataError {
    explicit CoreTermExcluded(const std::string& term)
        : DataError("term core '" + term + "' does not meet the occurrence threshold"),
          term(term) {}
    std::string term;
};

struct ConflictingAlias : DataError {
    ConflictingAlias(const std::string& variant, const std::string& a, const std::string& b)
        : DataError("variant '" + variant + "' maps to both '" + a + "' and '" + b + "'"),
          variant(variant) {}
    std::string variant;
};

struct UnlabeledSource : DataError {
    explicit UnlabeledSource(const std::string& source_id)
        : DataError("source " + source_id + " appears in a band but carries no relatedness label"),
          source_id(source_id) {}
    std::string source_id;
};

struct NoBandQualifies : DataError {
    explicit NoBandQualifies(double min_avg_pp)
        : DataError("no band reaches average participation " + std::to_string(min_avg_pp)) {}
};

struct UnknownNode : DataError {
    explicit UnknownNode(const std::string& id)
        : DataError("node not on the base map: " + id), id(id) {}
    std::string id;
};

struct Degenerate : DataError {
    explicit Degenerate(std::size_t n)
        : DataError("layout needs at least 2 nodes, got " + std::to_string(n)) {}
};

struct EmptyCore : DataError {
    EmptyCore() : DataError("core set is empty") {}
};

struct MissingArtifact : StageDependencyError {
    MissingArtifact(const std::string& stage, const std::string& path)
        : StageDependencyError("stage '" + stage + "' requires missing artifact: " + path),
          stage(stage), path(path) {}
    std::string stage;
    std::string path;
};

struct StaleArtifact : StageDependencyError {
    StaleArtifact(const std::string& stage, const std::string& path)
        : StageDependencyError("stage '" + stage + "' depends on stale artifact: " + path +
                               " (an input changed since it was produced)"),
          stage(stage), path(path) {}
    std::string stage;
    std::string path;
};

} // namespace sciencemap

#pragma once

// Project knowledge base: syntactic metadata of every top-level class in a
// Java source tree, with a canonical JSON form used for prompts and RAG.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace oraclegen::kb {

struct Parameter {
    std::string name;
    std::string type;
    bool operator==(const Parameter&) const = default;
};

struct FieldMeta {
    std::string name;
    std::string type;
    std::string visibility;
    bool operator==(const FieldMeta&) const = default;
};

struct MethodMeta {
    std::string method_name;
    std::string signature;
    std::string return_type;
    std::string visibility;  // public | protected | private | package
    std::vector<Parameter> parameters;
    std::string comments;
    bool operator==(const MethodMeta&) const = default;
};

struct ClassMeta {
    std::string class_name;
    std::string file_path;  // project-relative, '/' separated
    std::string signature;
    std::optional<std::string> super_class;
    std::vector<std::string> interfaces;
    std::string package;
    std::vector<std::string> imports;
    std::vector<FieldMeta> fields;
    std::vector<MethodMeta> methods;

    const MethodMeta* find_method(std::string_view name) const;
    bool operator==(const ClassMeta&) const = default;
};

struct KnowledgeBase {
    std::string project_name;
    std::vector<ClassMeta> classes;

    const ClassMeta* find_class(std::string_view name) const;
    bool operator==(const KnowledgeBase&) const = default;
};

struct ParseOptions {
    std::string project_name;                     // defaults to the root directory name
    std::vector<std::filesystem::path> excluded;  // subtrees to skip (e.g. the tests dir)
    unsigned workers = 0;                         // 0 = hardware concurrency
};

struct ParseResult {
    KnowledgeBase kb;
    std::vector<std::string> warnings;
};

/// Metadata of all top-level types in one source file. Throws java::LexError
/// or java::SyntaxError on malformed input.
std::vector<ClassMeta> parse_source(std::string_view source, const std::string& relative_path);

/// Parses every *.java file below `root`. Unparsable files become warnings.
/// Classes are ordered by file path, then source order. Throws ConfigError
/// when `root` is not a directory.
ParseResult parse_project(const std::filesystem::path& root, const ParseOptions& options = {});

nlohmann::ordered_json to_json(const MethodMeta& m);
nlohmann::ordered_json to_json(const ClassMeta& c);
nlohmann::ordered_json to_json(const KnowledgeBase& kb);
nlohmann::ordered_json fields_to_json(const std::vector<FieldMeta>& fields);
nlohmann::ordered_json methods_to_json(const std::vector<MethodMeta>& methods);

/// Canonical document: 2-space indent, fixed key order, trailing newline.
std::string serialize_kb(const KnowledgeBase& kb);
/// Canonical 2-space rendering of any JSON value (no trailing newline).
std::string canonical(const nlohmann::ordered_json& j);

/// Throws ConfigError on a document that does not follow the schema.
KnowledgeBase parse_kb_json(std::string_view text);
KnowledgeBase load_kb(const std::filesystem::path& file);
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& file);

/// Length of a comment in Unicode code points.
std::size_t comment_length(std::string_view text);

/// Keeps the classes whose every method has comments of at least `min_chars`.
KnowledgeBase filter_commented(const KnowledgeBase& kb, std::size_t min_chars = 30);

}  // namespace oraclegen::kb

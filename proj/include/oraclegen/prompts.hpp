#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "oraclegen/kb.hpp"
#include "oraclegen/prefix.hpp"

namespace oraclegen::prompts {

enum class PromptVariant { SP, EP, RAG_GEN, RAG_SP };

/// Accepts the CLI names "sp", "ep", "rag", "rag-sp" (case-insensitive, "_" for "-",
/// "rag-gen" for "rag"). Throws ConfigError otherwise.
PromptVariant parse_variant(std::string_view name);
/// CLI name: sp | ep | rag | rag-sp.
std::string_view to_string(PromptVariant v) noexcept;
/// Template asset stem: sp | ep | rag_gen | rag_sp.
std::string_view template_name(PromptVariant v) noexcept;
bool uses_retrieval(PromptVariant v) noexcept;

struct PromptContext {
    std::string class_name;
    std::optional<std::string> fields_json;
    std::optional<std::string> focal_method_details;
    std::optional<std::string> class_method_details;  // EP only
    std::optional<std::string> developer_comments;
    std::string test_method_code;
    std::string assertion_placeholder;
    bool vector_store = false;  // RAG_SP: prompt is augmented with retrieved chunks
};

/// Throws FocalNotFound when prefix.focal does not resolve in kb.
PromptContext build_context(PromptVariant variant, const prefix::TestPrefix& prefix, const kb::KnowledgeBase& kb);

struct TemplateSet {
    std::string sp, ep, rag_gen, rag_sp;

    const std::string& get(PromptVariant v) const;

    static const TemplateSet& builtin();
    /// Reads <dir>/{sp,ep,rag_gen,rag_sp}.txt; CRLF is normalized to LF.
    static TemplateSet load(const std::filesystem::path& dir);
};

/// Substitutes every {{<slot>}} of the variant's template. Throws TemplateError
/// naming the slot when a value is missing, a required value is empty, or the
/// template uses an unknown slot.
std::string render(PromptVariant variant, const PromptContext& ctx,
                   const TemplateSet& templates = TemplateSet::builtin());

}  // namespace oraclegen::prompts

#include "oraclegen/prompts.hpp"

#include <algorithm>
#include <cctype>

#include "oraclegen/builtin_templates.hpp"
#include "oraclegen/error.hpp"
#include "oraclegen/util.hpp"

namespace oraclegen::prompts {

PromptVariant parse_variant(std::string_view name) {
    std::string n;
    for (char c : name) n += c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (n == "sp") return PromptVariant::SP;
    if (n == "ep") return PromptVariant::EP;
    if (n == "rag" || n == "rag-gen") return PromptVariant::RAG_GEN;
    if (n == "rag-sp" || n == "ragsp") return PromptVariant::RAG_SP;
    throw ConfigError("unknown variant '" + std::string(name) + "' (expected sp, ep, rag or rag-sp)");
}

std::string_view to_string(PromptVariant v) noexcept {
    switch (v) {
        case PromptVariant::SP: return "sp";
        case PromptVariant::EP: return "ep";
        case PromptVariant::RAG_GEN: return "rag";
        case PromptVariant::RAG_SP: return "rag-sp";
    }
    return "sp";
}

std::string_view template_name(PromptVariant v) noexcept {
    switch (v) {
        case PromptVariant::SP: return "sp";
        case PromptVariant::EP: return "ep";
        case PromptVariant::RAG_GEN: return "rag_gen";
        case PromptVariant::RAG_SP: return "rag_sp";
    }
    return "sp";
}

bool uses_retrieval(PromptVariant v) noexcept { return v == PromptVariant::RAG_GEN || v == PromptVariant::RAG_SP; }

PromptContext build_context(PromptVariant variant, const prefix::TestPrefix& prefix, const kb::KnowledgeBase& kb) {
    const kb::ClassMeta* cls = kb.find_class(prefix.focal.class_name);
    if (!cls) throw FocalNotFound(prefix.test_id + ": class " + prefix.focal.class_name + " not in knowledge base");

    PromptContext ctx;
    ctx.class_name = cls->class_name;
    ctx.test_method_code = prefix.method_text();
    ctx.assertion_placeholder = prefix.placeholder_token;
    if (variant == PromptVariant::RAG_GEN) return ctx;

    auto it = std::find_if(cls->methods.begin(), cls->methods.end(),
                           [&](const kb::MethodMeta& m) { return m.signature == prefix.focal.signature; });
    const kb::MethodMeta* focal = it != cls->methods.end() ? &*it : cls->find_method(prefix.focal.method_name);
    if (!focal) {
        throw FocalNotFound(prefix.test_id + ": method " + prefix.focal.method_name + " not in class " +
                            cls->class_name);
    }
    ctx.fields_json = kb::canonical(kb::fields_to_json(cls->fields));
    ctx.focal_method_details = kb::canonical(kb::to_json(*focal));
    ctx.developer_comments = focal->comments;
    if (variant == PromptVariant::EP) ctx.class_method_details = kb::canonical(kb::methods_to_json(cls->methods));
    ctx.vector_store = variant == PromptVariant::RAG_SP;
    return ctx;
}

const std::string& TemplateSet::get(PromptVariant v) const {
    switch (v) {
        case PromptVariant::SP: return sp;
        case PromptVariant::EP: return ep;
        case PromptVariant::RAG_GEN: return rag_gen;
        case PromptVariant::RAG_SP: return rag_sp;
    }
    return sp;
}

const TemplateSet& TemplateSet::builtin() {
    static const TemplateSet set{std::string(builtin::sp), std::string(builtin::ep), std::string(builtin::rag_gen),
                                 std::string(builtin::rag_sp)};
    return set;
}

namespace {

std::string normalize_newlines(std::string s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') continue;
        out += s[i];
    }
    return out;
}

// "{{" -> "{ {", "}}" -> "} }"
std::string separate_braces(std::string_view v) {
    std::string out;
    out.reserve(v.size());
    for (char c : v) {
        if ((c == '{' || c == '}') && !out.empty() && out.back() == c) out += ' ';
        out += c;
    }
    return out;
}

}  // namespace

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    auto read = [&](PromptVariant v) {
        return normalize_newlines(util::read_file(dir / (std::string(template_name(v)) + ".txt")));
    };
    return TemplateSet{read(PromptVariant::SP), read(PromptVariant::EP), read(PromptVariant::RAG_GEN),
                       read(PromptVariant::RAG_SP)};
}

std::string render(PromptVariant variant, const PromptContext& ctx, const TemplateSet& templates) {
    const std::string& tpl = templates.get(variant);

    auto value_of = [&](std::string_view slot) -> std::string {
        auto required = [&](const std::string& v) {
            if (v.empty()) throw TemplateError(std::string(slot), "required slot '" + std::string(slot) + "' is empty");
            return v;
        };
        auto optional = [&](const std::optional<std::string>& v) {
            if (!v) throw TemplateError(std::string(slot), "slot '" + std::string(slot) + "' has no value in this context");
            return *v;
        };
        if (slot == "class_name") return required(ctx.class_name);
        if (slot == "test_method_code") return required(ctx.test_method_code);
        if (slot == "assertion_placeholder") return required(ctx.assertion_placeholder);
        if (slot == "fields") return optional(ctx.fields_json);
        if (slot == "focal_method_details") return optional(ctx.focal_method_details);
        if (slot == "class_method_details") return optional(ctx.class_method_details);
        if (slot == "DEVELOPER COMMENTS") return optional(ctx.developer_comments);
        throw TemplateError(std::string(slot), "unknown template slot '" + std::string(slot) + "'");
    };

    std::string out;
    out.reserve(tpl.size() + 1024);
    std::size_t pos = 0;
    while (true) {
        std::size_t open = tpl.find("{{<", pos);
        if (open == std::string::npos) break;
        std::size_t close = tpl.find(">}}", open + 3);
        if (close == std::string::npos) throw TemplateError("", "unterminated template slot");
        out.append(tpl, pos, open - pos);
        out += separate_braces(value_of(std::string_view(tpl).substr(open + 3, close - open - 3)));
        pos = close + 3;
    }
    out.append(tpl, pos);
    if (out.find("{{") != std::string::npos || out.find("}}") != std::string::npos) {
        throw TemplateError("", "template text contains unresolved braces");
    }
    return out;
}

}  // namespace oraclegen::prompts

#include "oraclegen/kb.hpp"

#include <algorithm>

#include "oraclegen/error.hpp"
#include "oraclegen/java/parser.hpp"
#include "oraclegen/util.hpp"

namespace oraclegen::kb {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const MethodMeta* ClassMeta::find_method(std::string_view name) const {
    auto it = std::find_if(methods.begin(), methods.end(),
                           [&](const MethodMeta& m) { return m.method_name == name; });
    return it == methods.end() ? nullptr : &*it;
}

const ClassMeta* KnowledgeBase::find_class(std::string_view name) const {
    auto it = std::find_if(classes.begin(), classes.end(),
                           [&](const ClassMeta& c) { return c.class_name == name; });
    return it == classes.end() ? nullptr : &*it;
}

std::vector<ClassMeta> parse_source(std::string_view source, const std::string& relative_path) {
    java::CompilationUnit cu = java::parse_compilation_unit(source);
    std::vector<ClassMeta> out;
    for (auto& t : cu.types) {
        ClassMeta c;
        c.class_name = t.name;
        c.file_path = relative_path;
        c.signature = t.signature;
        c.super_class = t.super_class;
        c.interfaces = t.interfaces;
        c.package = cu.package;
        c.imports = cu.imports;
        for (auto& f : t.fields) c.fields.push_back(FieldMeta{f.name, f.type, f.visibility});
        for (auto& m : t.methods) {
            MethodMeta mm;
            mm.method_name = m.name;
            mm.signature = m.signature;
            mm.return_type = m.return_type;
            mm.visibility = m.visibility;
            for (auto& p : m.params) mm.parameters.push_back(Parameter{p.name, p.type});
            mm.comments = m.comment;
            c.methods.push_back(std::move(mm));
        }
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

bool is_excluded(const fs::path& p, const std::vector<fs::path>& excluded) {
    for (const auto& ex : excluded) {
        auto rel = p.lexically_relative(ex);
        if (!rel.empty() && *rel.begin() != "..") return true;
    }
    return false;
}

}  // namespace

ParseResult parse_project(const fs::path& root, const ParseOptions& options) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw ConfigError("project root is not a directory: " + root.string());

    fs::path canon_root = fs::weakly_canonical(root);
    std::vector<fs::path> excluded;
    for (const auto& e : options.excluded) excluded.push_back(fs::weakly_canonical(e));

    std::vector<std::string> files;  // relative, '/' separated
    for (auto it = fs::recursive_directory_iterator(canon_root); it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_directory() && is_excluded(it->path(), excluded)) {
            it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file() && it->path().extension() == ".java" && !is_excluded(it->path(), excluded)) {
            files.push_back(it->path().lexically_relative(canon_root).generic_string());
        }
    }
    std::sort(files.begin(), files.end());

    struct FileOutcome {
        std::vector<ClassMeta> classes;
        std::string warning;
    };
    std::vector<FileOutcome> outcomes(files.size());
    util::parallel_for(files.size(), options.workers, [&](std::size_t i) {
        try {
            std::string text = util::read_file(canon_root / files[i]);
            outcomes[i].classes = parse_source(text, files[i]);
        } catch (const std::exception& e) {
            outcomes[i].warning = files[i] + ": skipped, " + e.what();
        }
    });

    ParseResult result;
    result.kb.project_name =
        options.project_name.empty() ? canon_root.filename().string() : options.project_name;
    for (auto& o : outcomes) {
        if (!o.warning.empty()) result.warnings.push_back(std::move(o.warning));
        for (auto& c : o.classes) result.kb.classes.push_back(std::move(c));
    }
    if (result.kb.classes.empty()) result.warnings.push_back("no classes found under " + root.string());
    return result;
}

ordered_json to_json(const MethodMeta& m) {
    ordered_json params = ordered_json::array();
    for (const auto& p : m.parameters) params.push_back(ordered_json{{"name", p.name}, {"type", p.type}});
    return ordered_json{
        {"methodName", m.method_name}, {"signature", m.signature}, {"returnType", m.return_type},
        {"visibility", m.visibility},  {"parameters", params},     {"comments", m.comments},
    };
}

ordered_json fields_to_json(const std::vector<FieldMeta>& fields) {
    ordered_json out = ordered_json::array();
    for (const auto& f : fields) {
        out.push_back(ordered_json{{"name", f.name}, {"type", f.type}, {"visibility", f.visibility}});
    }
    return out;
}

ordered_json methods_to_json(const std::vector<MethodMeta>& methods) {
    ordered_json out = ordered_json::array();
    for (const auto& m : methods) out.push_back(to_json(m));
    return out;
}

ordered_json to_json(const ClassMeta& c) {
    ordered_json j;
    j["className"] = c.class_name;
    j["filePath"] = c.file_path;
    j["signature"] = c.signature;
    j["superClass"] = c.super_class ? ordered_json(*c.super_class) : ordered_json(nullptr);
    j["interfaces"] = c.interfaces;
    j["package"] = c.package;
    j["imports"] = c.imports;
    j["fields"] = fields_to_json(c.fields);
    j["methods"] = methods_to_json(c.methods);
    return j;
}

ordered_json to_json(const KnowledgeBase& kb) {
    ordered_json classes = ordered_json::array();
    for (const auto& c : kb.classes) classes.push_back(to_json(c));
    return ordered_json{{"projectName", kb.project_name}, {"classes", classes}};
}

std::string canonical(const ordered_json& j) { return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace); }

std::string serialize_kb(const KnowledgeBase& kb) { return canonical(to_json(kb)) + "\n"; }

namespace {

template <typename J>
const J& require(const J& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(std::string("knowledge base JSON: missing key '") + key + "'");
    return obj.at(key);
}

std::string str(const ordered_json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) throw ConfigError(std::string("knowledge base JSON: '") + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<std::string> str_list(const ordered_json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_array()) throw ConfigError(std::string("knowledge base JSON: '") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.get<std::string>());
    return out;
}

MethodMeta method_from_json(const ordered_json& j) {
    MethodMeta m;
    m.method_name = str(j, "methodName");
    m.signature = str(j, "signature");
    m.return_type = str(j, "returnType");
    m.visibility = str(j, "visibility");
    for (const auto& p : require(j, "parameters")) m.parameters.push_back(Parameter{str(p, "name"), str(p, "type")});
    m.comments = str(j, "comments");
    return m;
}

}  // namespace

KnowledgeBase parse_kb_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("knowledge base JSON: ") + e.what());
    }
    KnowledgeBase kb;
    try {
        kb.project_name = str(j, "projectName");
        for (const auto& cj : require(j, "classes")) {
            ClassMeta c;
            c.class_name = str(cj, "className");
            c.file_path = str(cj, "filePath");
            c.signature = str(cj, "signature");
            const auto& sc = require(cj, "superClass");
            if (!sc.is_null()) c.super_class = sc.get<std::string>();
            c.interfaces = str_list(cj, "interfaces");
            c.package = str(cj, "package");
            c.imports = str_list(cj, "imports");
            if (cj.contains("fields")) {
                for (const auto& f : cj.at("fields")) {
                    c.fields.push_back(FieldMeta{str(f, "name"), str(f, "type"), str(f, "visibility")});
                }
            }
            for (const auto& mj : require(cj, "methods")) c.methods.push_back(method_from_json(mj));
            kb.classes.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("knowledge base JSON: ") + e.what());
    }
    return kb;
}

KnowledgeBase load_kb(const fs::path& file) { return parse_kb_json(util::read_file(file)); }

void save_kb(const KnowledgeBase& kb, const fs::path& file) { util::write_file_atomic(file, serialize_kb(kb)); }

std::size_t comment_length(std::string_view text) {
    return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

KnowledgeBase filter_commented(const KnowledgeBase& kb, std::size_t min_chars) {
    KnowledgeBase out;
    out.project_name = kb.project_name;
    for (const auto& c : kb.classes) {
        bool all = std::all_of(c.methods.begin(), c.methods.end(),
                               [&](const MethodMeta& m) { return comment_length(m.comments) >= min_chars; });
        if (all) out.classes.push_back(c);
    }
    return out;
}

}  // namespace oraclegen::kb

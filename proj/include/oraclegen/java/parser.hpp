#pragma once

// Recursive-descent Java parser. Two entry points:
//  - parse_compilation_unit: declaration-level structure of a source file
//    (package, imports, top-level types and their members). Method bodies are
//    matched structurally and kept as spans, not parsed.
//  - parse_block_statements: statement-level structure of a method body, used
//    to locate and rewrite oracle statements in tests.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oraclegen/java/lexer.hpp"

namespace oraclegen::java {

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct ParamDecl {
    std::string name;
    std::string type;
};

struct FieldDecl {
    std::string name;
    std::string type;
    std::string visibility;
};

struct MethodDecl {
    std::string name;
    std::string signature;    // modifiers through throws clause, whitespace-collapsed
    std::string return_type;  // empty for constructors
    std::string visibility;   // public | protected | private | package
    std::vector<ParamDecl> params;
    std::vector<std::string> annotations;  // simple names, e.g. "Test"
    std::string comment;                   // attached comment, markers stripped
    bool is_constructor = false;
    std::optional<Span> body;  // text strictly between the braces
    Span decl;                 // first annotation/modifier through closing brace or ';'
    Span header;               // decl.begin up to (not including) the body brace
};

enum class TypeKind { Class, Interface, Enum, Record, Annotation };

struct TypeDecl {
    TypeKind kind = TypeKind::Class;
    std::string name;
    std::string signature;
    std::optional<std::string> super_class;
    std::vector<std::string> interfaces;
    std::vector<FieldDecl> fields;
    std::vector<MethodDecl> methods;
    Span decl;
};

struct CompilationUnit {
    std::string package;
    std::vector<std::string> imports;
    std::vector<TypeDecl> types;
};

/// Throws LexError or SyntaxError on malformed input.
CompilationUnit parse_compilation_unit(std::string_view source);

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
    Simple,     // expression, local variable, return, throw, assert, break, ...
    Block,      // { ... }
    Compound,   // if / for / while / do / synchronized / labeled
    Try,
    Opaque,     // switch, local class declarations: kept verbatim
    Empty,      // ;
};

struct Stmt;

/// A nested statement slot of a compound statement: a braced block, or a single
/// unbraced statement (then `children` holds exactly that statement).
struct Slot {
    bool braced = false;
    Span inner;                // for braced slots, text between the braces
    std::vector<Stmt> children;
};

struct CatchClause {
    Span header;  // "catch (...)"
    Slot body;
};

struct Stmt {
    StmtKind kind = StmtKind::Simple;
    Span span;                 // first token through last token (incl. ';' or '}')
    int line = 0;
    // For Compound: the slots in source order (if: then[, else]; loops: body).
    std::vector<Slot> slots;
    // For Try.
    std::optional<Span> resources;
    std::vector<CatchClause> catches;
    std::optional<Slot> finally_block;
    // For Simple statements that are a single method call `a.b.name(args);`.
    std::string call_name;
    std::string call_qualifier;  // "a.b" for the example above
};

/// Parses statements of a block body. `body` is the text between the braces;
/// spans in the result are offsets into `body`. Throws on unbalanced or
/// unterminated input.
std::vector<Stmt> parse_block_statements(std::string_view body);

}  // namespace oraclegen::java

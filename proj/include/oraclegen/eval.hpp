#pragma once

// Outcome classification, replication consistency and summary reports.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oraclegen/exec.hpp"
#include "oraclegen/prefix.hpp"

namespace oraclegen::eval {

enum class Verdict { TP, FP, TN, FN, Failure };
inline constexpr std::array<Verdict, 5> kVerdicts = {Verdict::TP, Verdict::FP, Verdict::TN, Verdict::FN,
                                                     Verdict::Failure};

std::string_view to_string(Verdict v) noexcept;
Verdict verdict_from_string(std::string_view s);

/// (Pass, Fail) TP, (Fail, Fail) FP, (Pass, Pass) TN, (Fail, Pass) FN; any
/// CompileError or RuntimeError is a Failure.
Verdict classify(exec::Status on_original, exec::Status on_mutant) noexcept;

/// Replications needed at a threshold: ceil(threshold% of replications).
std::size_t required_count(double threshold, std::size_t replications) noexcept;

/// Per-test verdict. `replications` is the configured count; missing
/// replications count as Failure. A class qualifies with at least
/// required_count() replications; equal qualifying counts are discordant.
Verdict aggregate(const std::vector<Verdict>& reps, double threshold, std::size_t replications);

struct TestRecord {
    std::string test_id;
    prefix::OracleKind oracle_kind = prefix::OracleKind::Assertion;
    std::vector<Verdict> replications;
};

struct ConsistencyReport {
    double threshold = 0.0;
    std::size_t tests = 0;
    std::size_t replications = 0;
    std::array<std::size_t, 5> counts{};   // indexed like kVerdicts
    std::array<double, 5> percent{};

    double pct(Verdict v) const { return percent[static_cast<std::size_t>(v)]; }
};

/// One report per threshold over the given tests. An empty population yields
/// zeros and a warning.
std::vector<ConsistencyReport> summarize(const std::vector<TestRecord>& tests, const std::vector<double>& thresholds,
                                         std::size_t replications, std::vector<std::string>* warnings = nullptr);

struct VariantSummary {
    std::string variant;
    std::vector<ConsistencyReport> assertion;  // assertion and no-oracle tests
    std::vector<ConsistencyReport> exception;  // expected-exception tests
};

/// Splits by oracle kind and summarizes each part.
VariantSummary summarize_variant(const std::string& variant, const std::vector<TestRecord>& tests,
                                 const std::vector<double>& thresholds, std::size_t replications,
                                 std::vector<std::string>* warnings = nullptr);

nlohmann::ordered_json to_json(const ConsistencyReport& r);
ConsistencyReport report_from_json(const nlohmann::json& j);

/// Markdown tables: rows are (threshold, variant), columns TP/FP/TN/FN/Failures %.
std::string render_markdown(const std::vector<VariantSummary>& variants);

/// "%.1f"
std::string format_percent(double v);

}  // namespace oraclegen::eval

#include "oraclegen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "oraclegen/error.hpp"

namespace oraclegen::eval {

using exec::Status;

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::TP: return "TP";
        case Verdict::FP: return "FP";
        case Verdict::TN: return "TN";
        case Verdict::FN: return "FN";
        case Verdict::Failure: return "Failure";
    }
    return "Failure";
}

Verdict verdict_from_string(std::string_view s) {
    for (auto v : kVerdicts) {
        if (to_string(v) == s) return v;
    }
    throw ConfigError("unknown verdict '" + std::string(s) + "'");
}

Verdict classify(Status on_original, Status on_mutant) noexcept {
    auto ran = [](Status s) { return s == Status::Pass || s == Status::Fail; };
    if (!ran(on_original) || !ran(on_mutant)) return Verdict::Failure;
    if (on_original == Status::Pass) return on_mutant == Status::Fail ? Verdict::TP : Verdict::TN;
    return on_mutant == Status::Fail ? Verdict::FP : Verdict::FN;
}

std::size_t required_count(double threshold, std::size_t replications) noexcept {
    double exact = threshold * static_cast<double>(replications) / 100.0;
    auto n = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    return std::max<std::size_t>(n, 1);
}

Verdict aggregate(const std::vector<Verdict>& reps, double threshold, std::size_t replications) {
    std::size_t total = std::max(replications, reps.size());
    if (total == 0) return Verdict::Failure;
    std::size_t need = required_count(threshold, total);
    std::array<std::size_t, 5> counts{};
    for (auto v : reps) ++counts[static_cast<std::size_t>(v)];

    Verdict best = Verdict::Failure;
    std::size_t best_count = 0;
    bool tie = false;
    for (auto v : {Verdict::TP, Verdict::FP, Verdict::TN, Verdict::FN}) {
        std::size_t c = counts[static_cast<std::size_t>(v)];
        if (c < need) continue;
        if (c > best_count) {
            best = v;
            best_count = c;
            tie = false;
        } else if (c == best_count) {
            tie = true;
        }
    }
    return tie ? Verdict::Failure : best;
}

std::vector<ConsistencyReport> summarize(const std::vector<TestRecord>& tests, const std::vector<double>& thresholds,
                                         std::size_t replications, std::vector<std::string>* warnings) {
    if (tests.empty() && warnings) warnings->push_back("empty test population: all percentages reported as 0");
    std::vector<ConsistencyReport> out;
    for (double t : thresholds) {
        ConsistencyReport r;
        r.threshold = t;
        r.tests = tests.size();
        r.replications = replications;
        for (const auto& test : tests) ++r.counts[static_cast<std::size_t>(aggregate(test.replications, t, replications))];
        if (!tests.empty()) {
            for (std::size_t i = 0; i < r.counts.size(); ++i) {
                r.percent[i] = 100.0 * static_cast<double>(r.counts[i]) / static_cast<double>(tests.size());
            }
        }
        out.push_back(r);
    }
    return out;
}

VariantSummary summarize_variant(const std::string& variant, const std::vector<TestRecord>& tests,
                                 const std::vector<double>& thresholds, std::size_t replications,
                                 std::vector<std::string>* warnings) {
    std::vector<TestRecord> assertion, exception;
    for (const auto& t : tests) (t.oracle_kind == prefix::OracleKind::Exception ? exception : assertion).push_back(t);
    VariantSummary s;
    s.variant = variant;
    s.assertion = summarize(assertion, thresholds, replications, warnings);
    s.exception = summarize(exception, thresholds, replications, nullptr);
    return s;
}

nlohmann::ordered_json to_json(const ConsistencyReport& r) {
    nlohmann::ordered_json counts, percent;
    for (std::size_t i = 0; i < kVerdicts.size(); ++i) {
        counts[std::string(to_string(kVerdicts[i]))] = r.counts[i];
        percent[std::string(to_string(kVerdicts[i]))] = r.percent[i];
    }
    return nlohmann::ordered_json{{"threshold", r.threshold},
                                  {"tests", r.tests},
                                  {"replications", r.replications},
                                  {"counts", counts},
                                  {"percent", percent}};
}

ConsistencyReport report_from_json(const nlohmann::json& j) {
    ConsistencyReport r;
    r.threshold = j.at("threshold").get<double>();
    r.tests = j.at("tests").get<std::size_t>();
    r.replications = j.at("replications").get<std::size_t>();
    for (std::size_t i = 0; i < kVerdicts.size(); ++i) {
        auto key = std::string(to_string(kVerdicts[i]));
        r.counts[i] = j.at("counts").at(key).get<std::size_t>();
        r.percent[i] = j.at("percent").at(key).get<double>();
    }
    return r;
}

std::string format_percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

namespace {

std::string format_threshold(double t) {
    char buf[32];
    if (std::floor(t) == t) std::snprintf(buf, sizeof buf, "%.0f%%", t);
    else std::snprintf(buf, sizeof buf, "%g%%", t);
    return buf;
}

void render_table(std::string& out, const std::vector<VariantSummary>& variants, bool exception) {
    out += "| Acceptance threshold | Variant | Tests | TP % | FP % | TN % | FN % | Failures % |\n";
    out += "|---|---|---:|---:|---:|---:|---:|---:|\n";
    std::map<double, std::vector<std::pair<std::string, const ConsistencyReport*>>> rows;
    for (const auto& v : variants) {
        for (const auto& r : exception ? v.exception : v.assertion) rows[r.threshold].emplace_back(v.variant, &r);
    }
    for (const auto& [threshold, entries] : rows) {
        bool first = true;
        for (const auto& [variant, r] : entries) {
            out += "| " + (first ? format_threshold(threshold) : std::string()) + " | " + variant + " | " +
                   std::to_string(r->tests);
            for (auto v : kVerdicts) out += " | " + format_percent(r->pct(v));
            out += " |\n";
            first = false;
        }
    }
}

}  // namespace

std::string render_markdown(const std::vector<VariantSummary>& variants) {
    std::string out = "# Oracle generation summary\n\n## Assertion oracles\n\n";
    render_table(out, variants, false);
    bool any_exception = std::any_of(variants.begin(), variants.end(), [](const VariantSummary& v) {
        return std::any_of(v.exception.begin(), v.exception.end(), [](const ConsistencyReport& r) { return r.tests > 0; });
    });
    if (any_exception) {
        out += "\n## Exception oracles\n\n";
        render_table(out, variants, true);
    }
    return out;
}

}  // namespace oraclegen::eval

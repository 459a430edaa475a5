#pragma once

#include "promo/commit.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace promo {

enum class CommitKind {
    feature,
    fix,
    chore,
    docs,
    test,
    ci,
    style,
    refactor,
    merge,
    revert,
    wip,
    dependency_bump,
    other,
};

const char* to_string(CommitKind kind);
std::optional<CommitKind> commit_kind_from_string(std::string_view name);

bool is_substantive(CommitKind kind);

struct CommitClass {
    CommitKind kind = CommitKind::other;
    bool substantive = true;

    bool operator==(const CommitClass&) const = default;
};

struct KeywordRule {
    std::string keyword; // case-insensitive substring of the summary
    CommitKind kind;
    bool anchored_start = false; // must match at the beginning of the summary
};

// Classification rule table. Prefix rules always take precedence over keyword
// rules so a substantive conventional type can never be suppressed by a
// keyword inside the summary.
struct FilterRules {
    std::vector<std::pair<std::string, CommitKind>> prefixes;
    std::vector<KeywordRule> keywords;

    static FilterRules defaults();
};

// Classification from the summary line alone (prefix rules, then keywords,
// then other). Total: an empty summary classifies as other.
CommitClass classify_summary(const std::string& summary,
                             const FilterRules& rules = FilterRules::defaults());

// Record-level classification. Identical to classify_summary except that a
// multi-parent commit whose summary carries no conventional prefix classifies
// as merge even when the summary does not start with "Merge".
CommitClass classify_commit(const CommitRecord& commit,
                            const FilterRules& rules = FilterRules::defaults());

struct FilterResult {
    std::vector<CommitRecord> kept;
    std::vector<std::pair<CommitRecord, CommitClass>> suppressed;
    double reduction_ratio = 0.0;
};

// Partitions the input, preserving relative order within each side.
FilterResult filter_substantive(const std::vector<CommitRecord>& commits,
                                const FilterRules& rules = FilterRules::defaults());

} // namespace promo

#include "promo/semantic_filter.hpp"

#include <algorithm>
#include <cctype>

namespace promo {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    return text;
}

// Extracts the conventional-commit type from "<type>:", "<type>(scope):" or
// the breaking-change spellings "<type>!:" / "<type>(scope)!:". Empty when the
// summary carries no prefix at all.
std::string parse_prefix_type(std::string_view summary) {
    std::size_t i = 0;
    while (i < summary.size() &&
           (std::isalnum(static_cast<unsigned char>(summary[i])) || summary[i] == '_' ||
            summary[i] == '-'))
        ++i;
    if (i == 0)
        return {};
    std::string type = lower(summary.substr(0, i));
    if (i < summary.size() && summary[i] == '(') {
        auto close = summary.find(')', i);
        if (close == std::string_view::npos)
            return {};
        i = close + 1;
    }
    if (i < summary.size() && summary[i] == '!')
        ++i;
    if (i < summary.size() && summary[i] == ':')
        return type;
    return {};
}

} // namespace

const char* to_string(CommitKind kind) {
    switch (kind) {
    case CommitKind::feature: return "feature";
    case CommitKind::fix: return "fix";
    case CommitKind::chore: return "chore";
    case CommitKind::docs: return "docs";
    case CommitKind::test: return "test";
    case CommitKind::ci: return "ci";
    case CommitKind::style: return "style";
    case CommitKind::refactor: return "refactor";
    case CommitKind::merge: return "merge";
    case CommitKind::revert: return "revert";
    case CommitKind::wip: return "wip";
    case CommitKind::dependency_bump: return "dependency_bump";
    case CommitKind::other: return "other";
    }
    return "other";
}

std::optional<CommitKind> commit_kind_from_string(std::string_view name) {
    static const std::pair<std::string_view, CommitKind> table[] = {
        {"feature", CommitKind::feature},
        {"fix", CommitKind::fix},
        {"chore", CommitKind::chore},
        {"docs", CommitKind::docs},
        {"test", CommitKind::test},
        {"ci", CommitKind::ci},
        {"style", CommitKind::style},
        {"refactor", CommitKind::refactor},
        {"merge", CommitKind::merge},
        {"revert", CommitKind::revert},
        {"wip", CommitKind::wip},
        {"dependency_bump", CommitKind::dependency_bump},
        {"other", CommitKind::other},
    };
    for (const auto& [text, kind] : table)
        if (text == name)
            return kind;
    return std::nullopt;
}

bool is_substantive(CommitKind kind) {
    return kind == CommitKind::feature || kind == CommitKind::fix || kind == CommitKind::other;
}

FilterRules FilterRules::defaults() {
    FilterRules rules;
    rules.prefixes = {
        {"feat", CommitKind::feature},   {"fix", CommitKind::fix},
        {"chore", CommitKind::chore},    {"docs", CommitKind::docs},
        {"test", CommitKind::test},      {"ci", CommitKind::ci},
        {"style", CommitKind::style},    {"refactor", CommitKind::refactor},
        {"revert", CommitKind::revert},  {"wip", CommitKind::wip},
    };
    rules.keywords = {
        {"bump", CommitKind::dependency_bump, false},
        {"dependency update", CommitKind::dependency_bump, false},
        {"merge", CommitKind::merge, true},
        {"revert", CommitKind::revert, false},
        {"work in progress", CommitKind::wip, false},
    };
    return rules;
}

CommitClass classify_summary(const std::string& summary, const FilterRules& rules) {
    const std::string_view trimmed = trim(summary);
    if (trimmed.empty())
        return {CommitKind::other, true};

    if (const std::string type = parse_prefix_type(trimmed); !type.empty()) {
        for (const auto& [prefix, kind] : rules.prefixes)
            if (lower(prefix) == type)
                return {kind, is_substantive(kind)};
        // Unrecognized prefix: keep, recall over precision.
        return {CommitKind::other, true};
    }

    const std::string haystack = lower(trimmed);
    for (const auto& rule : rules.keywords) {
        const std::string needle = lower(rule.keyword);
        if (rule.anchored_start ? haystack.rfind(needle, 0) == 0
                                : haystack.find(needle) != std::string::npos)
            return {rule.kind, is_substantive(rule.kind)};
    }
    return {CommitKind::other, true};
}

CommitClass classify_commit(const CommitRecord& commit, const FilterRules& rules) {
    CommitClass cls = classify_summary(commit.summary, rules);
    if (cls.kind == CommitKind::other && commit.parent_count > 1)
        return {CommitKind::merge, false};
    return cls;
}

FilterResult filter_substantive(const std::vector<CommitRecord>& commits,
                                const FilterRules& rules) {
    FilterResult result;
    for (const auto& commit : commits) {
        const CommitClass cls = classify_commit(commit, rules);
        if (cls.substantive)
            result.kept.push_back(commit);
        else
            result.suppressed.emplace_back(commit, cls);
    }
    result.reduction_ratio =
        static_cast<double>(result.suppressed.size()) /
        static_cast<double>(std::max<std::size_t>(1, commits.size()));
    return result;
}

} // namespace promo

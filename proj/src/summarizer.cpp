#include "promo/summarizer.hpp"

#include "promo/errors.hpp"
#include "promo/log.hpp"
#include "promo/semantic_filter.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace promo {

namespace {

std::string trim(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return {};
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::string strip_heading_decor(std::string text) {
    text = trim(text);
    if (text.size() > 4 && text.rfind("**", 0) == 0 && text.compare(text.size() - 2, 2, "**") == 0)
        text = trim(text.substr(2, text.size() - 4));
    if (!text.empty() && text.back() == ':')
        text.pop_back();
    return trim(text);
}

// Text of an ATX heading line, or of a line that is nothing but a bold span
// (models sometimes emit "**Heading**" instead of "## Heading").
std::string heading_text(const std::string& raw) {
    std::string line = trim(raw);
    if (!line.empty() && line.front() == '#') {
        size_t i = 0;
        while (i < line.size() && line[i] == '#')
            ++i;
        return strip_heading_decor(line.substr(i));
    }
    if (line.size() > 4 && line.rfind("**", 0) == 0 && line.compare(line.size() - 2, 2, "**") == 0)
        return strip_heading_decor(line);
    return {};
}

bool heading_matches(const std::string& line, const char* wanted) {
    const std::string text = heading_text(line);
    return !text.empty() && lowercase(text) == lowercase(wanted);
}

bool is_any_heading(const std::string& line) {
    const std::string t = trim(line);
    if (!t.empty() && t.front() == '#')
        return true;
    // bold-only lines count as section boundaries only when they are one of
    // the known headings; arbitrary bold text is ordinary prose
    return heading_matches(line, kFeaturesHeading) || heading_matches(line, kFixesHeading);
}

std::string extract_first_url(const std::string& text) {
    size_t pos = text.find("http://");
    const size_t pos_s = text.find("https://");
    if (pos == std::string::npos || (pos_s != std::string::npos && pos_s < pos))
        pos = pos_s;
    if (pos == std::string::npos)
        return {};
    size_t end = pos;
    static const std::string stop = " \t)\"'<>]";
    while (end < text.size() && stop.find(text[end]) == std::string::npos)
        ++end;
    std::string url = text.substr(pos, end - pos);
    while (!url.empty() && std::string(".,;:!?").find(url.back()) != std::string::npos)
        url.pop_back();
    return url;
}

bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Unique prefix match of an abbreviated or full hash against the commit list.
std::optional<std::string> match_hash_token(const std::string& token,
                                            const std::vector<CommitRecord>& commits) {
    if (token.size() < 7 || token.size() > 40)
        return std::nullopt;
    const std::string want = lowercase(token);
    if (!std::all_of(want.begin(), want.end(), [](char c) { return is_hex(c); }))
        return std::nullopt;
    const std::string* found = nullptr;
    for (const auto& commit : commits) {
        if (commit.hash.rfind(want, 0) == 0) {
            if (found && *found != commit.hash)
                return std::nullopt; // ambiguous abbreviation
            found = &commit.hash;
        }
    }
    if (found)
        return *found;
    return std::nullopt;
}

std::optional<std::string> match_url(const std::string& url,
                                     const std::vector<CommitRecord>& commits) {
    std::string path = url.substr(0, url.find_first_of("?#"));
    while (!path.empty() && path.back() == '/')
        path.pop_back();
    const size_t slash = path.find_last_of('/');
    const std::string segment = slash == std::string::npos ? path : path.substr(slash + 1);
    return match_hash_token(segment, commits);
}

std::optional<std::string> match_text(const std::string& text,
                                      const std::vector<CommitRecord>& commits) {
    size_t i = 0;
    while (i < text.size()) {
        if (!is_hex(text[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && is_hex(text[j]))
            ++j;
        if (auto hash = match_hash_token(text.substr(i, j - i), commits))
            return hash;
        i = j;
    }
    return std::nullopt;
}

std::optional<std::string> match_item(const SummaryItem& item,
                                      const std::vector<CommitRecord>& commits) {
    if (!item.commit_url.empty())
        return match_url(item.commit_url, commits);
    return match_text(item.text, commits);
}

std::string indent_block(const std::string& text, int spaces) {
    const std::string pad(static_cast<size_t>(spaces), ' ');
    std::string out;
    for (const auto& line : split_lines(text)) {
        if (!line.empty())
            out += pad + line;
        out += '\n';
    }
    if (out.empty())
        out = "\n";
    return out;
}

std::string count_noun(size_t n, const std::string& singular, const std::string& plural) {
    return std::to_string(n) + " " + (n == 1 ? singular : plural);
}

} // namespace

std::string build_system_prompt(const ReportContext& context) {
    std::ostringstream out;
    out << "You are a professional DevOps engineer creating a promotion report for a "
        << context.promotion_type << " promotion dated " << context.date << ".\n"
        << "\n"
        << "Write a Markdown report with exactly this structure:\n"
        << "\n"
        << "1. An executive summary of 2-3 paragraphs describing the most significant changes"
           " and their business impact.\n"
        << "2. A section headed \"" << kFeaturesHeading
        << "\" with one bullet point per feature commit.\n"
        << "3. A section headed \"" << kFixesHeading
        << "\" with one bullet point per bug-fix commit.\n"
        << "\n"
        << "Consistency requirements:\n"
        << "- ALWAYS include ALL feat() and fix() commits from the input, each in its proper"
           " section.\n"
        << "- Every bullet point must end with a Markdown link to the commit's URL.\n"
        << "- Produce the same categorization for the same input on every invocation.\n"
        << "- Never invent commits, URLs, or changes that are not in the input.\n";
    return out.str();
}

std::vector<CommitRecord> commits_for_prompt(const std::vector<CommitRecord>& commits) {
    if (commits.size() <= kPromptCommitCap)
        return commits;
    return {commits.begin(), commits.begin() + static_cast<long>(kPromptCommitCap)};
}

PromptPair build_user_prompt(const std::vector<CommitRecord>& commits) {
    PromptPair pair;
    const std::vector<CommitRecord> included = commits_for_prompt(commits);
    pair.commit_count_included = included.size();
    pair.truncated = commits.size() > kPromptCommitCap;

    if (included.empty()) {
        pair.user_prompt = "No substantive commits were promoted in this range.\n";
        return pair;
    }

    std::ostringstream out;
    out << "Summarize the following promoted commits for the report.\n\n";
    out << "Commits included: " << included.size() << " (newest first).";
    if (pair.truncated)
        out << " Input truncated: the " << commits.size() - included.size() << " oldest of "
            << commits.size() << " commits were omitted.";
    out << "\n";
    for (size_t i = 0; i < included.size(); ++i) {
        const CommitRecord& c = included[i];
        out << "\nCommit " << i + 1 << " of " << included.size() << ":\n";
        out << "  Hash: " << c.hash << "\n";
        out << "  Summary: " << c.summary << "\n";
        out << "  Author: " << c.author_name << " <" << c.author_email << ">\n";
        out << "  Date: " << c.date << "\n";
        out << "  URL: " << (c.url.empty() ? "(none)" : c.url) << "\n";
        out << "  Files changed: " << c.changed_files.size() << "\n";
        out << "  Diff: +" << c.diffstat.insertions << " -" << c.diffstat.deletions << "\n";
        out << "  Message:\n" << indent_block(c.body, 4);
    }
    pair.user_prompt = out.str();
    return pair;
}

PromptPair build_prompts(const ReportContext& context, const std::vector<CommitRecord>& commits) {
    PromptPair pair = build_user_prompt(commits);
    pair.system_prompt = build_system_prompt(context);
    return pair;
}

std::string DeterministicBackend::complete(const std::string&, const std::string& user_prompt,
                                           const GenerationSettings&) {
    struct Block {
        std::string hash;
        std::string summary;
        std::string url;
    };
    std::vector<Block> blocks;
    for (const auto& line : split_lines(user_prompt)) {
        if (line.rfind("  Hash: ", 0) == 0) {
            blocks.push_back({line.substr(8), {}, {}});
        } else if (line.rfind("  Summary: ", 0) == 0 && !blocks.empty()) {
            blocks.back().summary = line.substr(11);
        } else if (line.rfind("  URL: ", 0) == 0 && !blocks.empty()) {
            std::string url = line.substr(7);
            if (url != "(none)")
                blocks.back().url = url;
        }
    }

    std::vector<const Block*> features;
    std::vector<const Block*> fixes;
    std::vector<const Block*> others;
    for (const auto& block : blocks) {
        switch (classify_summary(block.summary).kind) {
        case CommitKind::feature: features.push_back(&block); break;
        case CommitKind::fix: fixes.push_back(&block); break;
        default: others.push_back(&block); break;
        }
    }

    auto bullet = [](const Block& b) {
        std::string line = "- " + b.summary;
        if (!b.url.empty()) {
            std::string label = b.hash.size() >= 7 ? b.hash.substr(0, 7) : std::string("commit");
            line += " ([" + label + "](" + b.url + "))";
        } else if (!b.hash.empty()) {
            line += " (" + b.hash.substr(0, std::min<size_t>(b.hash.size(), 12)) + ")";
        }
        return line + "\n";
    };

    std::ostringstream out;
    out << "## Executive Summary\n\n";
    if (blocks.empty()) {
        out << "No substantive changes were promoted in this range.\n";
    } else {
        out << "This promotion carries " << count_noun(blocks.size(), "substantive commit", "substantive commits")
            << ": " << count_noun(features.size(), "new feature", "new features") << ", "
            << count_noun(fixes.size(), "bug fix", "bug fixes") << ", and "
            << count_noun(others.size(), "other change", "other changes") << ".\n\n";
        if (features.size() >= fixes.size() && !features.empty())
            out << "Feature work leads this range; review the sections below for the full"
                   " commit-by-commit breakdown with links.\n";
        else if (!fixes.empty())
            out << "Bug-fix work leads this range; review the sections below for the full"
                   " commit-by-commit breakdown with links.\n";
        else
            out << "All changes in this range fall outside the feature and fix categories;"
                   " see Other Changes below.\n";
    }

    out << "\n## " << kFeaturesHeading << "\n\n";
    if (features.empty())
        out << "None in this range.\n";
    for (const Block* b : features)
        out << bullet(*b);

    out << "\n## " << kFixesHeading << "\n\n";
    if (fixes.empty())
        out << "None in this range.\n";
    for (const Block* b : fixes)
        out << bullet(*b);

    if (!others.empty()) {
        out << "\n## Other Changes\n\n";
        for (const Block* b : others)
            out << bullet(*b);
    }
    return out.str();
}

StructuredSummary parse_summary_markdown(const std::string& markdown) {
    StructuredSummary summary;
    summary.raw_markdown = markdown;

    const std::vector<std::string> lines = split_lines(markdown);
    size_t features_at = lines.size();
    size_t fixes_at = lines.size();
    for (size_t i = 0; i < lines.size(); ++i) {
        if (features_at == lines.size() && heading_matches(lines[i], kFeaturesHeading))
            features_at = i;
        if (fixes_at == lines.size() && heading_matches(lines[i], kFixesHeading))
            fixes_at = i;
    }
    summary.sections_found = features_at < lines.size() && fixes_at < lines.size();

    const size_t first_section = std::min(features_at, fixes_at);
    {
        std::string exec;
        bool seen_text = false;
        for (size_t i = 0; i < first_section; ++i) {
            // drop a leading heading line such as "## Executive Summary"
            if (!seen_text && !heading_text(lines[i]).empty())
                continue;
            if (!trim(lines[i]).empty())
                seen_text = true;
            exec += lines[i];
            exec += '\n';
        }
        summary.executive_summary = trim(exec);
    }

    auto collect_items = [&](size_t heading_at) {
        std::vector<SummaryItem> items;
        if (heading_at >= lines.size())
            return items;
        for (size_t i = heading_at + 1; i < lines.size(); ++i) {
            if (is_any_heading(lines[i]))
                break;
            const std::string line = trim(lines[i]);
            if (line.empty())
                continue;
            if (line.rfind("- ", 0) == 0 || line.rfind("* ", 0) == 0 || line.rfind("+ ", 0) == 0) {
                items.push_back({trim(line.substr(2)), {}, std::nullopt});
            } else if (!items.empty()) {
                items.back().text += " " + line; // wrapped bullet continuation
            }
        }
        for (auto& item : items)
            item.commit_url = extract_first_url(item.text);
        return items;
    };
    summary.features = collect_items(features_at);
    summary.fixes = collect_items(fixes_at);
    return summary;
}

StructuredSummary summarize(const PromptPair& prompts, const GenerationSettings& settings,
                            SummarizerBackend& backend, const std::vector<CommitRecord>& commits) {
    if (prompts.commit_count_included == 0) {
        StructuredSummary summary;
        summary.executive_summary = "No substantive changes were promoted in this range.";
        summary.raw_markdown = summary.executive_summary + "\n";
        return summary;
    }

    std::string raw = backend.complete(prompts.system_prompt, prompts.user_prompt, settings);
    StructuredSummary summary = parse_summary_markdown(raw);
    if (trim(raw).empty() || !summary.sections_found) {
        log::warn("summarizer backend '" + backend.name() + "' returned " +
                  (trim(raw).empty() ? std::string("empty") : std::string("non-conforming")) +
                  " output; retrying once");
        raw = backend.complete(prompts.system_prompt, prompts.user_prompt, settings);
        summary = parse_summary_markdown(raw);
    }
    if (trim(raw).empty())
        throw BackendRefusal("backend '" + backend.name() + "' returned empty output after retry");
    if (!summary.sections_found)
        log::warn("mandatory section headings still missing after retry; the report will carry"
                  " the raw output and a warning banner");

    for (auto* items : {&summary.features, &summary.fixes})
        for (auto& item : *items)
            item.matched_hash = match_item(item, commits);
    return summary;
}

VerificationReport verify_summary(const StructuredSummary& summary,
                                  const std::vector<CommitRecord>& commits) {
    VerificationReport report;
    std::set<std::string> matched;
    auto scan = [&](const std::vector<SummaryItem>& items) {
        for (const auto& item : items) {
            if (auto hash = match_item(item, commits))
                matched.insert(*hash);
            else if (!item.commit_url.empty())
                report.unknown_urls.push_back(item.commit_url);
        }
    };
    scan(summary.features);
    scan(summary.fixes);

    for (const auto& commit : commits) {
        const CommitKind kind = classify_summary(commit.summary).kind;
        if (matched.count(commit.hash))
            continue;
        if (kind == CommitKind::feature)
            report.missing_feat_commits.push_back(commit.hash);
        else if (kind == CommitKind::fix)
            report.missing_fix_commits.push_back(commit.hash);
    }
    report.complete = report.missing_feat_commits.empty() && report.missing_fix_commits.empty();
    return report;
}

} // namespace promo

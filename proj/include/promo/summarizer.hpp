#pragma once

#include "promo/commit.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace promo {

// Context-window cap: prompts carry at most this many commits (newest kept).
inline constexpr std::size_t kPromptCommitCap = 50;

// Mandatory report section headings; the parser keys on this exact text.
inline constexpr const char* kFeaturesHeading = "New Features & Enhancements";
inline constexpr const char* kFixesHeading = "Bug Fixes & Improvements";

struct ReportContext {
    std::string promotion_type; // development-to-staging | staging-to-production
    std::string date;           // YYYY-MM-DD, UTC
};

struct PromptPair {
    std::string system_prompt;
    std::string user_prompt;
    std::size_t commit_count_included = 0;
    bool truncated = false; // true iff the input exceeded kPromptCommitCap
};

struct GenerationSettings {
    double temperature = 0.7;
    int max_output_tokens = 2500;
    int timeout_seconds = 120;
};

struct SummaryItem {
    std::string text;       // bullet content, Markdown stripped of the list marker
    std::string commit_url; // first URL found in the bullet, may be empty
    std::optional<std::string> matched_hash;
};

struct StructuredSummary {
    std::string executive_summary; // text before the first known section heading
    std::vector<SummaryItem> features;
    std::vector<SummaryItem> fixes;
    std::string raw_markdown;  // backend output, verbatim
    bool sections_found = true; // false → report carries a warning banner
};

struct VerificationReport {
    std::vector<std::string> missing_feat_commits;
    std::vector<std::string> missing_fix_commits;
    std::vector<std::string> unknown_urls;
    bool complete = true; // iff both missing lists are empty
};

class SummarizerBackend {
public:
    virtual ~SummarizerBackend() = default;
    virtual std::string name() const = 0;
    // Returns the raw Markdown completion. Throws BackendUnavailable on
    // transport or authentication failure.
    virtual std::string complete(const std::string& system_prompt, const std::string& user_prompt,
                                 const GenerationSettings& settings) = 0;
};

// Offline backend: reconstructs the commit list from the user prompt and
// composes a template summary. Output is a pure function of the prompt text,
// which makes it suitable for CI, golden tests, and degraded runs.
class DeterministicBackend final : public SummarizerBackend {
public:
    std::string name() const override { return "deterministic"; }
    std::string complete(const std::string& system_prompt, const std::string& user_prompt,
                         const GenerationSettings& settings) override;
};

// Pure template; mentions the promotion type exactly once and mandates both
// section headings, the 2-3 paragraph executive summary, and the
// ALWAYS-include-ALL-feat()/fix() consistency clause.
std::string build_system_prompt(const ReportContext& context);

// Commits are expected newest-first (collect_commits order). Each block
// carries summary, author, date, URL, file count, diff stats, and the full
// message in a fixed labeled template.
PromptPair build_user_prompt(const std::vector<CommitRecord>& commits);

PromptPair build_prompts(const ReportContext& context, const std::vector<CommitRecord>& commits);

// The newest-first prefix of commits that build_user_prompt would include;
// callers verify summaries against exactly this list.
std::vector<CommitRecord> commits_for_prompt(const std::vector<CommitRecord>& commits);

// Locates the two mandatory headings by text (any heading level) and collects
// their bullet items. Absent headings set sections_found = false and leave the
// whole text as executive_summary.
StructuredSummary parse_summary_markdown(const std::string& markdown);

// Invokes the backend (one retry on empty or heading-less output), parses the
// result, and matches item URLs back to input commits by hash. Throws
// BackendRefusal when the output is still empty after the retry;
// BackendUnavailable propagates from the backend.
StructuredSummary summarize(const PromptPair& prompts, const GenerationSettings& settings,
                            SummarizerBackend& backend, const std::vector<CommitRecord>& commits);

// Checks that every feat/fix commit of the input is matched by some item and
// that every URL in the summary points back to an input commit.
VerificationReport verify_summary(const StructuredSummary& summary,
                                  const std::vector<CommitRecord>& commits);

} // namespace promo

#pragma once

#include "promo/commit.hpp"
#include "promo/pipeline_analyzer.hpp"
#include "promo/semantic_filter.hpp"
#include "promo/summarizer.hpp"
#include "promo/time_utils.hpp"

#include <string>
#include <utility>
#include <vector>

namespace promo {

struct PromotionStats {
    std::size_t commit_count = 0;        // pre-filter
    std::size_t substantive_count = 0;   // post-filter
    std::size_t contributor_count = 0;   // distinct author emails
    std::size_t total_files_changed = 0; // distinct paths across all commits
    std::size_t total_insertions = 0;
    std::size_t total_deletions = 0;

    bool operator==(const PromotionStats&) const = default;
};

// A guard invariant that was overridden for this run; echoed verbatim into the
// report provenance so the audit trail survives in the artifact.
struct OverrideNote {
    std::string invariant; // "parity" | "soak" | "hotfix"
    std::string reason;
};

struct Provenance {
    std::string repository_url;
    std::string range_text;
    std::string backend_name;
    std::vector<OverrideNote> overrides;
    std::vector<std::string> warnings; // advisory guard violations, degradation notes
};

// Link construction for the repository web UI; empty web_base_url disables
// linking and the report falls back to plain text.
struct LinkContext {
    std::string web_base_url;
    std::string ref = "HEAD"; // revision used in pipeline file links
};

struct ReportInputs {
    std::string promotion_type; // development-to-staging | staging-to-production
    UtcSeconds generated_at = 0;
    PromotionStats stats;
    StructuredSummary summary;
    bool summary_failed = false;      // summarize stage failed entirely
    std::string summary_failure_note; // shown in the degraded banner
    VerificationReport verification;
    bool verification_ran = false;
    ImpactMatrix impact;
    std::vector<PipelineDefinition> pipelines; // for linking pipeline files
    std::vector<std::pair<CommitRecord, CommitClass>> suppressed_audit;
    Provenance provenance;
    LinkContext links;
};

struct PromotionReport {
    std::string promotion_type;
    UtcSeconds generated_at = 0;
    PromotionStats stats;
    StructuredSummary summary;
    ImpactMatrix impact;
    std::vector<std::pair<CommitRecord, CommitClass>> suppressed_audit;
    Provenance provenance;
    std::string html;
    std::string markdown;
};

std::string escape_html(const std::string& text);

// Distinct-count semantics: contributors by author email (name as fallback),
// files by path text across all commits.
PromotionStats aggregate_stats(const std::vector<CommitRecord>& all_commits,
                               const std::vector<CommitRecord>& substantive);

// Minimal renderer for the subset the summary uses: ATX headings, paragraphs,
// bullet lists, bold, inline links. Everything is HTML-escaped first; raw HTML
// in the input never reaches the output live. Non-http(s) link targets render
// as plain text.
std::string render_markdown_to_html(const std::string& markdown);

// One row per matrix entry: task, category, affected pipelines (linked to
// their YAML files when a web base is configured), pipeline count, commits.
// An empty matrix renders as a "no task definitions changed" notice.
std::string render_impact_table(const ImpactMatrix& impact,
                                const std::vector<PipelineDefinition>& pipelines = {},
                                const LinkContext& links = {});

// Self-contained HTML (inline styles only) plus a Markdown twin with the same
// content; byte-deterministic for fixed inputs and generated_at.
PromotionReport compose_report(const ReportInputs& inputs);

} // namespace promo

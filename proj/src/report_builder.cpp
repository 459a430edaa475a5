#include "promo/report_builder.hpp"

#include "promo/commit_collector.hpp"

#include <map>
#include <regex>
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

std::string human_timestamp(UtcSeconds t) {
    std::string iso = format_iso8601_utc(t); // 2026-08-13T09:00:00Z
    iso[10] = ' ';
    iso.pop_back();
    return iso + " UTC";
}

std::string short_hash(const std::string& hash) {
    return hash.size() > 7 ? hash.substr(0, 7) : hash;
}

bool is_http_url(const std::string& url) {
    return url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0;
}

std::string blob_url(const LinkContext& links, const std::string& file_path) {
    if (links.web_base_url.empty())
        return {};
    std::string base = links.web_base_url;
    while (!base.empty() && base.back() == '/')
        base.pop_back();
    return base + "/blob/" + (links.ref.empty() ? "HEAD" : links.ref) + "/" + file_path;
}

std::string anchor(const std::string& url, const std::string& label_escaped) {
    if (url.empty() || !is_http_url(url))
        return label_escaped;
    return "<a href=\"" + escape_html(url) + "\" style=\"color:#0969da;text-decoration:none\">" +
           label_escaped + "</a>";
}

// Markdown-table cell: escape pipes and strip newlines so rows stay intact.
std::string md_cell(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '|')
            out += "\\|";
        else if (c == '\n' || c == '\r')
            out += ' ';
        else
            out += c;
    }
    return out;
}

// Inline Markdown (bold, links) over already-escaped text.
std::string render_inline(const std::string& escaped) {
    static const std::regex link_re(R"(\[([^\]]*)\]\((https?://[^)\s]*)\))");
    static const std::regex bold_re(R"(\*\*([^*]+)\*\*)");
    std::string out = std::regex_replace(
        escaped, link_re, "<a href=\"$2\" style=\"color:#0969da;text-decoration:none\">$1</a>");
    out = std::regex_replace(out, bold_re, "<b>$1</b>");
    return out;
}

const char* kBannerStyle = "background:#fff8c5;border:1px solid #d4a72c;border-radius:6px;"
                           "padding:8px 12px;margin:12px 0;color:#4d2d00";
const char* kCellStyle = "border:1px solid #d0d7de;padding:6px 10px;text-align:left;"
                         "vertical-align:top";
const char* kHeadStyle = "border:1px solid #d0d7de;padding:6px 10px;text-align:left;"
                         "background:#f6f8fa";

std::string banner(const std::string& text_escaped) {
    return "<div style=\"" + std::string(kBannerStyle) + "\"><b>Warning:</b> " + text_escaped +
           "</div>\n";
}

struct SectionWriter {
    std::ostringstream html;
    std::ostringstream md;
};

} // namespace

std::string escape_html(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out += c;
        }
    }
    return out;
}

PromotionStats aggregate_stats(const std::vector<CommitRecord>& all_commits,
                               const std::vector<CommitRecord>& substantive) {
    PromotionStats stats;
    stats.commit_count = all_commits.size();
    stats.substantive_count = substantive.size();
    std::set<std::string> authors;
    std::set<std::string> files;
    for (const auto& commit : all_commits) {
        std::string who = commit.author_email.empty() ? commit.author_name : commit.author_email;
        if (who.empty())
            who = "(unknown)";
        authors.insert(who);
        for (const auto& path : commit.changed_files)
            files.insert(path);
        stats.total_insertions += commit.diffstat.insertions;
        stats.total_deletions += commit.diffstat.deletions;
    }
    stats.contributor_count = authors.size();
    stats.total_files_changed = files.size();
    return stats;
}

std::string render_markdown_to_html(const std::string& markdown) {
    std::ostringstream out;
    std::vector<std::string> items; // open bullet list
    std::string paragraph;

    auto flush_paragraph = [&] {
        if (!trim(paragraph).empty())
            out << "<p>" << render_inline(escape_html(trim(paragraph))) << "</p>\n";
        paragraph.clear();
    };
    auto flush_list = [&] {
        if (items.empty())
            return;
        out << "<ul>\n";
        for (const auto& item : items)
            out << "  <li>" << render_inline(escape_html(item)) << "</li>\n";
        out << "</ul>\n";
        items.clear();
    };

    std::istringstream in(markdown);
    std::string raw;
    while (std::getline(in, raw)) {
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const std::string line = trim(raw);
        if (line.empty()) {
            flush_paragraph();
            flush_list();
            continue;
        }
        if (line.front() == '#') {
            size_t level = 0;
            while (level < line.size() && line[level] == '#')
                ++level;
            if (level <= 6 && level < line.size() && line[level] == ' ') {
                flush_paragraph();
                flush_list();
                const std::string text = trim(line.substr(level));
                out << "<h" << level << ">" << render_inline(escape_html(text)) << "</h" << level
                    << ">\n";
                continue;
            }
        }
        if (line.size() > 1 && (line[0] == '-' || line[0] == '*' || line[0] == '+') &&
            line[1] == ' ') {
            flush_paragraph();
            items.push_back(trim(line.substr(2)));
            continue;
        }
        if (!items.empty()) {
            items.back() += " " + line; // wrapped bullet continuation
            continue;
        }
        if (!paragraph.empty())
            paragraph += ' ';
        paragraph += line;
    }
    flush_paragraph();
    flush_list();
    return out.str();
}

std::string render_impact_table(const ImpactMatrix& impact,
                                const std::vector<PipelineDefinition>& pipelines,
                                const LinkContext& links) {
    if (impact.entries.empty())
        return "<p>No task definitions changed in this promotion.</p>\n";

    std::map<std::string, std::string> file_of_display;
    for (const auto& pipeline : pipelines)
        file_of_display[pipeline_display_name(pipeline, pipelines)] = pipeline.file_path;

    std::ostringstream out;
    out << "<table style=\"border-collapse:collapse;width:100%\">\n<tr>";
    for (const char* head : {"Task", "Category", "Affected pipelines", "Pipelines", "Commits"})
        out << "<th style=\"" << kHeadStyle << "\">" << head << "</th>";
    out << "</tr>\n";
    for (const auto& entry : impact.entries) {
        out << "<tr>";
        out << "<td style=\"" << kCellStyle << "\"><b>" << escape_html(entry.task.name)
            << "</b></td>";
        out << "<td style=\"" << kCellStyle << "\">" << escape_html(entry.task.category.text)
            << "</td>";
        out << "<td style=\"" << kCellStyle << "\">";
        if (entry.pipelines.empty()) {
            out << "&mdash;";
        } else {
            bool first = true;
            for (const auto& name : entry.pipelines) {
                if (!first)
                    out << ", ";
                first = false;
                const auto file = file_of_display.find(name);
                const std::string url =
                    file == file_of_display.end() ? std::string{} : blob_url(links, file->second);
                out << anchor(url, escape_html(name));
            }
        }
        out << "</td>";
        out << "<td style=\"" << kCellStyle << "\">" << entry.pipeline_count << "</td>";
        out << "<td style=\"" << kCellStyle << "\">";
        bool first = true;
        for (const auto& hash : entry.task.commits) {
            if (!first)
                out << ", ";
            first = false;
            out << anchor(commit_url(links.web_base_url, hash),
                          "<code>" + escape_html(short_hash(hash)) + "</code>");
        }
        if (entry.task.commits.empty())
            out << "&mdash;";
        out << "</td></tr>\n";
    }
    out << "</table>\n";
    return out.str();
}

PromotionReport compose_report(const ReportInputs& inputs) {
    PromotionReport report;
    report.promotion_type = inputs.promotion_type;
    report.generated_at = inputs.generated_at;
    report.stats = inputs.stats;
    report.summary = inputs.summary;
    report.impact = inputs.impact;
    report.suppressed_audit = inputs.suppressed_audit;
    report.provenance = inputs.provenance;

    const std::string when = human_timestamp(inputs.generated_at);
    const std::string title = "Promotion Report: " + inputs.promotion_type;
    const bool empty_run = inputs.stats.commit_count == 0;

    std::ostringstream html;
    std::ostringstream md;

    html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>"
         << escape_html(title) << "</title>\n</head>\n"
         << "<body style=\"font-family:Arial,Helvetica,sans-serif;color:#1f2328;margin:0;"
            "padding:24px;background:#f6f8fa\">\n"
         << "<div style=\"max-width:860px;margin:0 auto;background:#ffffff;"
            "border:1px solid #d0d7de;border-radius:6px;padding:32px\">\n"
         << "<h1 style=\"margin-top:0\">" << escape_html(title) << "</h1>\n"
         << "<p style=\"color:#57606a\">Generated at " << when << "</p>\n";

    md << "# " << title << "\n\nGenerated at " << when << "\n";

    for (const auto& warning : inputs.provenance.warnings) {
        html << banner(escape_html(warning));
        md << "\n> **Warning:** " << warning << "\n";
    }

    if (empty_run) {
        html << "<p>No changes were promoted in this range.</p>\n";
        md << "\nNo changes were promoted in this range.\n";
    } else {
        html << "<h2>Statistics</h2>\n<table style=\"border-collapse:collapse\">\n";
        md << "\n## Statistics\n\n";
        const std::pair<const char*, std::size_t> rows[] = {
            {"Commits (pre-filter)", inputs.stats.commit_count},
            {"Substantive commits (post-filter)", inputs.stats.substantive_count},
            {"Contributors", inputs.stats.contributor_count},
            {"Files changed", inputs.stats.total_files_changed},
            {"Insertions", inputs.stats.total_insertions},
            {"Deletions", inputs.stats.total_deletions},
        };
        for (const auto& [label, value] : rows) {
            html << "<tr><td style=\"" << kCellStyle << "\">" << label << "</td><td style=\""
                 << kCellStyle << "\"><b>" << value << "</b></td></tr>\n";
            md << "- " << label << ": " << value << "\n";
        }
        html << "</table>\n";

        html << "<h2>Change Summary</h2>\n";
        md << "\n## Change Summary\n\n";
        if (inputs.summary_failed) {
            const std::string note = inputs.summary_failure_note.empty()
                                         ? std::string("The summarizer was unavailable; this"
                                                       " report was delivered without a summary.")
                                         : inputs.summary_failure_note;
            html << banner(escape_html(note));
            md << "> **Warning:** " << note << "\n";
        } else {
            if (!inputs.summary.sections_found) {
                const std::string note = "The summarizer output did not contain the mandatory"
                                         " section headings; its raw output is shown below.";
                html << banner(escape_html(note));
                md << "> **Warning:** " << note << "\n\n";
            }
            if (inputs.verification_ran && !inputs.verification.complete) {
                std::string note = "The summary verification pass found " +
                                   std::to_string(inputs.verification.missing_feat_commits.size() +
                                                  inputs.verification.missing_fix_commits.size()) +
                                   " feat/fix commit(s) missing from the summary.";
                html << banner(escape_html(note));
                md << "> **Warning:** " << note << "\n\n";
            }
            html << render_markdown_to_html(inputs.summary.raw_markdown);
            md << trim(inputs.summary.raw_markdown) << "\n";
        }

        html << "<h2>Pipeline Impact</h2>\n"
             << render_impact_table(inputs.impact, inputs.pipelines, inputs.links);
        md << "\n## Pipeline Impact\n\n";
        if (inputs.impact.entries.empty()) {
            md << "No task definitions changed in this promotion.\n";
        } else {
            md << "| Task | Category | Affected pipelines | Pipelines | Commits |\n"
               << "|---|---|---|---|---|\n";
            for (const auto& entry : inputs.impact.entries) {
                std::string names;
                for (const auto& name : entry.pipelines)
                    names += (names.empty() ? "" : ", ") + name;
                std::string hashes;
                for (const auto& hash : entry.task.commits)
                    hashes += (hashes.empty() ? "" : ", ") + short_hash(hash);
                md << "| " << md_cell(entry.task.name) << " | " << md_cell(entry.task.category.text)
                   << " | " << md_cell(names.empty() ? "—" : names) << " | "
                   << entry.pipeline_count << " | " << md_cell(hashes.empty() ? "—" : hashes)
                   << " |\n";
            }
        }

        html << "<h2>Suppressed Commits</h2>\n";
        md << "\n## Suppressed Commits\n\n";
        if (inputs.suppressed_audit.empty()) {
            html << "<p>No commits were suppressed by the semantic filter.</p>\n";
            md << "No commits were suppressed by the semantic filter.\n";
        } else {
            html << "<details><summary>" << inputs.suppressed_audit.size()
                 << " commit(s) suppressed by the semantic filter</summary>\n"
                 << "<table style=\"border-collapse:collapse;width:100%;margin-top:8px\">\n"
                 << "<tr><th style=\"" << kHeadStyle << "\">Commit</th><th style=\"" << kHeadStyle
                 << "\">Class</th><th style=\"" << kHeadStyle << "\">Summary</th></tr>\n";
            md << inputs.suppressed_audit.size() << " commit(s) suppressed by the semantic"
               << " filter:\n\n";
            for (const auto& [commit, cls] : inputs.suppressed_audit) {
                html << "<tr><td style=\"" << kCellStyle << "\">"
                     << anchor(commit.url, "<code>" + escape_html(short_hash(commit.hash)) +
                                               "</code>")
                     << "</td><td style=\"" << kCellStyle << "\">" << to_string(cls.kind)
                     << "</td><td style=\"" << kCellStyle << "\">" << escape_html(commit.summary)
                     << "</td></tr>\n";
                md << "- `" << short_hash(commit.hash) << "` " << commit.summary << " ("
                   << to_string(cls.kind) << ")\n";
            }
            html << "</table>\n</details>\n";
        }
    }

    html << "<hr style=\"border:none;border-top:1px solid #d0d7de;margin:24px 0 12px\">\n"
         << "<p style=\"color:#57606a;font-size:13px\">Repository: "
         << (inputs.provenance.repository_url.empty()
                 ? std::string("(not configured)")
                 : anchor(inputs.provenance.repository_url,
                          escape_html(inputs.provenance.repository_url)))
         << " &middot; Range: <code>" << escape_html(inputs.provenance.range_text)
         << "</code> &middot; Summarizer backend: "
         << escape_html(inputs.provenance.backend_name.empty() ? "(none)"
                                                               : inputs.provenance.backend_name)
         << "</p>\n";
    md << "\n---\n\nRepository: "
       << (inputs.provenance.repository_url.empty() ? "(not configured)"
                                                    : inputs.provenance.repository_url)
       << " · Range: `" << inputs.provenance.range_text << "` · Summarizer backend: "
       << (inputs.provenance.backend_name.empty() ? "(none)" : inputs.provenance.backend_name)
       << "\n";

    for (const auto& note : inputs.provenance.overrides) {
        html << "<p style=\"color:#57606a;font-size:13px\">Guard override ("
             << escape_html(note.invariant) << "): " << escape_html(note.reason) << "</p>\n";
        md << "\nGuard override (" << note.invariant << "): " << note.reason << "\n";
    }

    html << "</div>\n</body>\n</html>\n";

    report.html = html.str();
    report.markdown = md.str();
    return report;
}

} // namespace promo

#include "promo/orchestrator.hpp"

#include "promo/backend_http.hpp"
#include "promo/commit_collector.hpp"
#include "promo/errors.hpp"
#include "promo/log.hpp"
#include "promo/pipeline_analyzer.hpp"
#include "promo/report_builder.hpp"

#include <cstdio>
#include <fstream>
#include <optional>

namespace promo {

namespace {

std::filesystem::path resolve_under(const std::filesystem::path& base, const std::string& path) {
    std::filesystem::path p(path);
    return p.is_absolute() ? p : base / p;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out)
        throw Error("cannot write " + path.string());
    log::info("wrote " + path.string());
}

std::string format_ratio(double ratio) {
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%.2f", ratio);
    return buffer;
}

} // namespace

std::string status_line(RunOutcome outcome) {
    switch (outcome) {
    case RunOutcome::report_ok:
        return "STATUS: promotion report generated";
    case RunOutcome::report_failed_promotion_context_ok:
        return "STATUS: promotion succeeded, report generation failed";
    case RunOutcome::guard_blocked:
        return "STATUS: promotion blocked by guard";
    }
    return "STATUS: unknown";
}

int report_status(const RunStatus& status) {
    std::puts(status_line(status.outcome).c_str());
    std::fflush(stdout);
    return status.exit_code;
}

RunStatus run(const RunConfig& config, const RunDeps& deps) {
    RunStatus status;
    auto note = [&](const std::string& message, bool warn = false) {
        status.messages.push_back(message);
        if (warn)
            log::warn(message);
        else
            log::info(message);
    };
    auto fail_report = [&](const std::string& message) {
        note(message, true);
        status.outcome = RunOutcome::report_failed_promotion_context_ok;
        status.exit_code = 0;
        return status;
    };

    const auto clock = deps.clock ? deps.clock : now_utc;
    const UtcSeconds guard_now = clock();
    const UtcSeconds generated_at = config.generated_at.value_or(guard_now);

    std::optional<GitRepo> repo;
    try {
        repo.emplace(config.repo_path);
    } catch (const std::exception& e) {
        if (config.guard_mode == GuardMode::pre_check) {
            note(std::string("guard: cannot open repository, failing closed: ") + e.what(), true);
            status.outcome = RunOutcome::guard_blocked;
            status.exit_code = 2;
            return status;
        }
        return fail_report(std::string("cannot open repository: ") + e.what());
    }

    // --- guard ---------------------------------------------------------
    std::set<ViolationKind> override_kinds;
    if (config.override_parity.enabled)
        override_kinds.insert(ViolationKind::parity);
    if (config.override_soak.enabled)
        override_kinds.insert(ViolationKind::soak);
    if (config.override_hotfix.enabled)
        override_kinds.insert(ViolationKind::hotfix_loss);

    const GuardDecision guard = evaluate(config.promotion_type, *repo, config.branches, guard_now,
                                         override_kinds, config.soak_days);

    std::vector<OverrideNote> override_notes;
    for (const ViolationKind kind : guard.overrides_applied) {
        std::string reason;
        if (kind == ViolationKind::parity)
            reason = config.override_parity.reason;
        else if (kind == ViolationKind::soak)
            reason = config.override_soak.reason;
        else
            reason = config.override_hotfix.reason;
        override_notes.push_back({to_string(kind), reason});
        note("guard override applied (" + to_string(kind) + "): " + reason, true);
    }

    std::vector<std::string> report_warnings;
    for (const Violation& violation : guard.violations) {
        const bool overridden =
            std::find(guard.overrides_applied.begin(), guard.overrides_applied.end(),
                      violation.kind) != guard.overrides_applied.end();
        note("guard violation (" + to_string(violation.kind) +
                 (overridden ? ", overridden): " : "): ") + violation.detail,
             true);
        if (!overridden && config.guard_mode == GuardMode::post_report)
            report_warnings.push_back("Promotion guard (advisory): " + to_string(violation.kind) +
                                      " — " + violation.detail);
    }

    if (!guard.allowed && config.guard_mode == GuardMode::pre_check) {
        status.outcome = RunOutcome::guard_blocked;
        status.exit_code = 2;
        return status; // blocking mode: no artifacts
    }

    // The post-report invocation runs after the branches moved, which is the
    // moment staging content starts soaking.
    if (config.guard_mode == GuardMode::post_report &&
        config.promotion_type == PromotionType::development_to_staging && !config.dry_run) {
        try {
            write_soak_marker(*repo, repo->rev_parse(config.branches.staging), guard_now);
        } catch (const std::exception& e) {
            note(std::string("cannot write soak marker: ") + e.what(), true);
        }
    }

    // --- collect / filter / analyze -------------------------------------
    std::vector<CommitRecord> commits;
    FilterResult filtered;
    std::vector<PipelineDefinition> pipelines;
    ImpactMatrix impact;
    RangeSpec range;
    try {
        if (config.captured_range) {
            range.source_ref = config.source_ref();
            range.target_ref = config.target_ref();
            range.captured_range = *config.captured_range;
            note("using promotion range captured by the environment: " + range.range_text());
        } else {
            range = capture_range(*repo, config.source_ref(), config.target_ref());
            note("resolved promotion range: " + range.range_text());
        }

        commits = collect_commits(*repo, range, config.web_base_url);
        note("collected " + std::to_string(commits.size()) + " commit(s)");

        filtered = filter_substantive(commits, config.filter_rules);
        note("semantic filter kept " + std::to_string(filtered.kept.size()) + " of " +
             std::to_string(commits.size()) + " commit(s), reduction " +
             format_ratio(filtered.reduction_ratio));

        TaskLayout layout = config.task_layout;
        layout.root_dir = config.tasks_root;
        const std::vector<ChangedTask> tasks = extract_changed_tasks(commits, layout);
        note(std::to_string(tasks.size()) + " changed task(s) detected");

        pipelines = load_pipelines(resolve_under(repo->root(), config.pipelines_root),
                                   repo->root());
        note(std::to_string(pipelines.size()) + " pipeline definition(s) loaded");

        std::set<std::string> self_urls = config.self_repo_urls;
        if (!config.web_base_url.empty())
            self_urls.insert(config.web_base_url);
        impact = compute_impact(tasks, pipelines, self_urls);

        // Written as soon as it exists so a later stage failure cannot lose it.
        write_file(config.output_dir / "impact.json", impact_to_json(impact));
    } catch (const std::exception& e) {
        return fail_report(std::string("report generation failed during analysis: ") + e.what());
    }

    // --- summarize / verify ----------------------------------------------
    const ReportContext context{to_string(config.promotion_type), format_date_utc(generated_at)};
    const std::vector<CommitRecord> prompt_commits = commits_for_prompt(filtered.kept);
    const PromptPair prompts = build_prompts(context, filtered.kept);

    StructuredSummary summary;
    bool summary_ok = false;
    std::string summary_failure_note;
    std::string backend_name;
    try {
        std::unique_ptr<SummarizerBackend> backend;
        if (deps.make_backend)
            backend = deps.make_backend(config);
        else if (config.backend == BackendChoice::remote && !config.dry_run)
            backend = std::make_unique<HttpChatBackend>(HttpBackendConfig{
                config.backend_base_url, config.backend_model, config.backend_key_file});
        else
            backend = std::make_unique<DeterministicBackend>();
        if (config.backend == BackendChoice::remote && config.dry_run && !deps.make_backend)
            note("dry run: using the deterministic backend, no network will be touched");
        backend_name = backend->name();
        summary = summarize(prompts, config.generation, *backend, prompt_commits);
        summary_ok = true;
    } catch (const std::exception& e) {
        note(std::string("summarizer backend failed: ") + e.what(), true);
        if (config.backend == BackendChoice::remote) {
            try {
                DeterministicBackend fallback;
                summary = summarize(prompts, config.generation, fallback, prompt_commits);
                summary_ok = true;
                backend_name = "deterministic (fallback)";
                report_warnings.push_back("The remote summarizer was unavailable; this summary"
                                          " was produced by the deterministic fallback backend.");
                note("deterministic fallback summary produced");
            } catch (const std::exception& inner) {
                summary_failure_note = inner.what();
            }
        } else {
            summary_failure_note = e.what();
        }
    }

    VerificationReport verification;
    bool verification_ran = false;
    if (summary_ok) {
        verification = verify_summary(summary, prompt_commits);
        verification_ran = true;
        if (verification.complete)
            note("summary verification passed");
        else
            note("summary verification found " +
                     std::to_string(verification.missing_feat_commits.size() +
                                    verification.missing_fix_commits.size()) +
                     " feat/fix commit(s) missing and " +
                     std::to_string(verification.unknown_urls.size()) + " unknown URL(s)",
                 true);
    }

    // --- compose / write / deliver ---------------------------------------
    ReportInputs inputs;
    inputs.promotion_type = to_string(config.promotion_type);
    inputs.generated_at = generated_at;
    inputs.stats = aggregate_stats(commits, filtered.kept);
    inputs.summary = summary;
    inputs.summary_failed = !summary_ok;
    if (!summary_ok)
        inputs.summary_failure_note =
            "The summarizer failed (" + summary_failure_note +
            "); this report was delivered without a generated summary.";
    inputs.verification = verification;
    inputs.verification_ran = verification_ran;
    inputs.impact = impact;
    inputs.pipelines = pipelines;
    inputs.suppressed_audit = filtered.suppressed;
    inputs.provenance.repository_url =
        !config.web_base_url.empty()
            ? config.web_base_url
            : (config.self_repo_urls.empty() ? std::string{} : *config.self_repo_urls.begin());
    inputs.provenance.range_text = range.range_text();
    inputs.provenance.backend_name = backend_name;
    inputs.provenance.overrides = override_notes;
    inputs.provenance.warnings = report_warnings;
    inputs.links.web_base_url = config.web_base_url;
    try {
        inputs.links.ref = repo->rev_parse(range.source_ref);
    } catch (const std::exception&) {
        inputs.links.ref = "HEAD";
    }

    PromotionReport report;
    try {
        report = compose_report(inputs);
        write_file(config.output_dir / "report.html", report.html);
        write_file(config.output_dir / "report.md", report.markdown);
    } catch (const std::exception& e) {
        return fail_report(std::string("report composition failed: ") + e.what());
    }

    if (config.send_email) {
        try {
            const MimeMessage message = build_report_email(report, config.smtp);
            if (deps.deliver)
                deps.deliver(message, config.smtp);
            else
                send_email(message, config.smtp);
            note("report emailed to " + std::to_string(config.smtp.recipients.size()) +
                 " recipient(s)");
        } catch (const std::exception& e) {
            note(std::string("email delivery failed (report artifacts remain on disk): ") +
                     e.what(),
                 true);
        }
    }

    if (!summary_ok) {
        status.outcome = RunOutcome::report_failed_promotion_context_ok;
        status.exit_code = 0;
        return status;
    }

    status.outcome = RunOutcome::report_ok;
    status.exit_code = 0;
    return status;
}

} // namespace promo

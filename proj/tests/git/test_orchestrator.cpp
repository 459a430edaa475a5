#include <doctest.h>

#include "promo/errors.hpp"
#include "promo/git_repo.hpp"
#include "promo/orchestrator.hpp"
#include "promo/promotion_guard.hpp"
#include "promo/summarizer.hpp"

#include "support/smtp_sink.hpp"
#include "support/test_support.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <string>

using namespace promo;
using testsupport::LogCapture;
using testsupport::TempDir;

namespace fs = std::filesystem;

namespace {

constexpr UtcSeconds kNow = 1786622400; // 2026-08-13T12:00:00Z

struct FailingBackend : SummarizerBackend {
    std::string name() const override { return "failing-stub"; }
    std::string complete(const std::string&, const std::string&,
                         const GenerationSettings&) override {
        throw BackendUnavailable("stub backend is configured to fail");
    }
};

struct Scenario {
    TempDir dir;
    testsupport::WalkthroughRepo repo;
    RunConfig config;
    RunDeps deps;

    Scenario() {
        repo = testsupport::make_walkthrough_repo(dir.path() / "repo");
        config.promotion_type = PromotionType::development_to_staging;
        config.repo_path = repo.root;
        config.output_dir = dir.path() / "out";
        config.web_base_url = testsupport::kSelfRepoUrl;
        config.generated_at = kNow;
        deps.clock = [] { return kNow; };
        deps.make_backend = [](const RunConfig&) -> std::unique_ptr<SummarizerBackend> {
            return std::make_unique<DeterministicBackend>();
        };
    }

    GitRepo git() const { return GitRepo(repo.root); }
    std::string artifact(const char* name) const {
        return testsupport::read_file(config.output_dir / name);
    }
};

} // namespace

TEST_CASE("a clean promotion produces all three artifacts and reports ok") {
    Scenario s;
    LogCapture capture;
    const auto status = run(s.config, s.deps);

    CHECK(status.outcome == RunOutcome::report_ok);
    CHECK(status.exit_code == 0);
    CHECK(status_line(status.outcome) == "STATUS: promotion report generated");

    const std::string html = s.artifact("report.html");
    const std::string md = s.artifact("report.md");
    const std::string impact = s.artifact("impact.json");

    CHECK(html.find("Promotion Report: development-to-staging") != std::string::npos);
    CHECK(html.find("New Features &amp; Enhancements") != std::string::npos);
    CHECK(md.find("## Pipeline Impact") != std::string::npos);

    // The walkthrough repo yields the three-task matrix.
    const auto parsed = nlohmann::json::parse(impact);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0]["task"] == "sign-image-cosign");
    CHECK(parsed[0]["pipeline_count"] == 5);
    CHECK(parsed[1]["task"] == "publish-repository");
    CHECK(parsed[1]["pipeline_count"] == 3);
    CHECK(parsed[2]["task"] == "sign-kmods");
    CHECK(parsed[2]["pipelines"] == nlohmann::json::array({"push-disk-images-to-cdn"}));

    // All three commits surfaced; the stats band reflects the full range.
    CHECK(md.find("- Commits (pre-filter): 3") != std::string::npos);
    CHECK(md.find("- Substantive commits (post-filter): 3") != std::string::npos);
    CHECK(md.find("- Contributors: 3") != std::string::npos);
    CHECK(md.find("- Files changed: 8") != std::string::npos);
}

TEST_CASE("two runs with a pinned timestamp write byte-identical artifacts") {
    Scenario s;
    REQUIRE(run(s.config, s.deps).outcome == RunOutcome::report_ok);
    const std::string html = s.artifact("report.html");
    const std::string md = s.artifact("report.md");
    const std::string impact = s.artifact("impact.json");

    RunConfig second = s.config;
    second.output_dir = s.dir.path() / "out2";
    REQUIRE(run(second, s.deps).outcome == RunOutcome::report_ok);

    CHECK(testsupport::read_file(second.output_dir / "report.html") == html);
    CHECK(testsupport::read_file(second.output_dir / "report.md") == md);
    CHECK(testsupport::read_file(second.output_dir / "impact.json") == impact);
}

TEST_CASE("a failed summarizer degrades the run without losing the promotion") {
    Scenario s;
    s.deps.make_backend = [](const RunConfig&) -> std::unique_ptr<SummarizerBackend> {
        return std::make_unique<FailingBackend>();
    };
    LogCapture capture;
    const auto status = run(s.config, s.deps);

    // The promotion itself already happened; only reporting failed.
    CHECK(status.outcome == RunOutcome::report_failed_promotion_context_ok);
    CHECK(status.exit_code == 0);
    CHECK(status_line(status.outcome) ==
          "STATUS: promotion succeeded, report generation failed");

    // impact.json was written before the summarizer stage could fail.
    const auto impact = nlohmann::json::parse(s.artifact("impact.json"));
    CHECK(impact.size() == 3);

    // The report still exists and explains the gap.
    const std::string html = s.artifact("report.html");
    CHECK(html.find("The summarizer failed") != std::string::npos);
    CHECK(html.find("stub backend is configured to fail") != std::string::npos);
}

TEST_CASE("a remote backend failure falls back to the deterministic summarizer") {
    Scenario s;
    s.config.backend = BackendChoice::remote;
    s.config.backend_base_url = "http://127.0.0.1:9/v1"; // nothing listens here
    s.config.backend_model = "summarizer-large";
    s.config.backend_key_file = s.dir.path() / "key";
    testsupport::write_file(s.config.backend_key_file, "sk-test-000\n");
    s.deps.make_backend = [](const RunConfig&) -> std::unique_ptr<SummarizerBackend> {
        return std::make_unique<FailingBackend>();
    };
    LogCapture capture;
    const auto status = run(s.config, s.deps);

    CHECK(status.outcome == RunOutcome::report_ok);
    const std::string html = s.artifact("report.html");
    CHECK(html.find("deterministic (fallback)") != std::string::npos);
    CHECK(html.find("produced by the deterministic fallback backend") != std::string::npos);
    CHECK(capture.contains("deterministic fallback summary produced"));
}

TEST_CASE("pre-check guard blocks before any artifact is written") {
    Scenario s;
    s.config.guard_mode = GuardMode::pre_check;
    // Break parity: staging moves ahead of production.
    s.git().run({"branch", "-f", "staging", s.repo.feat_cosign});

    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::guard_blocked);
    CHECK(status.exit_code == 2);
    CHECK(status_line(status.outcome) == "STATUS: promotion blocked by guard");
    CHECK_FALSE(fs::exists(s.config.output_dir / "impact.json"));
    CHECK_FALSE(fs::exists(s.config.output_dir / "report.html"));
    CHECK_FALSE(fs::exists(s.config.output_dir / "report.md"));
}

TEST_CASE("post-report guard turns violations into advisory report warnings") {
    Scenario s;
    s.git().run({"branch", "-f", "staging", s.repo.feat_cosign});

    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);
    CHECK(status.exit_code == 0);

    const std::string html = s.artifact("report.html");
    CHECK(html.find("Promotion guard (advisory): parity") != std::string::npos);
    CHECK(html.find("<b>Warning:</b>") != std::string::npos);
}

TEST_CASE("an override lets a pre-check promotion through with an audit trail") {
    Scenario s;
    s.config.guard_mode = GuardMode::pre_check;
    s.config.override_parity = {true, "expedited security release"};
    s.config.override_hotfix = {true, "staging change re-applied on development"};
    s.git().run({"branch", "-f", "staging", s.repo.feat_cosign});

    LogCapture capture;
    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);

    const std::string html = s.artifact("report.html");
    CHECK(html.find("Guard override (parity): expedited security release") != std::string::npos);
    CHECK(capture.contains("guard override applied (parity)"));
}

TEST_CASE("dev-to-staging post-report runs record the soak entry time") {
    Scenario s;
    const fs::path marker = s.repo.root / kSoakMarkerPath;

    SUBCASE("a live run writes the marker for the staging tip") {
        REQUIRE(run(s.config, s.deps).outcome == RunOutcome::report_ok);
        REQUIRE(fs::exists(marker));
        const auto parsed = nlohmann::json::parse(testsupport::read_file(marker));
        CHECK(parsed["staging_tip"] == s.git().rev_parse("staging"));
        CHECK(parsed["entered_at"] == "2026-08-13T12:00:00Z");
    }
    SUBCASE("a dry run leaves the repository untouched") {
        s.config.dry_run = true;
        REQUIRE(run(s.config, s.deps).outcome == RunOutcome::report_ok);
        CHECK_FALSE(fs::exists(marker));
    }
    SUBCASE("staging-to-production runs never write it") {
        s.config.promotion_type = PromotionType::staging_to_production;
        REQUIRE(run(s.config, s.deps).outcome == RunOutcome::report_ok);
        CHECK_FALSE(fs::exists(marker));
    }
}

TEST_CASE("a captured range keeps reporting correct after the branches move") {
    Scenario s;
    const std::string dev_tip = s.git().rev_parse("development");
    s.config.captured_range = s.repo.base + ".." + dev_tip;

    // Simulate the CI promotion push happening before the report job runs.
    s.git().run({"branch", "-f", "staging", "development"});

    LogCapture capture;
    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);
    CHECK(capture.contains("using promotion range captured by the environment"));

    const std::string md = s.artifact("report.md");
    CHECK(md.find("- Commits (pre-filter): 3") != std::string::npos);
    CHECK(md.find("Range: `" + *s.config.captured_range + "`") != std::string::npos);
}

TEST_CASE("an empty promotion range produces the no-change report") {
    Scenario s;
    s.git().run({"branch", "-f", "staging", "development"});
    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);
    const std::string html = s.artifact("report.html");
    CHECK(html.find("No changes were promoted in this range.") != std::string::npos);
    CHECK(nlohmann::json::parse(s.artifact("impact.json")).empty());
}

TEST_CASE("the report is delivered through a real smtp transaction") {
    Scenario s;
    testsupport::SmtpSink sink;
    s.config.send_email = true;
    s.config.smtp.host = "127.0.0.1";
    s.config.smtp.port = sink.port();
    s.config.smtp.mode = SmtpMode::unauthenticated_relay;
    s.config.smtp.sender = "release-bot@example.com";
    s.config.smtp.recipients = {"team@example.com", "qa@example.com", "mgmt@example.com"};

    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);

    const auto mail = sink.wait_for(1);
    REQUIRE(mail.size() == 1);
    CHECK(mail[0].mail_from == "<release-bot@example.com>");
    REQUIRE(mail[0].rcpt_to.size() == 3);
    CHECK(mail[0].rcpt_to[1] == "<qa@example.com>");
    CHECK(mail[0].auth.empty()); // relay mode never authenticates

    const std::string& data = mail[0].data;
    CHECK(data.find("Content-Type: multipart/alternative") != std::string::npos);
    CHECK(data.find("Content-Type: text/plain; charset=utf-8") != std::string::npos);
    CHECK(data.find("Content-Type: text/html; charset=utf-8") != std::string::npos);
    CHECK(data.find("Subject: =?UTF-8?B?") != std::string::npos); // em dash forces encoding
    CHECK(data.find("Date: Thu, 13 Aug 2026 12:00:00 +0000") != std::string::npos);
}

TEST_CASE("authenticated smtp reads credentials from the configured file") {
    Scenario s;
    testsupport::SmtpSink sink;
    const fs::path credentials = s.dir.path() / "secrets" / "smtp";
    testsupport::write_file(credentials, "mailer:hunter2\n");
    s.config.send_email = true;
    s.config.smtp.host = "127.0.0.1";
    s.config.smtp.port = sink.port();
    s.config.smtp.mode = SmtpMode::authenticated;
    s.config.smtp.credentials_file = credentials;
    s.config.smtp.sender = "release-bot@example.com";
    s.config.smtp.recipients = {"team@example.com"};

    LogCapture capture;
    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);

    const auto mail = sink.wait_for(1);
    REQUIRE(mail.size() == 1);
    // AUTH PLAIN blob is base64("\0user\0password").
    CHECK(mail[0].auth == "AG1haWxlcgBodW50ZXIy");

    // The password travels only inside the transaction, never into logs.
    CHECK_FALSE(capture.contains("hunter2"));
    CHECK(capture.contains("AUTH PLAIN [redacted]"));
}

TEST_CASE("email failure is advisory: artifacts stay and the exit stays zero") {
    Scenario s;
    s.config.send_email = true;
    s.config.smtp.host = "127.0.0.1";
    s.config.smtp.port = 9; // discard port, nothing listens
    s.config.smtp.sender = "release-bot@example.com";
    s.config.smtp.recipients = {"team@example.com"};

    LogCapture capture;
    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);
    CHECK(status.exit_code == 0);
    CHECK(fs::exists(s.config.output_dir / "report.html"));
    CHECK(capture.contains("email delivery failed"));
}

TEST_CASE("backend secrets never leak into logs or artifacts") {
    Scenario s;
    const std::string sentinel = "sk-SENTINEL-5f2a9c-DO-NOT-PRINT";
    const fs::path key_file = s.dir.path() / "secrets" / "api-key";
    testsupport::write_file(key_file, sentinel + "\n");

    // Real HTTP backend against a dead endpoint: construction reads the key,
    // the request fails, the deterministic fallback completes the run.
    s.config.backend = BackendChoice::remote;
    s.config.backend_base_url = "http://127.0.0.1:9/v1";
    s.config.backend_model = "summarizer-large";
    s.config.backend_key_file = key_file;
    s.deps.make_backend = {};

    LogCapture capture;
    const auto status = run(s.config, s.deps);
    CHECK(status.outcome == RunOutcome::report_ok);

    CHECK_FALSE(capture.contains(sentinel));
    CHECK(s.artifact("report.html").find(sentinel) == std::string::npos);
    CHECK(s.artifact("report.md").find(sentinel) == std::string::npos);
    CHECK(s.artifact("impact.json").find(sentinel) == std::string::npos);
}

TEST_CASE("an unopenable repository fails closed in pre-check mode") {
    TempDir dir;
    RunConfig config;
    config.promotion_type = PromotionType::development_to_staging;
    config.repo_path = dir.path() / "not-a-repo";
    config.output_dir = dir.path() / "out";
    config.guard_mode = GuardMode::pre_check;

    const auto status = run(config);
    CHECK(status.outcome == RunOutcome::guard_blocked);
    CHECK(status.exit_code == 2);
    CHECK_FALSE(fs::exists(config.output_dir));
}

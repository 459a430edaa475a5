#include "promo/config.hpp"
#include "promo/errors.hpp"
#include "promo/log.hpp"
#include "promo/orchestrator.hpp"

#include <map>
#include <string>

#include <CLI11.hpp>

extern char** environ;

namespace {

std::map<std::string, std::string> process_environment() {
    std::map<std::string, std::string> env;
    for (char** entry = environ; entry && *entry; ++entry) {
        const std::string pair(*entry);
        const size_t eq = pair.find('=');
        if (eq != std::string::npos)
            env[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return env;
}

promo::log::Level log_level_from(const std::string& name) {
    using promo::log::Level;
    if (name == "debug")
        return Level::debug;
    if (name == "warn")
        return Level::warn;
    if (name == "error")
        return Level::error;
    return Level::info;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-promotion report generator: collects the promoted commit range, filters"
                 " routine commits, computes Tekton pipeline impact, obtains a structured"
                 " summary, and composes an HTML/Markdown report with optional email delivery."};
    app.name("promo-report");

    promo::ConfigSources sources;
    std::string config_file;

    auto opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
            flag, [&sources, key](const std::string& value) { sources.cli[key] = value; }, help);
    };
    auto flag = [&](const std::string& flag_name, const std::string& key,
                    const std::string& help) {
        app.add_flag_callback(
            flag_name, [&sources, key] { sources.cli[key] = "true"; }, help);
    };

    opt("--promotion-type", "promotion-type",
        "development-to-staging or staging-to-production (required)");
    opt("--repo", "repo", "Path to the git working copy (default: current directory)");
    opt("--pipelines-root", "pipelines-root",
        "Pipeline YAML directory, repo-relative or absolute (default: pipelines)");
    opt("--tasks-root", "tasks-root", "Task directory name inside the repo (default: tasks)");
    opt("--web-base-url", "web-base-url",
        "Repository web UI base, e.g. https://github.com/org/repo; enables commit/file links");
    opt("--output-dir", "output-dir",
        "Directory for report.html, report.md, impact.json (default: promotion-report)");
    flag("--send-email", "send-email", "Deliver the report by SMTP");
    flag("--dry-run", "dry-run", "No network access and no marker writes; implies no email");
    opt("--guard-mode", "guard-mode",
        "pre-check (blocking gate, exit 2) or post-report (advisory; default)");
    opt("--soak-days", "soak-days", "Required staging soak time in days (default: 6)");
    opt("--override-parity", "override-parity",
        "Override a parity violation; the reason is recorded in the report");
    opt("--override-soak", "override-soak",
        "Override a soak-time violation; the reason is recorded in the report");
    opt("--override-hotfix", "override-hotfix",
        "Override a hotfix-loss violation; the reason is recorded in the report");
    opt("--backend", "backend",
        "Summarizer backend: remote or deterministic (default: deterministic unless a key file"
        " is configured)");
    opt("--backend-base-url", "backend-base-url",
        "Chat-completion API base URL, e.g. https://api.example.com/v1");
    opt("--backend-model", "backend-model", "Model name for the remote backend");
    opt("--backend-key-file", "backend-key-file",
        "File containing the API key (secrets are only ever read from files)");
    opt("--temperature", "temperature", "Sampling temperature (default: 0.7)");
    opt("--max-output-tokens", "max-output-tokens", "Output token cap (default: 2500)");
    opt("--backend-timeout", "backend-timeout", "Backend request timeout in seconds");
    opt("--smtp-host", "smtp-host", "SMTP server host");
    opt("--smtp-port", "smtp-port", "SMTP server port (default: 25)");
    opt("--smtp-mode", "smtp-mode", "authenticated or relay (default: relay)");
    opt("--smtp-credentials-file", "smtp-credentials-file",
        "File containing \"user:password\" for authenticated SMTP");
    opt("--smtp-sender", "smtp-sender", "Envelope sender address");
    opt("--smtp-recipients", "smtp-recipients", "Comma-separated recipient addresses");
    opt("--smtp-tls", "smtp-tls", "Use STARTTLS (true/false)");
    opt("--smtp-timeout", "smtp-timeout", "SMTP timeout in seconds");
    opt("--branch-development", "branch-development", "Development branch name");
    opt("--branch-staging", "branch-staging", "Staging branch name");
    opt("--branch-production", "branch-production", "Production branch name");
    opt("--self-repo-urls", "self-repo-urls",
        "Comma-separated git URLs that mean \"this repository\" in pipeline task references");
    opt("--generated-at", "generated-at",
        "Pin the report timestamp (ISO 8601) for reproducible artifacts");
    opt("--log-level", "log-level", "debug, info, warn, or error (default: info)");
    app.add_option("--config", config_file, "Flat key=value configuration file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!config_file.empty())
            sources.file = promo::parse_config_file(config_file);
        sources.env = promo::env_config(process_environment());

        const promo::RunConfig config = promo::load_config(sources);
        promo::log::set_level(log_level_from(config.log_level));

        const promo::RunStatus status = promo::run(config);
        return promo::report_status(status);
    } catch (const promo::ConfigInvalid& e) {
        promo::log::error(std::string("configuration error: ") + e.what());
        return 1;
    } catch (const std::exception& e) {
        promo::log::error(std::string("unexpected error: ") + e.what());
        return 1;
    }
}

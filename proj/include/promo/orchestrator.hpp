#pragma once

#include "promo/config.hpp"
#include "promo/smtp.hpp"
#include "promo/summarizer.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace promo {

enum class RunOutcome { report_ok, report_failed_promotion_context_ok, guard_blocked };

struct RunStatus {
    RunOutcome outcome = RunOutcome::report_ok;
    int exit_code = 0;
    std::vector<std::string> messages;
};

// Injection points for tests: backend construction, the wall clock, and the
// SMTP transaction. Defaults are the production implementations.
struct RunDeps {
    std::function<std::unique_ptr<SummarizerBackend>(const RunConfig&)> make_backend;
    std::function<UtcSeconds()> clock;
    std::function<void(const MimeMessage&, const SmtpConfig&)> deliver;
};

// Stage order: guard, collect, filter, extract tasks, load pipelines, compute
// impact (impact.json written immediately), summarize, verify, compose, write
// artifacts, deliver. Failures from summarize onward degrade without a nonzero
// exit; a guard block in pre-check mode exits 2 before any artifact is
// written. No exception escapes.
RunStatus run(const RunConfig& config, const RunDeps& deps = {});

std::string status_line(RunOutcome outcome);

// Prints the final STATUS line and returns the exit code.
int report_status(const RunStatus& status);

} // namespace promo

#include "promo/promotion_guard.hpp"

#include "promo/commit_collector.hpp"
#include "promo/errors.hpp"
#include "promo/log.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace promo {

namespace {

std::string short_hash(const std::string& hash) {
    return hash.size() > 7 ? hash.substr(0, 7) : hash;
}

std::string format_days(double days) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.1f", days);
    return buffer;
}

std::optional<UtcSeconds> marker_entry_time(const GitRepo& repo, const std::string& staging_tip) {
    const std::filesystem::path path = repo.root() / kSoakMarkerPath;
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    try {
        nlohmann::json marker = nlohmann::json::parse(in);
        if (marker.value("staging_tip", std::string{}) != staging_tip) {
            log::warn("soak marker " + path.string() + " records a different staging tip;"
                      " falling back to the committer date");
            return std::nullopt;
        }
        return parse_iso8601(marker.value("entered_at", std::string{}));
    } catch (const nlohmann::json::exception& e) {
        log::warn("soak marker " + path.string() + " is unreadable (" + e.what() +
                  "); falling back to the committer date");
        return std::nullopt;
    }
}

} // namespace

std::string to_string(PromotionType type) {
    return type == PromotionType::development_to_staging ? "development-to-staging"
                                                         : "staging-to-production";
}

std::optional<PromotionType> promotion_type_from_string(const std::string& text) {
    if (text == "development-to-staging" || text == "dev-to-staging")
        return PromotionType::development_to_staging;
    if (text == "staging-to-production" || text == "staging-to-prod")
        return PromotionType::staging_to_production;
    return std::nullopt;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::parity: return "parity";
    case ViolationKind::soak: return "soak";
    case ViolationKind::hotfix_loss: return "hotfix_loss";
    }
    return "unknown";
}

std::optional<Violation> check_parity(const GitRepo& repo, const std::string& staging_ref,
                                      const std::string& production_ref) {
    const std::string staging_tip = repo.rev_parse(staging_ref);
    const std::string production_tip = repo.rev_parse(production_ref);
    if (staging_tip == production_tip)
        return std::nullopt;
    return Violation{ViolationKind::parity,
                     "staging tip " + short_hash(staging_tip) + " differs from production tip " +
                         short_hash(production_tip) +
                         "; staging and production must be in sync before a new promotion",
                     true};
}

SoakStatus read_soak_status(const GitRepo& repo, const std::string& staging_ref, UtcSeconds now,
                            double required_days) {
    const std::string staging_tip = repo.rev_parse(staging_ref);

    SoakStatus status;
    status.required_days = required_days;
    if (auto entered = marker_entry_time(repo, staging_tip)) {
        status.staging_tip_entered_at = *entered;
        status.source = "marker";
    } else {
        const std::string date =
            repo.run({"log", "-1", "--pretty=format:%cI", staging_tip});
        auto parsed = parse_iso8601(date);
        if (!parsed)
            throw SoakTimestampUnavailable("no soak marker and the staging tip committer date '" +
                                           date + "' is unparsable");
        status.staging_tip_entered_at = *parsed;
        status.source = "committer-date";
    }
    status.days_in_staging =
        static_cast<double>(now - status.staging_tip_entered_at) / 86400.0;
    if (status.days_in_staging < 0)
        status.days_in_staging = 0.0;
    return status;
}

std::optional<Violation> check_soak(const GitRepo& repo, const std::string& staging_ref,
                                    UtcSeconds now, double required_days) {
    const SoakStatus status = read_soak_status(repo, staging_ref, now, required_days);
    if (status.days_in_staging >= required_days)
        return std::nullopt;
    return Violation{ViolationKind::soak,
                     "staging content has soaked " + format_days(status.days_in_staging) +
                         " day(s) (" + status.source + "), required at least " +
                         format_days(required_days),
                     true};
}

std::vector<CommitRecord> detect_hotfixes(const GitRepo& repo, const std::string& source_ref,
                                          const std::string& target_ref,
                                          const std::string& web_base_url) {
    // commits in target that source lacks: source..target
    const RangeSpec range = capture_range(repo, target_ref, source_ref);
    return collect_commits(repo, range, web_base_url);
}

void write_soak_marker(const GitRepo& repo, const std::string& staging_tip, UtcSeconds entered_at) {
    const std::filesystem::path path = repo.root() / kSoakMarkerPath;
    std::filesystem::create_directories(path.parent_path());
    nlohmann::ordered_json marker;
    marker["staging_tip"] = staging_tip;
    marker["entered_at"] = format_iso8601_utc(entered_at);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << marker.dump(2) << "\n";
    if (!out)
        throw Error("cannot write soak marker: " + path.string());
    log::info("soak marker written: " + path.string());
}

GuardDecision evaluate(PromotionType type, const GitRepo& repo, const BranchRefs& refs,
                       UtcSeconds now, const std::set<ViolationKind>& overrides,
                       double required_soak_days) {
    GuardDecision decision;

    auto run_check = [&](ViolationKind kind, auto&& check) {
        try {
            check();
        } catch (const std::exception& e) {
            decision.violations.push_back(
                {kind, std::string("check failed, treated as a violation (fail-closed): ") +
                           e.what(),
                 true});
        }
    };

    std::string hotfix_source;
    std::string hotfix_target;
    if (type == PromotionType::development_to_staging) {
        run_check(ViolationKind::parity, [&] {
            if (auto violation = check_parity(repo, refs.staging, refs.production))
                decision.violations.push_back(std::move(*violation));
        });
        hotfix_source = refs.development;
        hotfix_target = refs.staging;
    } else {
        run_check(ViolationKind::soak, [&] {
            if (auto violation = check_soak(repo, refs.staging, now, required_soak_days))
                decision.violations.push_back(std::move(*violation));
        });
        hotfix_source = refs.staging;
        hotfix_target = refs.production;
    }

    run_check(ViolationKind::hotfix_loss, [&] {
        const std::vector<CommitRecord> hotfixes =
            detect_hotfixes(repo, hotfix_source, hotfix_target);
        if (hotfixes.empty())
            return;
        std::string detail = std::to_string(hotfixes.size()) + " commit(s) on " + hotfix_target +
                             " are absent from " + hotfix_source + " and would be lost:";
        const size_t shown = std::min<size_t>(hotfixes.size(), 10);
        for (size_t i = 0; i < shown; ++i)
            detail += " " + short_hash(hotfixes[i].hash) + " (" + hotfixes[i].summary + ")" +
                      (i + 1 < shown ? "," : "");
        if (shown < hotfixes.size())
            detail += " …";
        decision.violations.push_back({ViolationKind::hotfix_loss, std::move(detail), true});
    });

    for (const auto& violation : decision.violations) {
        if (violation.overridable && overrides.count(violation.kind) &&
            std::find(decision.overrides_applied.begin(), decision.overrides_applied.end(),
                      violation.kind) == decision.overrides_applied.end())
            decision.overrides_applied.push_back(violation.kind);
    }
    decision.allowed = std::all_of(
        decision.violations.begin(), decision.violations.end(), [&](const Violation& violation) {
            return std::find(decision.overrides_applied.begin(), decision.overrides_applied.end(),
                             violation.kind) != decision.overrides_applied.end();
        });
    return decision;
}

} // namespace promo

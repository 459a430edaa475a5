#pragma once

#include "promo/commit.hpp"
#include "promo/git_repo.hpp"
#include "promo/time_utils.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace promo {

inline constexpr double kDefaultSoakDays = 6.0;

// Marker written under the repository root when a dev→staging promotion
// succeeds; the primary soak-time source (reflogs do not survive CI checkouts).
inline constexpr const char* kSoakMarkerPath = ".promotion/staging-entered-at.json";

enum class PromotionType { development_to_staging, staging_to_production };

std::string to_string(PromotionType type);
std::optional<PromotionType> promotion_type_from_string(const std::string& text);

enum class ViolationKind { parity, soak, hotfix_loss };

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind{};
    std::string detail;
    bool overridable = true;
};

// allowed is true iff every violation's kind appears in overrides_applied;
// overridden violations stay listed so the report keeps the audit trail.
struct GuardDecision {
    bool allowed = true;
    std::vector<Violation> violations;
    std::vector<ViolationKind> overrides_applied;
};

struct SoakStatus {
    UtcSeconds staging_tip_entered_at = 0;
    double days_in_staging = 0.0;
    double required_days = kDefaultSoakDays;
    std::string source; // "marker" | "committer-date"
};

struct BranchRefs {
    std::string development = "development";
    std::string staging = "staging";
    std::string production = "production";
};

// Violation iff the staging tip differs from the production tip (hash
// equality). Only meaningful before a dev→staging promotion. Throws UnknownRef.
std::optional<Violation> check_parity(const GitRepo& repo, const std::string& staging_ref,
                                      const std::string& production_ref);

// Entry time of the current staging tip: soak marker when present and still
// matching the tip, committer date of the tip otherwise. Throws
// SoakTimestampUnavailable when neither source yields a time (fail-closed).
SoakStatus read_soak_status(const GitRepo& repo, const std::string& staging_ref, UtcSeconds now,
                            double required_days = kDefaultSoakDays);

// Violation iff days_in_staging < required_days; "at least six days" is
// inclusive at exactly 6.0.
std::optional<Violation> check_soak(const GitRepo& repo, const std::string& staging_ref,
                                    UtcSeconds now, double required_days = kDefaultSoakDays);

// Commits reachable from target but not from source — the changes a
// fast-forward/force alignment of target onto source would lose. Hash-based,
// so a cherry-picked twin still counts. Throws UnknownRef.
std::vector<CommitRecord> detect_hotfixes(const GitRepo& repo, const std::string& source_ref,
                                          const std::string& target_ref,
                                          const std::string& web_base_url = {});

void write_soak_marker(const GitRepo& repo, const std::string& staging_tip, UtcSeconds entered_at);

// Runs the checks applicable to the promotion type (parity + hotfix for
// dev→staging, soak + hotfix for staging→prod), folding any check error into a
// blocking violation of that kind. Read-only.
GuardDecision evaluate(PromotionType type, const GitRepo& repo, const BranchRefs& refs,
                       UtcSeconds now, const std::set<ViolationKind>& overrides,
                       double required_soak_days = kDefaultSoakDays);

} // namespace promo

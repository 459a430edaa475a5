#pragma once

#include "promo/promotion_guard.hpp"
#include "promo/semantic_filter.hpp"
#include "promo/smtp.hpp"
#include "promo/summarizer.hpp"
#include "promo/task_catalog.hpp"
#include "promo/time_utils.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace promo {

enum class BackendChoice { deterministic, remote };
enum class GuardMode { pre_check, post_report };

struct OverrideRequest {
    bool enabled = false;
    std::string reason;
};

struct RunConfig {
    PromotionType promotion_type = PromotionType::development_to_staging;
    std::filesystem::path repo_path = ".";
    std::string pipelines_root = "pipelines"; // repo-relative unless absolute
    std::string tasks_root = "tasks";
    std::string web_base_url;
    std::filesystem::path output_dir = "promotion-report";
    bool send_email = false;
    bool dry_run = false;
    GuardMode guard_mode = GuardMode::post_report;
    double soak_days = kDefaultSoakDays;
    OverrideRequest override_parity;
    OverrideRequest override_soak;
    OverrideRequest override_hotfix;

    BackendChoice backend = BackendChoice::deterministic;
    std::string backend_base_url;
    std::string backend_model;
    std::filesystem::path backend_key_file;
    GenerationSettings generation;

    SmtpConfig smtp;
    BranchRefs branches;
    std::set<std::string> self_repo_urls;
    FilterRules filter_rules = FilterRules::defaults();
    TaskLayout task_layout;

    std::optional<std::string> captured_range; // PROMO_COMMIT_RANGE
    std::optional<UtcSeconds> generated_at;    // pinned timestamp for reproducible artifacts
    std::string log_level = "info";

    const std::string& source_ref() const {
        return promotion_type == PromotionType::development_to_staging ? branches.development
                                                                       : branches.staging;
    }
    const std::string& target_ref() const {
        return promotion_type == PromotionType::development_to_staging ? branches.staging
                                                                       : branches.production;
    }
};

// Key-value views of the three configuration layers; keys use the flag
// spelling without dashes prefix (e.g. "smtp-host"). Precedence:
// cli > env > file > built-in default.
struct ConfigSources {
    std::map<std::string, std::string> cli;
    std::map<std::string, std::string> env;
    std::map<std::string, std::string> file;
};

// Flat "key = value" document; '#' starts a comment. Unknown keys are
// rejected so typos cannot silently fall back to defaults.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Reads PROMO_<KEY> variables (dashes become underscores) from the given
// environment. Secret values never travel through here — only file paths do.
std::map<std::string, std::string> env_config(const std::map<std::string, std::string>& environ);

// Merges the layers, validates, and fills defaults. The backend defaults to
// remote when a key file is configured, deterministic otherwise. Throws
// ConfigInvalid with a field-precise message.
RunConfig load_config(const ConfigSources& sources);

} // namespace promo

#include "promo/config.hpp"

#include "promo/errors.hpp"
#include "promo/log.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
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

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "promotion-type", "repo", "pipelines-root", "tasks-root", "web-base-url", "output-dir",
        "send-email", "dry-run", "guard-mode", "soak-days", "override-parity", "override-soak",
        "override-hotfix", "backend", "backend-base-url", "backend-model", "backend-key-file",
        "temperature", "max-output-tokens", "backend-timeout", "smtp-host", "smtp-port",
        "smtp-mode", "smtp-credentials-file", "smtp-sender", "smtp-recipients", "smtp-tls",
        "smtp-timeout", "branch-development", "branch-staging", "branch-production",
        "self-repo-urls", "commit-range", "generated-at", "log-level",
    };
    return keys;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty())
            items.push_back(item);
    }
    return items;
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigInvalid("'" + key + "' must be a boolean, got '" + value + "'");
}

long parse_int(const std::string& key, const std::string& value, long min, long max) {
    errno = 0;
    char* end = nullptr;
    const long parsed = std::strtol(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0' || parsed < min || parsed > max)
        throw ConfigInvalid("'" + key + "' must be an integer in [" + std::to_string(min) + ", " +
                            std::to_string(max) + "], got '" + value + "'");
    return parsed;
}

double parse_double(const std::string& key, const std::string& value, double min, double max) {
    errno = 0;
    char* end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (errno != 0 || end == value.c_str() || *end != '\0' || parsed < min || parsed > max)
        throw ConfigInvalid("'" + key + "' must be a number in [" + std::to_string(min) + ", " +
                            std::to_string(max) + "], got '" + value + "'");
    return parsed;
}

} // namespace

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigInvalid("cannot read config file: " + path.string());

    std::map<std::string, std::string> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#')
            continue;
        const size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid(path.string() + ":" + std::to_string(line_no) +
                                ": expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (!known_keys().count(key))
            throw ConfigInvalid(path.string() + ":" + std::to_string(line_no) +
                                ": unknown configuration key '" + key + "'");
        values[key] = value;
    }
    return values;
}

std::map<std::string, std::string> env_config(const std::map<std::string, std::string>& environ) {
    std::map<std::string, std::string> values;
    for (const auto& [name, value] : environ) {
        if (name.rfind("PROMO_", 0) != 0)
            continue;
        std::string key = name.substr(6);
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
            return c == '_' ? '-' : static_cast<char>(std::tolower(c));
        });
        if (known_keys().count(key)) // unrelated PROMO_* variables are not ours
            values[key] = value;
    }
    return values;
}

RunConfig load_config(const ConfigSources& sources) {
    for (const auto* layer : {&sources.cli, &sources.file})
        for (const auto& [key, value] : *layer)
            if (!known_keys().count(key))
                throw ConfigInvalid("unknown configuration key '" + key + "'");

    auto get = [&](const std::string& key) -> std::optional<std::string> {
        for (const auto* layer : {&sources.cli, &sources.env, &sources.file}) {
            const auto it = layer->find(key);
            if (it != layer->end())
                return it->second;
        }
        return std::nullopt;
    };

    RunConfig config;

    const auto type_text = get("promotion-type");
    if (!type_text)
        throw ConfigInvalid("'promotion-type' is required (development-to-staging or"
                            " staging-to-production)");
    const auto type = promotion_type_from_string(*type_text);
    if (!type)
        throw ConfigInvalid("'promotion-type' must be development-to-staging or"
                            " staging-to-production, got '" +
                            *type_text + "'");
    config.promotion_type = *type;

    if (const auto v = get("repo"))
        config.repo_path = *v;
    if (const auto v = get("pipelines-root"))
        config.pipelines_root = *v;
    if (const auto v = get("tasks-root"))
        config.tasks_root = *v;
    if (const auto v = get("web-base-url"))
        config.web_base_url = *v;
    if (const auto v = get("output-dir"))
        config.output_dir = *v;
    if (const auto v = get("send-email"))
        config.send_email = parse_bool("send-email", *v);
    if (const auto v = get("dry-run"))
        config.dry_run = parse_bool("dry-run", *v);

    if (const auto v = get("guard-mode")) {
        if (*v == "pre-check")
            config.guard_mode = GuardMode::pre_check;
        else if (*v == "post-report")
            config.guard_mode = GuardMode::post_report;
        else
            throw ConfigInvalid("'guard-mode' must be pre-check or post-report, got '" + *v + "'");
    }
    if (const auto v = get("soak-days"))
        config.soak_days = parse_double("soak-days", *v, 0.0, 365.0);

    auto load_override = [&](const char* key, OverrideRequest& request) {
        if (const auto v = get(key)) {
            if (trim(*v).empty())
                throw ConfigInvalid(std::string("'") + key +
                                    "' requires a non-empty reason string");
            request.enabled = true;
            request.reason = trim(*v);
        }
    };
    load_override("override-parity", config.override_parity);
    load_override("override-soak", config.override_soak);
    load_override("override-hotfix", config.override_hotfix);

    if (const auto v = get("backend-key-file"))
        config.backend_key_file = *v;
    if (const auto v = get("backend-base-url"))
        config.backend_base_url = *v;
    if (const auto v = get("backend-model"))
        config.backend_model = *v;

    if (const auto v = get("backend")) {
        if (*v == "remote")
            config.backend = BackendChoice::remote;
        else if (*v == "deterministic")
            config.backend = BackendChoice::deterministic;
        else
            throw ConfigInvalid("'backend' must be remote or deterministic, got '" + *v + "'");
    } else {
        config.backend = config.backend_key_file.empty() ? BackendChoice::deterministic
                                                         : BackendChoice::remote;
    }
    if (config.backend == BackendChoice::remote) {
        if (config.backend_base_url.empty())
            throw ConfigInvalid("'backend-base-url' is required when backend is remote");
        if (config.backend_model.empty())
            throw ConfigInvalid("'backend-model' is required when backend is remote");
        if (config.backend_key_file.empty())
            throw ConfigInvalid("'backend-key-file' is required when backend is remote");
    }

    if (const auto v = get("temperature"))
        config.generation.temperature = parse_double("temperature", *v, 0.0, 2.0);
    if (const auto v = get("max-output-tokens"))
        config.generation.max_output_tokens =
            static_cast<int>(parse_int("max-output-tokens", *v, 1, 1000000));
    if (const auto v = get("backend-timeout"))
        config.generation.timeout_seconds =
            static_cast<int>(parse_int("backend-timeout", *v, 1, 3600));

    if (const auto v = get("smtp-host"))
        config.smtp.host = *v;
    if (const auto v = get("smtp-port"))
        config.smtp.port = static_cast<int>(parse_int("smtp-port", *v, 1, 65535));
    if (const auto v = get("smtp-mode")) {
        if (*v == "authenticated")
            config.smtp.mode = SmtpMode::authenticated;
        else if (*v == "relay" || *v == "unauthenticated-relay")
            config.smtp.mode = SmtpMode::unauthenticated_relay;
        else
            throw ConfigInvalid("'smtp-mode' must be authenticated or relay, got '" + *v + "'");
    }
    if (const auto v = get("smtp-credentials-file"))
        config.smtp.credentials_file = *v;
    if (const auto v = get("smtp-sender"))
        config.smtp.sender = *v;
    if (const auto v = get("smtp-recipients"))
        config.smtp.recipients = split_list(*v);
    if (const auto v = get("smtp-tls"))
        config.smtp.use_tls = parse_bool("smtp-tls", *v);
    if (const auto v = get("smtp-timeout"))
        config.smtp.timeout_seconds = static_cast<int>(parse_int("smtp-timeout", *v, 1, 3600));

    if (const auto v = get("branch-development"))
        config.branches.development = *v;
    if (const auto v = get("branch-staging"))
        config.branches.staging = *v;
    if (const auto v = get("branch-production"))
        config.branches.production = *v;

    if (const auto v = get("self-repo-urls"))
        for (const auto& url : split_list(*v))
            config.self_repo_urls.insert(url);

    if (const auto v = get("commit-range"); v && !trim(*v).empty())
        config.captured_range = trim(*v);

    if (const auto v = get("generated-at")) {
        const auto parsed = parse_iso8601(*v);
        if (!parsed)
            throw ConfigInvalid("'generated-at' must be an ISO 8601 timestamp, got '" + *v + "'");
        config.generated_at = *parsed;
    }

    if (const auto v = get("log-level")) {
        if (*v != "debug" && *v != "info" && *v != "warn" && *v != "error")
            throw ConfigInvalid("'log-level' must be debug, info, warn, or error, got '" + *v +
                                "'");
        config.log_level = *v;
    }

    if (config.dry_run && config.send_email) {
        log::warn("--dry-run suppresses --send-email; no mail will be sent");
        config.send_email = false;
    }
    if (config.send_email) {
        if (config.smtp.host.empty())
            throw ConfigInvalid("'smtp-host' is required when send-email is enabled");
        if (config.smtp.sender.empty())
            throw ConfigInvalid("'smtp-sender' is required when send-email is enabled");
        if (config.smtp.recipients.empty())
            throw ConfigInvalid("'smtp-recipients' must be non-empty when send-email is enabled");
        if (config.smtp.mode == SmtpMode::authenticated && config.smtp.credentials_file.empty())
            throw ConfigInvalid("'smtp-credentials-file' is required for authenticated SMTP");
    }

    return config;
}

} // namespace promo

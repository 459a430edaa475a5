#include "promo/backend_http.hpp"

#include "promo/errors.hpp"
#include "promo/log.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace promo {

namespace {

struct SplitUrl {
    std::string origin;      // scheme://host[:port]
    std::string path_prefix; // leading path, no trailing slash
};

SplitUrl split_base_url(const std::string& base_url) {
    const size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigInvalid("backend base URL must include a scheme: " + base_url);
    const size_t path_start = base_url.find('/', scheme_end + 3);
    SplitUrl split;
    if (path_start == std::string::npos) {
        split.origin = base_url;
    } else {
        split.origin = base_url.substr(0, path_start);
        split.path_prefix = base_url.substr(path_start);
    }
    while (!split.path_prefix.empty() && split.path_prefix.back() == '/')
        split.path_prefix.pop_back();
    return split;
}

} // namespace

std::string read_secret_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigInvalid("secret file not readable: " + path.string());
    std::ostringstream content;
    content << in.rdbuf();
    std::string secret = content.str();
    const size_t begin = secret.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        throw ConfigInvalid("secret file is empty: " + path.string());
    const size_t end = secret.find_last_not_of(" \t\r\n");
    return secret.substr(begin, end - begin + 1);
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty())
        throw ConfigInvalid("http backend requires a base URL");
    if (config_.model.empty())
        throw ConfigInvalid("http backend requires a model name");
    api_key_ = read_secret_file(config_.key_file);
}

std::string HttpChatBackend::complete(const std::string& system_prompt,
                                      const std::string& user_prompt,
                                      const GenerationSettings& settings) {
    const SplitUrl url = split_base_url(config_.base_url);

    nlohmann::json request{
        {"model", config_.model},
        {"messages",
         {{{"role", "system"}, {"content", system_prompt}},
          {{"role", "user"}, {"content", user_prompt}}}},
        {"temperature", settings.temperature},
        {"max_tokens", settings.max_output_tokens},
    };
    const std::string body = request.dump();

    httplib::Client client(url.origin);
    client.set_connection_timeout(settings.timeout_seconds, 0);
    client.set_read_timeout(settings.timeout_seconds, 0);
    client.set_write_timeout(settings.timeout_seconds, 0);
    client.set_bearer_token_auth(api_key_);

    const std::string endpoint = url.path_prefix + "/chat/completions";
    log::debug("backend request to " + url.origin + endpoint +
               " (authorization redacted): " + body);

    httplib::Result result = client.Post(endpoint, body, "application/json");
    if (!result)
        throw BackendUnavailable("backend request to " + url.origin + endpoint +
                                 " failed: " + httplib::to_string(result.error()));
    log::debug("backend response status " + std::to_string(result->status) + ": " + result->body);
    if (result->status == 401 || result->status == 403)
        throw BackendUnavailable("backend rejected credentials (HTTP " +
                                 std::to_string(result->status) + ")");
    if (result->status < 200 || result->status >= 300)
        throw BackendUnavailable("backend returned HTTP " + std::to_string(result->status));

    try {
        const nlohmann::json response = nlohmann::json::parse(result->body);
        const auto& choices = response.at("choices");
        if (!choices.is_array() || choices.empty())
            return {};
        const auto& message = choices.at(0).at("message");
        return message.value("content", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("backend response was not valid chat-completion"
                                             " JSON: ") +
                                 e.what());
    }
}

} // namespace promo

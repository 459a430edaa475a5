#pragma once

#include "promo/summarizer.hpp"

#include <filesystem>
#include <string>

namespace promo {

// Reads a secret from a file, trimming surrounding whitespace. The value never
// appears in logs or error messages. Throws ConfigInvalid when the file is
// missing, unreadable, or empty.
std::string read_secret_file(const std::filesystem::path& path);

struct HttpBackendConfig {
    std::string base_url; // e.g. https://api.example.com/v1
    std::string model;
    std::filesystem::path key_file;
};

// Generic OpenAI-style chat-completion client: POST {base_url}/chat/completions
// with system and user messages, temperature, and max_tokens. Provider-agnostic
// by construction; the API key is read from key_file at startup.
class HttpChatBackend final : public SummarizerBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig config);

    std::string name() const override { return "http"; }
    std::string complete(const std::string& system_prompt, const std::string& user_prompt,
                         const GenerationSettings& settings) override;

private:
    HttpBackendConfig config_;
    std::string api_key_;
};

} // namespace promo

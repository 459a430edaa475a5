#pragma once

#include "promo/report_builder.hpp"
#include "promo/time_utils.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace promo {

enum class SmtpMode { authenticated, unauthenticated_relay };

struct SmtpConfig {
    std::string host;
    int port = 25;
    SmtpMode mode = SmtpMode::unauthenticated_relay;
    std::filesystem::path credentials_file; // single line "user:password"
    std::string sender;
    std::vector<std::string> recipients;
    bool use_tls = false; // STARTTLS after EHLO
    int timeout_seconds = 30;
};

struct MimeMessage {
    std::string subject;
    std::string sender;
    std::vector<std::string> recipients;
    std::string date_rfc5322;
    std::string text_body; // plain-text alternative (the Markdown twin)
    std::string html_body;
};

std::string encode_base64(const std::string& data);

std::string format_rfc5322(UtcSeconds t); // Thu, 13 Aug 2026 09:00:00 +0000

// Subject "[promotion_type] Promotion Report — [date]"; HTML body with the
// Markdown twin as the plain-text alternative.
MimeMessage build_report_email(const PromotionReport& report, const SmtpConfig& config);

// Full RFC 5322 message: multipart/alternative, base64 bodies, RFC 2047
// encoded subject. Deterministic for a fixed message.
std::string render_mime(const MimeMessage& message);

// One SMTP transaction delivering to all recipients. Authenticated mode reads
// "user:password" from credentials_file and fails with SmtpAuthFailed before
// any connection when the file is missing or malformed. Throws
// SmtpConnectFailed / SmtpAuthFailed / SmtpRejected.
void send_email(const MimeMessage& message, const SmtpConfig& config);

} // namespace promo

#include "promo/smtp.hpp"

#include "promo/backend_http.hpp" // read_secret_file
#include "promo/errors.hpp"
#include "promo/log.hpp"

#include <cstring>
#include <ctime>
#include <sstream>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <openssl/err.h>
#include <openssl/ssl.h>

namespace promo {

namespace {

constexpr const char* kBoundary = "=_promo_report_alt";

const char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string wrap_base64(const std::string& b64, size_t width = 76) {
    std::string out;
    for (size_t i = 0; i < b64.size(); i += width) {
        out += b64.substr(i, width);
        out += "\r\n";
    }
    return out;
}

// RFC 2047 encoded-words, split on UTF-8 character boundaries so each word
// stays within the 75-character limit.
std::string encode_subject(const std::string& subject) {
    bool ascii_only = true;
    for (unsigned char c : subject)
        if (c < 32 || c > 126)
            ascii_only = false;
    if (ascii_only && subject.size() <= 70)
        return subject;

    std::vector<std::string> chunks;
    std::string current;
    for (size_t i = 0; i < subject.size();) {
        size_t char_len = 1;
        const auto byte = static_cast<unsigned char>(subject[i]);
        if ((byte & 0xE0) == 0xC0)
            char_len = 2;
        else if ((byte & 0xF0) == 0xE0)
            char_len = 3;
        else if ((byte & 0xF8) == 0xF0)
            char_len = 4;
        if (current.size() + char_len > 42) { // base64(42) = 56 chars + 12 overhead < 75
            chunks.push_back(current);
            current.clear();
        }
        current += subject.substr(i, char_len);
        i += char_len;
    }
    if (!current.empty())
        chunks.push_back(current);

    std::string out;
    for (size_t i = 0; i < chunks.size(); ++i) {
        if (i)
            out += "\r\n "; // folded continuation
        out += "=?UTF-8?B?" + encode_base64(chunks[i]) + "?=";
    }
    return out;
}

struct Reply {
    int code = 0;
    std::string text;
};

// Plain or TLS-wrapped connection with line-oriented SMTP reply parsing.
class SmtpConnection {
public:
    SmtpConnection(const std::string& host, int port, int timeout_seconds) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* results = nullptr;
        const std::string port_text = std::to_string(port);
        if (getaddrinfo(host.c_str(), port_text.c_str(), &hints, &results) != 0 || !results)
            throw SmtpConnectFailed("cannot resolve SMTP host " + host);

        for (addrinfo* entry = results; entry; entry = entry->ai_next) {
            fd_ = socket(entry->ai_family, entry->ai_socktype, entry->ai_protocol);
            if (fd_ < 0)
                continue;
            timeval tv{};
            tv.tv_sec = timeout_seconds;
            setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
            setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
            if (connect(fd_, entry->ai_addr, entry->ai_addrlen) == 0)
                break;
            close(fd_);
            fd_ = -1;
        }
        freeaddrinfo(results);
        if (fd_ < 0)
            throw SmtpConnectFailed("cannot connect to SMTP server " + host + ":" + port_text);
    }

    ~SmtpConnection() {
        if (ssl_) {
            SSL_shutdown(ssl_);
            SSL_free(ssl_);
        }
        if (ctx_)
            SSL_CTX_free(ctx_);
        if (fd_ >= 0)
            close(fd_);
    }

    SmtpConnection(const SmtpConnection&) = delete;
    SmtpConnection& operator=(const SmtpConnection&) = delete;

    void start_tls(const std::string& host) {
        ctx_ = SSL_CTX_new(TLS_client_method());
        if (!ctx_)
            throw SmtpConnectFailed("cannot create TLS context");
        SSL_CTX_set_default_verify_paths(ctx_);
        SSL_CTX_set_verify(ctx_, SSL_VERIFY_PEER, nullptr);
        ssl_ = SSL_new(ctx_);
        if (!ssl_)
            throw SmtpConnectFailed("cannot create TLS session");
        SSL_set_tlsext_host_name(ssl_, host.c_str());
        SSL_set_fd(ssl_, fd_);
        if (SSL_connect(ssl_) != 1)
            throw SmtpConnectFailed("TLS handshake with " + host + " failed");
    }

    void write_all(const std::string& data) {
        size_t sent = 0;
        while (sent < data.size()) {
            ssize_t n;
            if (ssl_)
                n = SSL_write(ssl_, data.data() + sent, static_cast<int>(data.size() - sent));
            else
                n = ::send(fd_, data.data() + sent, data.size() - sent, 0);
            if (n <= 0)
                throw SmtpConnectFailed("SMTP connection lost while sending");
            sent += static_cast<size_t>(n);
        }
    }

    Reply read_reply() {
        Reply reply;
        while (true) {
            const std::string line = read_line();
            if (line.size() < 3)
                throw SmtpConnectFailed("malformed SMTP reply: " + line);
            reply.code = std::atoi(line.substr(0, 3).c_str());
            if (!reply.text.empty())
                reply.text += "; ";
            reply.text += line.size() > 4 ? line.substr(4) : "";
            if (line.size() < 4 || line[3] != '-')
                break; // last line of a (possibly multiline) reply
        }
        return reply;
    }

private:
    std::string read_line() {
        while (true) {
            const size_t eol = buffer_.find("\r\n");
            if (eol != std::string::npos) {
                std::string line = buffer_.substr(0, eol);
                buffer_.erase(0, eol + 2);
                return line;
            }
            char chunk[512];
            ssize_t n;
            if (ssl_)
                n = SSL_read(ssl_, chunk, sizeof chunk);
            else
                n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n <= 0)
                throw SmtpConnectFailed("SMTP connection closed while reading");
            buffer_.append(chunk, static_cast<size_t>(n));
        }
    }

    int fd_ = -1;
    SSL_CTX* ctx_ = nullptr;
    SSL* ssl_ = nullptr;
    std::string buffer_;
};

Reply command(SmtpConnection& conn, const std::string& line, const std::string& redacted_log) {
    log::debug("smtp: > " + redacted_log);
    conn.write_all(line + "\r\n");
    Reply reply = conn.read_reply();
    log::debug("smtp: < " + std::to_string(reply.code) + " " + reply.text);
    return reply;
}

std::string dot_stuff(const std::string& body) {
    std::string out;
    out.reserve(body.size());
    bool at_line_start = true;
    for (size_t i = 0; i < body.size(); ++i) {
        if (at_line_start && body[i] == '.')
            out += '.';
        out += body[i];
        at_line_start = body[i] == '\n';
    }
    return out;
}

} // namespace

std::string encode_base64(const std::string& data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 2 < data.size()) {
        const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                           (static_cast<unsigned char>(data[i + 1]) << 8) |
                           static_cast<unsigned char>(data[i + 2]);
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += kB64Alphabet[v & 63];
        i += 3;
    }
    const size_t rest = data.size() - i;
    if (rest == 1) {
        const unsigned v = static_cast<unsigned char>(data[i]) << 16;
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                           (static_cast<unsigned char>(data[i + 1]) << 8);
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::string format_rfc5322(UtcSeconds t) {
    static const char* days[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
    static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%s, %02d %s %04d %02d:%02d:%02d +0000",
                  days[tm.tm_wday], tm.tm_mday, months[tm.tm_mon], tm.tm_year + 1900, tm.tm_hour,
                  tm.tm_min, tm.tm_sec);
    return buffer;
}

MimeMessage build_report_email(const PromotionReport& report, const SmtpConfig& config) {
    MimeMessage message;
    message.subject = "[" + report.promotion_type + "] Promotion Report — " +
                      format_date_utc(report.generated_at);
    message.sender = config.sender;
    message.recipients = config.recipients;
    message.date_rfc5322 = format_rfc5322(report.generated_at);
    message.text_body = report.markdown;
    message.html_body = report.html;
    return message;
}

std::string render_mime(const MimeMessage& message) {
    std::ostringstream out;
    out << "From: " << message.sender << "\r\n";
    out << "To: ";
    for (size_t i = 0; i < message.recipients.size(); ++i)
        out << (i ? ", " : "") << message.recipients[i];
    out << "\r\n";
    out << "Subject: " << encode_subject(message.subject) << "\r\n";
    if (!message.date_rfc5322.empty())
        out << "Date: " << message.date_rfc5322 << "\r\n";
    out << "MIME-Version: 1.0\r\n";
    out << "Content-Type: multipart/alternative; boundary=\"" << kBoundary << "\"\r\n";
    out << "\r\n";
    out << "--" << kBoundary << "\r\n";
    out << "Content-Type: text/plain; charset=utf-8\r\n";
    out << "Content-Transfer-Encoding: base64\r\n\r\n";
    out << wrap_base64(encode_base64(message.text_body));
    out << "--" << kBoundary << "\r\n";
    out << "Content-Type: text/html; charset=utf-8\r\n";
    out << "Content-Transfer-Encoding: base64\r\n\r\n";
    out << wrap_base64(encode_base64(message.html_body));
    out << "--" << kBoundary << "--\r\n";
    return out.str();
}

void send_email(const MimeMessage& message, const SmtpConfig& config) {
    if (message.recipients.empty())
        throw SmtpRejected("no recipients configured");

    // Resolve credentials before touching the network so a missing file fails
    // fast and without side effects.
    std::string auth_user;
    std::string auth_pass;
    if (config.mode == SmtpMode::authenticated) {
        std::string credentials;
        try {
            credentials = read_secret_file(config.credentials_file);
        } catch (const ConfigInvalid& e) {
            throw SmtpAuthFailed(std::string("cannot load SMTP credentials: ") + e.what());
        }
        const size_t colon = credentials.find(':');
        if (colon == std::string::npos)
            throw SmtpAuthFailed("SMTP credentials file must contain user:password");
        auth_user = credentials.substr(0, colon);
        auth_pass = credentials.substr(colon + 1);
    }

    SmtpConnection conn(config.host, config.port, config.timeout_seconds);
    Reply greeting = conn.read_reply();
    if (greeting.code != 220)
        throw SmtpConnectFailed("unexpected SMTP greeting: " + std::to_string(greeting.code) +
                                " " + greeting.text);

    auto expect = [&](const Reply& reply, int code, const std::string& what) {
        if (reply.code != code)
            throw SmtpRejected(what + " rejected: " + std::to_string(reply.code) + " " +
                               reply.text);
    };

    expect(command(conn, "EHLO promo-report", "EHLO promo-report"), 250, "EHLO");

    if (config.use_tls) {
        const Reply reply = command(conn, "STARTTLS", "STARTTLS");
        if (reply.code != 220)
            throw SmtpConnectFailed("server refused STARTTLS: " + std::to_string(reply.code));
        conn.start_tls(config.host);
        expect(command(conn, "EHLO promo-report", "EHLO promo-report (TLS)"), 250, "EHLO");
    }

    if (config.mode == SmtpMode::authenticated) {
        std::string plain;
        plain += '\0';
        plain += auth_user;
        plain += '\0';
        plain += auth_pass;
        const Reply reply =
            command(conn, "AUTH PLAIN " + encode_base64(plain), "AUTH PLAIN [redacted]");
        if (reply.code != 235)
            throw SmtpAuthFailed("SMTP authentication failed: " + std::to_string(reply.code) +
                                 " " + reply.text);
    }

    expect(command(conn, "MAIL FROM:<" + message.sender + ">", "MAIL FROM:<" + message.sender +
                                                                   ">"),
           250, "MAIL FROM");
    for (const auto& recipient : message.recipients) {
        const Reply reply =
            command(conn, "RCPT TO:<" + recipient + ">", "RCPT TO:<" + recipient + ">");
        if (reply.code != 250 && reply.code != 251)
            throw SmtpRejected("recipient " + recipient + " rejected: " +
                               std::to_string(reply.code) + " " + reply.text);
    }

    const Reply data_go = command(conn, "DATA", "DATA");
    if (data_go.code != 354)
        throw SmtpRejected("DATA rejected: " + std::to_string(data_go.code));

    conn.write_all(dot_stuff(render_mime(message)));
    conn.write_all("\r\n.\r\n");
    const Reply accepted = conn.read_reply();
    if (accepted.code != 250)
        throw SmtpRejected("message rejected after DATA: " + std::to_string(accepted.code) + " " +
                           accepted.text);

    command(conn, "QUIT", "QUIT");
    log::info("email delivered to " + std::to_string(message.recipients.size()) +
              " recipient(s) via " + config.host + ":" + std::to_string(config.port));
}

} // namespace promo

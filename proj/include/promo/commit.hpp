#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace promo {

struct DiffStat {
    std::uint64_t files_changed = 0;
    std::uint64_t insertions = 0;
    std::uint64_t deletions = 0;

    bool operator==(const DiffStat&) const = default;
};

struct CommitRecord {
    std::string hash;    // 40 lowercase hex characters
    std::string summary; // first line of the message, no newline
    std::string body;    // full message
    std::string author_name;
    std::string author_email;
    std::string date; // ISO 8601, author timezone preserved
    int parent_count = 1;
    std::vector<std::string> changed_files; // repository-relative, forward slashes
    DiffStat diffstat;
    std::string url; // <web base>/commit/<hash>
};

// Exactly one of (source_ref+target_ref) or captured_range drives collection;
// captured_range, once set, takes precedence so collection is unaffected by
// branch mutation after capture.
struct RangeSpec {
    std::string source_ref;
    std::string target_ref;
    std::string captured_range;

    std::string range_text() const {
        return captured_range.empty() ? target_ref + ".." + source_ref : captured_range;
    }
};

} // namespace promo

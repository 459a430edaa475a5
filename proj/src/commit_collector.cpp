#include "promo/commit_collector.hpp"

#include "promo/errors.hpp"

#include <algorithm>
#include <sstream>

namespace promo {

namespace {

constexpr char kRecordSep = '\x1e';
constexpr char kFieldSep = '\x1f';

const char* kLogFormat =
    "%x1e%H%x1f%P%x1f%s%x1f%B%x1f%an%x1f%ae%x1f%aI%x1f";

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

int count_tokens(const std::string& text) {
    std::istringstream stream(text);
    std::string token;
    int count = 0;
    while (stream >> token)
        ++count;
    return count;
}

// numstat rename spellings ("dir/{old => new}/f", "old => new") resolve to the
// new path; plain paths pass through.
std::string numstat_path(const std::string& raw) {
    auto brace_open = raw.find('{');
    auto arrow = raw.find(" => ");
    if (arrow == std::string::npos)
        return raw;
    if (brace_open != std::string::npos && brace_open < arrow) {
        auto brace_close = raw.find('}', arrow);
        if (brace_close != std::string::npos) {
            std::string path = raw.substr(0, brace_open) +
                               raw.substr(arrow + 4, brace_close - arrow - 4) +
                               raw.substr(brace_close + 1);
            // "a/{old => }/b" style collapses to doubled separators
            std::string cleaned;
            for (char c : path) {
                if (c == '/' && !cleaned.empty() && cleaned.back() == '/')
                    continue;
                cleaned += c;
            }
            return cleaned;
        }
    }
    return raw.substr(arrow + 4);
}

void parse_numstat(const std::string& block, CommitRecord& record) {
    std::istringstream stream(block);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty())
            continue;
        auto tab1 = line.find('\t');
        if (tab1 == std::string::npos)
            continue;
        auto tab2 = line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos)
            continue;
        const std::string ins = line.substr(0, tab1);
        const std::string del = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const std::string path = numstat_path(line.substr(tab2 + 1));
        record.changed_files.push_back(path);
        record.diffstat.files_changed += 1;
        if (ins != "-")
            record.diffstat.insertions += std::stoull(ins);
        if (del != "-")
            record.diffstat.deletions += std::stoull(del);
    }
}

std::string strip_trailing_whitespace(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' '))
        text.pop_back();
    return text;
}

} // namespace

std::string commit_url(const std::string& web_base_url, const std::string& hash) {
    if (web_base_url.empty())
        return {};
    std::string base = web_base_url;
    while (!base.empty() && base.back() == '/')
        base.pop_back();
    return base + "/commit/" + hash;
}

RangeSpec capture_range(const GitRepo& repo, const std::string& source_ref,
                        const std::string& target_ref) {
    repo.rev_parse(source_ref);
    repo.rev_parse(target_ref);
    RangeSpec spec;
    spec.source_ref = source_ref;
    spec.target_ref = target_ref;
    spec.captured_range = target_ref + ".." + source_ref;
    return spec;
}

std::vector<CommitRecord> collect_commits(const GitRepo& repo, const RangeSpec& range,
                                          const std::string& web_base_url) {
    const std::string range_text = range.range_text();
    if (range_text == "..")
        throw RangeResolutionFailed("range spec is empty");

    auto result = repo.try_run({"log", "--topo-order", "--no-renames",
                                "--diff-merges=first-parent", "--numstat",
                                std::string("--pretty=format:") + kLogFormat, range_text});
    if (result.exit_code != 0)
        throw RangeResolutionFailed("cannot walk range '" + range_text +
                                    "': " + strip_trailing_whitespace(result.err));

    std::vector<CommitRecord> records;
    const auto chunks = split(result.out, kRecordSep);
    for (const auto& chunk : chunks) {
        if (chunk.empty())
            continue;
        auto fields = split(chunk, kFieldSep);
        if (fields.size() != 8)
            throw RangeResolutionFailed("unexpected git log record shape");
        CommitRecord record;
        record.hash = fields[0];
        record.parent_count = count_tokens(fields[1]);
        record.summary = fields[2];
        record.body = strip_trailing_whitespace(fields[3]);
        record.author_name = fields[4];
        record.author_email = fields[5];
        record.date = fields[6];
        parse_numstat(fields[7], record);
        record.url = commit_url(web_base_url, record.hash);
        records.push_back(std::move(record));
    }
    return records;
}

DiffStat compute_diffstat(const GitRepo& repo, const std::string& hash) {
    auto verify = repo.try_run({"rev-parse", "--verify", "--quiet", hash + "^{commit}"});
    if (verify.exit_code != 0)
        throw UnknownCommit("commit not found: " + hash);

    const std::string out = repo.run({"log", "-1", "--no-renames",
                                      "--diff-merges=first-parent", "--numstat",
                                      "--pretty=format:", hash});
    CommitRecord scratch;
    parse_numstat(out, scratch);
    return scratch.diffstat;
}

} // namespace promo

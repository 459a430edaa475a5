#pragma once

#include "promo/commit.hpp"
#include "promo/log.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace testsupport {

std::filesystem::path fixtures_dir();
std::filesystem::path golden_dir();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Unique directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "promo-test");
    ~TempDir();

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Captures every log line emitted while alive; restores the previous sink.
class LogCapture {
public:
    LogCapture();
    ~LogCapture();

    LogCapture(const LogCapture&) = delete;
    LogCapture& operator=(const LogCapture&) = delete;

    const std::vector<std::string>& lines() const { return lines_; }
    std::string joined() const;
    bool contains(const std::string& needle) const;

private:
    std::vector<std::string> lines_;
    promo::log::Sink previous_;
    promo::log::Level previous_level_;
};

struct CommitSpec {
    std::string message;
    std::vector<std::pair<std::string, std::string>> files; // path -> content
    std::vector<std::string> deleted;
    std::string author_name = "Alice Developer";
    std::string author_email = "alice@example.com";
    std::string date; // ISO 8601; empty picks the next slot in a fixed sequence
};

// Scripted git repository for tests. Commit dates and identities are pinned
// so every run produces the same history (not the same hashes across repos,
// but stable within one).
class FixtureRepo {
public:
    explicit FixtureRepo(std::filesystem::path root,
                         const std::string& initial_branch = "development");

    const std::filesystem::path& root() const { return root_; }

    std::string git(const std::vector<std::string>& args,
                    const std::map<std::string, std::string>& extra_env = {}) const;

    void write(const std::string& relative, const std::string& content) const;
    std::string commit(const CommitSpec& spec);
    void branch(const std::string& name) const;
    void checkout(const std::string& name) const;
    std::string merge_no_ff(const std::string& branch, const std::string& message);
    std::string rev(const std::string& ref) const;

    // Moves a branch to a commit without touching the working tree.
    void set_branch(const std::string& name, const std::string& ref) const;

private:
    std::map<std::string, std::string> commit_env(const CommitSpec& spec);

    std::filesystem::path root_;
    int seq_ = 0;
};

// The worked example: three conventional commits by three authors touching
// three task directories (eight files total), with six pipeline definitions
// copied into pipelines/ and branches development/staging/production.
struct WalkthroughRepo {
    std::filesystem::path root;
    std::string base;
    std::string feat_cosign;  // feat(PROJ-1234), 3 files
    std::string fix_publish;  // fix(PROJ-1235), 1 file
    std::string feat_kmods;   // feat(PROJ-1236), 4 files
};

WalkthroughRepo make_walkthrough_repo(const std::filesystem::path& root);

inline constexpr const char* kSelfRepoUrl =
    "https://gitlab.example.com/releng/pipeline-definitions";

// In-memory commit with a stable synthetic hash derived from the index.
promo::CommitRecord synthetic_commit(int index, const std::string& summary,
                                     bool with_url = true);

// Twenty-commit corpora matching the published commit-type distribution at
// its low, mid, and high substantive shares.
enum class CorpusShare { low, mid, high };
std::vector<promo::CommitRecord> distribution_corpus(CorpusShare share);

// 1..max_n commits with a random feat/fix/other mix, newest first.
std::vector<promo::CommitRecord> random_summary_corpus(std::uint64_t seed, std::size_t max_n,
                                                       bool with_urls);

} // namespace testsupport

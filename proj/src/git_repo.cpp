#include "promo/git_repo.hpp"

#include "promo/errors.hpp"

namespace promo {

namespace {

std::string strip_trailing_newline(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
        text.pop_back();
    return text;
}

} // namespace

GitRepo::GitRepo(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::exists(root_))
        throw RepositoryAccessFailed("repository path does not exist: " + root_.string());
}

proc::RunResult GitRepo::try_run(const std::vector<std::string>& args) const {
    std::vector<std::string> argv{"git"};
    argv.insert(argv.end(), args.begin(), args.end());
    proc::RunOptions options;
    options.cwd = root_;
    return proc::run(argv, options);
}

std::string GitRepo::run(const std::vector<std::string>& args) const {
    auto result = try_run(args);
    if (result.exit_code != 0)
        throw GitError("git " + (args.empty() ? std::string() : args.front()) +
                       " failed (exit " + std::to_string(result.exit_code) +
                       "): " + strip_trailing_newline(result.err));
    return result.out;
}

std::string GitRepo::rev_parse(const std::string& ref) const {
    auto result = try_run({"rev-parse", "--verify", "--quiet", ref + "^{commit}"});
    if (result.exit_code != 0)
        throw UnknownRef("ref does not resolve to a commit: " + ref);
    return strip_trailing_newline(result.out);
}

bool GitRepo::ref_exists(const std::string& ref) const {
    return try_run({"rev-parse", "--verify", "--quiet", ref + "^{commit}"}).exit_code == 0;
}

} // namespace promo

#pragma once

#include "promo/process.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace promo {

// Read-only handle to a local git working copy. All access goes through the
// system git executable; nothing here mutates refs or the working tree.
class GitRepo {
public:
    explicit GitRepo(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    // Resolves a ref to a full commit hash. Throws UnknownRef.
    std::string rev_parse(const std::string& ref) const;
    bool ref_exists(const std::string& ref) const;

    // Runs git with the given arguments and returns stdout.
    // Throws GitError when git exits nonzero.
    std::string run(const std::vector<std::string>& args) const;
    proc::RunResult try_run(const std::vector<std::string>& args) const;

private:
    std::filesystem::path root_;
};

} // namespace promo

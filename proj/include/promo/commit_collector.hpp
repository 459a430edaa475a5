#pragma once

#include "promo/commit.hpp"
#include "promo/git_repo.hpp"

#include <string>
#include <vector>

namespace promo {

// Records the textual range "target..source" before any branch mutation, so a
// later collection is unaffected by the promotion push. Throws UnknownRef.
RangeSpec capture_range(const GitRepo& repo, const std::string& source_ref,
                        const std::string& target_ref);

// Returns fully-populated records, newest-first by topology. Merge commits are
// included and diffed against their first parent. Throws RangeResolutionFailed
// when the range cannot be walked.
std::vector<CommitRecord> collect_commits(const GitRepo& repo, const RangeSpec& range,
                                          const std::string& web_base_url);

// Diff of one commit against its first parent (root commits diff against the
// empty tree). Throws UnknownCommit.
DiffStat compute_diffstat(const GitRepo& repo, const std::string& hash);

std::string commit_url(const std::string& web_base_url, const std::string& hash);

} // namespace promo

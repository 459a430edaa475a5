#pragma once

#include "promo/commit.hpp"

#include <string>
#include <vector>

namespace promo {

struct TaskCategory {
    enum class Kind { managed, internal, collectors, other };

    Kind kind = Kind::other;
    std::string text; // directory name as spelled in the path

    bool operator==(const TaskCategory& rhs) const { return text == rhs.text; }
};

TaskCategory task_category_from_dir(std::string dir);

// A Tekton task touched by the promotion. Any file under the task directory
// (tests, docs, scripts) marks the task changed.
struct ChangedTask {
    std::string name;
    TaskCategory category;
    std::string definition_path;      // <root>/<category>/<name>/<name>.yaml
    std::vector<std::string> commits; // newest-first, deduplicated hashes
};

// Directory convention for task definitions. levels counts the path
// components between the root and the task's files: 2 = <category>/<name>,
// 1 = <name> only (category empty).
struct TaskLayout {
    std::string root_dir = "tasks";
    int levels = 2;
};

// Phase 1 of the impact analysis: derives the deduplicated changed-task set
// from commit file paths alone; task YAML content is never read here.
// Result is sorted by category then name.
std::vector<ChangedTask> extract_changed_tasks(const std::vector<CommitRecord>& commits,
                                               const TaskLayout& layout = {});

} // namespace promo

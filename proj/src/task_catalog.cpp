#include "promo/task_catalog.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace promo {

namespace {

std::vector<std::string> path_components(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        std::size_t pos = path.find('/', start);
        if (pos == std::string::npos) {
            parts.push_back(path.substr(start));
            break;
        }
        parts.push_back(path.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

} // namespace

TaskCategory task_category_from_dir(std::string dir) {
    TaskCategory category;
    category.text = std::move(dir);
    if (category.text == "managed")
        category.kind = TaskCategory::Kind::managed;
    else if (category.text == "internal")
        category.kind = TaskCategory::Kind::internal;
    else if (category.text == "collectors")
        category.kind = TaskCategory::Kind::collectors;
    else
        category.kind = TaskCategory::Kind::other;
    return category;
}

std::vector<ChangedTask> extract_changed_tasks(const std::vector<CommitRecord>& commits,
                                               const TaskLayout& layout) {
    // key: (category dir, task name) -> hashes in first-seen (newest-first) order
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> hits;
    std::map<std::pair<std::string, std::string>, std::set<std::string>> seen;

    for (const auto& commit : commits) {
        for (const auto& path : commit.changed_files) {
            auto parts = path_components(path);
            // root + identifying levels + at least one file component
            if (parts.size() < static_cast<std::size_t>(layout.levels) + 2)
                continue;
            if (parts[0] != layout.root_dir)
                continue;
            std::string category_dir = layout.levels == 2 ? parts[1] : std::string();
            std::string name = layout.levels == 2 ? parts[2] : parts[1];
            if (name.empty() || (layout.levels == 2 && category_dir.empty()))
                continue;
            auto key = std::make_pair(category_dir, name);
            if (seen[key].insert(commit.hash).second)
                hits[key].push_back(commit.hash);
        }
    }

    std::vector<ChangedTask> tasks;
    tasks.reserve(hits.size());
    for (auto& [key, hashes] : hits) {
        ChangedTask task;
        task.category = task_category_from_dir(key.first);
        task.name = key.second;
        task.definition_path = layout.root_dir + "/" +
                               (key.first.empty() ? "" : key.first + "/") + task.name + "/" +
                               task.name + ".yaml";
        task.commits = std::move(hashes);
        tasks.push_back(std::move(task));
    }

    std::sort(tasks.begin(), tasks.end(), [](const ChangedTask& a, const ChangedTask& b) {
        if (a.category.text != b.category.text)
            return a.category.text < b.category.text;
        return a.name < b.name;
    });
    return tasks;
}

} // namespace promo

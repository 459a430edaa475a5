#include "promo/pipeline_analyzer.hpp"

#include "promo/errors.hpp"
#include "promo/log.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

namespace promo {

namespace {

bool has_unexpanded_variable(const std::string& text) {
    return text.find("$(") != std::string::npos;
}

std::string param_value(const YAML::Node& params, const std::string& name) {
    if (!params || !params.IsSequence())
        return {};
    for (const auto& param : params) {
        if (param["name"] && param["name"].as<std::string>() == name && param["value"] &&
            param["value"].IsScalar())
            return param["value"].as<std::string>();
    }
    return {};
}

void append_references(const YAML::Node& list, bool in_finally, const std::string& file,
                       std::vector<TaskReference>& out) {
    if (!list || !list.IsSequence())
        return;
    for (const auto& item : list) {
        if (!item.IsMap())
            continue;
        TaskReference ref;
        ref.in_finally = in_finally;
        if (item["name"] && item["name"].IsScalar())
            ref.pipeline_task_name = item["name"].as<std::string>();

        const YAML::Node task_ref = item["taskRef"];
        if (!task_ref)
            continue; // embedded taskSpec or malformed entry: nothing to resolve

        if (task_ref.IsScalar()) {
            ref.mechanism = TaskReference::Mechanism::direct;
            ref.name = task_ref.as<std::string>();
        } else if (task_ref.IsMap()) {
            std::string resolver;
            if (task_ref["resolver"] && task_ref["resolver"].IsScalar())
                resolver = task_ref["resolver"].as<std::string>();
            if (resolver == "git") {
                const YAML::Node params = task_ref["params"];
                ref.path_in_repo = param_value(params, "pathInRepo");
                ref.url = param_value(params, "url");
                ref.revision = param_value(params, "revision");
                if (!ref.path_in_repo.empty()) {
                    ref.mechanism = TaskReference::Mechanism::git_resolver_path;
                } else {
                    ref.mechanism = TaskReference::Mechanism::git_resolver_name;
                    if (task_ref["name"] && task_ref["name"].IsScalar())
                        ref.name = task_ref["name"].as<std::string>();
                    else
                        ref.name = param_value(params, "name");
                    if (ref.name.empty()) {
                        log::warn("pipeline " + file + ": git resolver reference '" +
                                  ref.pipeline_task_name + "' has neither pathInRepo nor name");
                        continue;
                    }
                }
            } else if (!resolver.empty()) {
                // bundle/cluster resolvers are out of analysis scope
                log::debug("pipeline " + file + ": skipping '" + resolver +
                           "' resolver reference '" + ref.pipeline_task_name + "'");
                continue;
            } else if (task_ref["name"] && task_ref["name"].IsScalar()) {
                ref.mechanism = TaskReference::Mechanism::direct;
                ref.name = task_ref["name"].as<std::string>();
            } else {
                continue;
            }
        } else {
            continue;
        }

        if (has_unexpanded_variable(ref.path_in_repo) || has_unexpanded_variable(ref.name))
            log::warn("pipeline " + file + ": reference '" + ref.pipeline_task_name +
                      "' contains an unexpanded variable and will never match");
        out.push_back(std::move(ref));
    }
}

std::string normalized_url(std::string url) {
    while (!url.empty() && url.back() == '/')
        url.pop_back();
    if (url.size() > 4 && url.compare(url.size() - 4, 4, ".git") == 0)
        url.resize(url.size() - 4);
    return url;
}

} // namespace

std::string normalize_repo_path(std::string path) {
    while (path.rfind("./", 0) == 0)
        path.erase(0, 2);
    std::string out;
    out.reserve(path.size());
    for (char c : path) {
        if (c == '/' && !out.empty() && out.back() == '/')
            continue;
        out += c;
    }
    return out;
}

std::vector<PipelineDefinition> load_pipelines(const std::filesystem::path& pipelines_root,
                                               const std::filesystem::path& relative_base) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(pipelines_root))
        throw DirectoryNotFound("pipelines root not found: " + pipelines_root.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(pipelines_root)) {
        if (!entry.is_regular_file())
            continue;
        const auto ext = entry.path().extension();
        if (ext == ".yaml" || ext == ".yml")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<PipelineDefinition> pipelines;
    for (const auto& file : files) {
        const std::string rel = relative_base.empty()
                                    ? file.lexically_normal().generic_string()
                                    : file.lexically_relative(relative_base).generic_string();
        std::vector<YAML::Node> documents;
        try {
            std::ifstream stream(file);
            if (!stream)
                throw RepositoryAccessFailed("cannot open " + file.string());
            documents = YAML::LoadAll(stream);
        } catch (const YAML::Exception& e) {
            log::warn("skipping malformed YAML file " + rel + ": " + e.what());
            continue;
        }

        for (const auto& doc : documents) {
            if (!doc || !doc.IsMap())
                continue;
            const YAML::Node kind = doc["kind"];
            if (!kind || !kind.IsScalar() || kind.as<std::string>() != "Pipeline")
                continue;
            PipelineDefinition pipeline;
            pipeline.file_path = rel;
            try {
                if (doc["metadata"] && doc["metadata"]["name"])
                    pipeline.name = doc["metadata"]["name"].as<std::string>();
                if (pipeline.name.empty()) {
                    log::warn("skipping unnamed Pipeline document in " + rel);
                    continue;
                }
                const YAML::Node spec = doc["spec"];
                if (spec && spec.IsMap()) {
                    append_references(spec["tasks"], false, rel, pipeline.references);
                    append_references(spec["finally"], true, rel, pipeline.references);
                }
            } catch (const YAML::Exception& e) {
                log::warn("skipping malformed Pipeline document in " + rel + ": " + e.what());
                continue;
            }
            pipelines.push_back(std::move(pipeline));
        }
    }
    return pipelines;
}

bool resolve_reference(const TaskReference& ref, const ChangedTask& task,
                       const std::set<std::string>& self_repo_urls) {
    switch (ref.mechanism) {
    case TaskReference::Mechanism::git_resolver_path: {
        if (ref.path_in_repo.empty() || has_unexpanded_variable(ref.path_in_repo))
            return false;
        if (normalize_repo_path(ref.path_in_repo) != normalize_repo_path(task.definition_path))
            return false;
        if (ref.url.empty())
            return true; // no url names this repository implicitly
        const std::string wanted = normalized_url(ref.url);
        return std::any_of(self_repo_urls.begin(), self_repo_urls.end(),
                           [&](const std::string& self) { return normalized_url(self) == wanted; });
    }
    case TaskReference::Mechanism::git_resolver_name:
    case TaskReference::Mechanism::direct:
        if (ref.name.empty() || has_unexpanded_variable(ref.name))
            return false;
        return ref.name == task.name;
    }
    return false;
}

std::string pipeline_display_name(const PipelineDefinition& pipeline,
                                  const std::vector<PipelineDefinition>& all) {
    int same_name = 0;
    for (const auto& candidate : all)
        if (candidate.name == pipeline.name)
            ++same_name;
    if (same_name > 1)
        return pipeline.name + " (" + pipeline.file_path + ")";
    return pipeline.name;
}

ImpactMatrix compute_impact(const std::vector<ChangedTask>& changed,
                            const std::vector<PipelineDefinition>& pipelines,
                            const std::set<std::string>& self_repo_urls) {
    ImpactMatrix matrix;
    for (const auto& task : changed) {
        ImpactEntry entry;
        entry.task = task;
        for (const auto& pipeline : pipelines) {
            for (const auto& ref : pipeline.references) {
                if (resolve_reference(ref, task, self_repo_urls)) {
                    entry.pipelines.insert(pipeline_display_name(pipeline, pipelines));
                    break;
                }
            }
        }
        entry.pipeline_count = entry.pipelines.size();
        matrix.entries.push_back(std::move(entry));
    }

    std::sort(matrix.entries.begin(), matrix.entries.end(),
              [](const ImpactEntry& a, const ImpactEntry& b) {
                  if (a.pipeline_count != b.pipeline_count)
                      return a.pipeline_count > b.pipeline_count;
                  return a.task.name < b.task.name;
              });
    return matrix;
}

std::string impact_to_json(const ImpactMatrix& matrix) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& entry : matrix.entries) {
        nlohmann::ordered_json item;
        item["task"] = entry.task.name;
        item["category"] = entry.task.category.text;
        item["definition_path"] = entry.task.definition_path;
        item["pipelines"] = entry.pipelines; // std::set iterates sorted
        item["pipeline_count"] = entry.pipeline_count;
        item["commits"] = entry.task.commits;
        entries.push_back(std::move(item));
    }
    return entries.dump(2) + "\n";
}

} // namespace promo

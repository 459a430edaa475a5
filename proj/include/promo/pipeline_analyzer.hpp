#pragma once

#include "promo/task_catalog.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace promo {

// One task reference inside a pipeline, with the mechanism Tekton uses to
// resolve it at runtime.
struct TaskReference {
    enum class Mechanism { git_resolver_path, git_resolver_name, direct };

    Mechanism mechanism = Mechanism::direct;
    std::string pipeline_task_name; // the step's name within the pipeline
    std::string name;               // referenced task name (name-based mechanisms)
    std::string path_in_repo;       // git resolver pathInRepo parameter
    std::string url;                // git resolver url parameter, empty = self
    std::string revision;           // git resolver revision, ignored for matching
    bool in_finally = false;
};

struct PipelineDefinition {
    std::string name;      // metadata.name
    std::string file_path; // repository-relative path of the defining file
    std::vector<TaskReference> references; // document order, spec.tasks before spec.finally
};

// Parses every *.yaml / *.yml under the root as a multi-document stream and
// keeps documents with kind "Pipeline". Malformed files are skipped with a
// warning; they never abort the load. Throws DirectoryNotFound.
// file_path is recorded relative to relative_base when given.
std::vector<PipelineDefinition> load_pipelines(const std::filesystem::path& pipelines_root,
                                               const std::filesystem::path& relative_base = {});

// Strips a leading "./" and collapses duplicate separators; comparison stays
// case-sensitive.
std::string normalize_repo_path(std::string path);

// True when the reference resolves to the changed task. A git resolver url
// naming a foreign repository never matches; an absent url is assumed
// self-referential. References containing an unexpanded "$(" variable never
// match.
bool resolve_reference(const TaskReference& ref, const ChangedTask& task,
                       const std::set<std::string>& self_repo_urls);

struct ImpactEntry {
    ChangedTask task;
    std::set<std::string> pipelines; // display names (disambiguated on collision)
    std::size_t pipeline_count = 0;
};

// Entries sorted descending by pipeline_count, then ascending by task name.
struct ImpactMatrix {
    std::vector<ImpactEntry> entries;
};

ImpactMatrix compute_impact(const std::vector<ChangedTask>& changed,
                            const std::vector<PipelineDefinition>& pipelines,
                            const std::set<std::string>& self_repo_urls);

// Display name for a pipeline in the matrix; disambiguates duplicate resource
// names across files as "name (file_path)".
std::string pipeline_display_name(const PipelineDefinition& pipeline,
                                  const std::vector<PipelineDefinition>& all);

// JSON document with stable key order: task, category, definition_path,
// pipelines (sorted), pipeline_count, commits.
std::string impact_to_json(const ImpactMatrix& matrix);

} // namespace promo

#include "promo/pipeline_analyzer.hpp"

#include "promo/errors.hpp"
#include "support/impact_oracle.hpp"
#include "support/test_support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>

using namespace promo;
using testsupport::kSelfRepoUrl;

namespace {

ChangedTask managed_task(const std::string& name) {
    ChangedTask task;
    task.name = name;
    task.category = task_category_from_dir("managed");
    task.definition_path = "tasks/managed/" + name + "/" + name + ".yaml";
    task.commits = {std::string(40, 'a')};
    return task;
}

const PipelineDefinition* find_pipeline(const std::vector<PipelineDefinition>& all,
                                        const std::string& name) {
    for (const auto& pipeline : all)
        if (pipeline.name == name) return &pipeline;
    return nullptr;
}

std::vector<PipelineDefinition> load_fixture_pipelines() {
    auto dir = testsupport::fixtures_dir() / "pipelines";
    return load_pipelines(dir, testsupport::fixtures_dir());
}

} // namespace

TEST_CASE("normalize_repo_path strips ./ and duplicate separators") {
    CHECK(normalize_repo_path("tasks/managed/t/t.yaml") == "tasks/managed/t/t.yaml");
    CHECK(normalize_repo_path("./tasks/managed/t/t.yaml") == "tasks/managed/t/t.yaml");
    CHECK(normalize_repo_path("tasks//managed/t/t.yaml") == "tasks/managed/t/t.yaml");
    // Comparison stays case-sensitive.
    CHECK(normalize_repo_path("Tasks/managed/t/t.yaml") != "tasks/managed/t/t.yaml");
}

TEST_CASE("resolve_reference truth table across the three mechanisms") {
    const std::set<std::string> self{kSelfRepoUrl};
    const auto task = managed_task("sign-image-cosign");

    TaskReference path_ref;
    path_ref.mechanism = TaskReference::Mechanism::git_resolver_path;
    path_ref.path_in_repo = "tasks/managed/sign-image-cosign/sign-image-cosign.yaml";

    SUBCASE("path match with absent url is self-referential") {
        CHECK(resolve_reference(path_ref, task, self));
    }
    SUBCASE("path match with self url in any decoration") {
        for (const char* url : {"https://gitlab.example.com/releng/pipeline-definitions",
                                "https://gitlab.example.com/releng/pipeline-definitions.git",
                                "https://gitlab.example.com/releng/pipeline-definitions/"}) {
            path_ref.url = url;
            CAPTURE(url);
            CHECK(resolve_reference(path_ref, task, self));
        }
    }
    SUBCASE("foreign url never matches even on identical path text") {
        path_ref.url = "https://gitlab.example.com/other-team/shared-tasks";
        CHECK_FALSE(resolve_reference(path_ref, task, self));
    }
    SUBCASE("path mismatch") {
        path_ref.path_in_repo = "tasks/managed/sign-image-cosign/tests/test.yaml";
        CHECK_FALSE(resolve_reference(path_ref, task, self));
    }
    SUBCASE("normalized path spellings match") {
        path_ref.path_in_repo = "./tasks/managed/sign-image-cosign/sign-image-cosign.yaml";
        CHECK(resolve_reference(path_ref, task, self));
    }
    SUBCASE("unexpanded variables never match") {
        path_ref.path_in_repo = "$(params.task-path)";
        CHECK_FALSE(resolve_reference(path_ref, task, self));
    }
    SUBCASE("revision is ignored for matching") {
        path_ref.revision = "$(params.revision)";
        CHECK(resolve_reference(path_ref, task, self));
    }

    TaskReference name_ref;
    name_ref.mechanism = TaskReference::Mechanism::git_resolver_name;
    name_ref.name = "sign-image-cosign";

    SUBCASE("git resolver name matches exactly") {
        CHECK(resolve_reference(name_ref, task, self));
        name_ref.name = "sign-image"; // prefix of the task name, not the task
        CHECK_FALSE(resolve_reference(name_ref, task, self));
        name_ref.name = "$(params.task-name)";
        CHECK_FALSE(resolve_reference(name_ref, task, self));
    }

    TaskReference direct_ref;
    direct_ref.mechanism = TaskReference::Mechanism::direct;
    direct_ref.name = "sign-image-cosign";

    SUBCASE("direct reference matches exactly") {
        CHECK(resolve_reference(direct_ref, task, self));
        direct_ref.name = "sign-image-cosign-v2";
        CHECK_FALSE(resolve_reference(direct_ref, task, self));
        direct_ref.name = "";
        CHECK_FALSE(resolve_reference(direct_ref, task, self));
    }
}

TEST_CASE("load_pipelines parses the fixture set") {
    auto pipelines = load_fixture_pipelines();
    REQUIRE(pipelines.size() == 6); // the Task document in advisories.yaml is not a pipeline

    std::vector<std::string> names;
    for (const auto& pipeline : pipelines) names.push_back(pipeline.name);
    std::sort(names.begin(), names.end());
    CHECK(names == std::vector<std::string>{"advisories", "fbc-release",
                                            "push-disk-images-to-cdn", "push-to-external-registry",
                                            "push-to-registry", "rpm-advisories"});

    const auto* fbc = find_pipeline(pipelines, "fbc-release");
    REQUIRE(fbc != nullptr);
    CHECK(fbc->file_path == "pipelines/fbc-release.yaml");
    REQUIRE(fbc->references.size() == 4);
    CHECK(fbc->references[0].mechanism == TaskReference::Mechanism::direct);
    CHECK(fbc->references[0].name == "verify-enterprise-contract");
    CHECK(fbc->references[1].mechanism == TaskReference::Mechanism::git_resolver_path);
    CHECK(fbc->references[1].path_in_repo ==
          "tasks/managed/sign-image-cosign/sign-image-cosign.yaml");
    CHECK(fbc->references[1].url ==
          "https://gitlab.example.com/releng/pipeline-definitions.git");
    CHECK(fbc->references[1].revision == "production");
    CHECK_FALSE(fbc->references[1].in_finally);
    CHECK(fbc->references[2].mechanism == TaskReference::Mechanism::direct);
    CHECK(fbc->references[2].name == "publish-repository");
    CHECK(fbc->references[3].in_finally); // the cleanup reference
    CHECK(fbc->references[3].mechanism == TaskReference::Mechanism::git_resolver_path);

    const auto* registry = find_pipeline(pipelines, "push-to-registry");
    REQUIRE(registry != nullptr);
    REQUIRE(registry->references.size() == 3);
    CHECK(registry->references[1].mechanism == TaskReference::Mechanism::git_resolver_name);
    CHECK(registry->references[1].name == "sign-image-cosign");
    CHECK(registry->references[2].mechanism == TaskReference::Mechanism::git_resolver_path);
    CHECK(registry->references[2].url.empty()); // self-referential by omission

    // Bundle and cluster resolver references are outside the analysis and
    // must not even be recorded.
    const auto* advisories = find_pipeline(pipelines, "advisories");
    REQUIRE(advisories != nullptr);
    CHECK(advisories->references.size() == 2);
    const auto* rpm = find_pipeline(pipelines, "rpm-advisories");
    REQUIRE(rpm != nullptr);
    CHECK(rpm->references.size() == 2);
    CHECK(rpm->references[1].in_finally);
}

TEST_CASE("load_pipelines skips malformed files with a warning") {
    testsupport::LogCapture capture;
    auto pipelines = load_pipelines(testsupport::fixtures_dir() / "pipelines-mixed");
    REQUIRE(pipelines.size() == 1);
    CHECK(pipelines[0].name == "survivor");
    CHECK(capture.contains("broken.yaml"));
}

TEST_CASE("load_pipelines rejects a missing directory") {
    CHECK_THROWS_AS(load_pipelines(testsupport::fixtures_dir() / "no-such-dir"),
                    DirectoryNotFound);
}

TEST_CASE("the fixture walkthrough yields the published impact matrix") {
    auto pipelines = load_fixture_pipelines();
    std::vector<ChangedTask> changed = {
        managed_task("publish-repository"),
        managed_task("sign-image-cosign"),
        managed_task("sign-kmods"),
    };
    auto matrix = compute_impact(changed, pipelines, {kSelfRepoUrl});

    REQUIRE(matrix.entries.size() == 3);
    CHECK(matrix.entries[0].task.name == "sign-image-cosign");
    CHECK(matrix.entries[0].pipeline_count == 5);
    CHECK(matrix.entries[0].pipelines ==
          std::set<std::string>{"advisories", "fbc-release", "push-to-external-registry",
                                "push-to-registry", "rpm-advisories"});
    CHECK(matrix.entries[1].task.name == "publish-repository");
    CHECK(matrix.entries[1].pipeline_count == 3);
    CHECK(matrix.entries[1].pipelines ==
          std::set<std::string>{"fbc-release", "push-to-external-registry", "push-to-registry"});
    CHECK(matrix.entries[2].task.name == "sign-kmods");
    CHECK(matrix.entries[2].pipelines == std::set<std::string>{"push-disk-images-to-cdn"});
}

TEST_CASE("tasks with no referencing pipeline keep a zero-count row") {
    auto pipelines = load_fixture_pipelines();
    auto matrix = compute_impact({managed_task("unreferenced-task")}, pipelines, {kSelfRepoUrl});
    REQUIRE(matrix.entries.size() == 1);
    CHECK(matrix.entries[0].pipeline_count == 0);
    CHECK(matrix.entries[0].pipelines.empty());
}

TEST_CASE("duplicate pipeline resource names are disambiguated by file path") {
    PipelineDefinition a;
    a.name = "release";
    a.file_path = "pipelines/a/release.yaml";
    PipelineDefinition b = a;
    b.file_path = "pipelines/b/release.yaml";
    PipelineDefinition c;
    c.name = "unique";
    c.file_path = "pipelines/unique.yaml";
    std::vector<PipelineDefinition> all{a, b, c};

    CHECK(pipeline_display_name(all[0], all) == "release (pipelines/a/release.yaml)");
    CHECK(pipeline_display_name(all[1], all) == "release (pipelines/b/release.yaml)");
    CHECK(pipeline_display_name(all[2], all) == "unique");

    TaskReference ref;
    ref.mechanism = TaskReference::Mechanism::direct;
    ref.name = "sign-kmods";
    all[0].references.push_back(ref);
    all[1].references.push_back(ref);
    auto matrix = compute_impact({managed_task("sign-kmods")}, all, {});
    REQUIRE(matrix.entries.size() == 1);
    CHECK(matrix.entries[0].pipelines ==
          std::set<std::string>{"release (pipelines/a/release.yaml)",
                                "release (pipelines/b/release.yaml)"});
    CHECK(matrix.entries[0].pipeline_count == 2);
}

TEST_CASE("impact_to_json keeps the documented key order") {
    auto task = managed_task("sign-kmods");
    task.commits = {std::string(40, 'b')};
    ImpactMatrix matrix;
    ImpactEntry entry;
    entry.task = task;
    entry.pipelines = {"push-disk-images-to-cdn"};
    entry.pipeline_count = 1;
    matrix.entries.push_back(entry);

    const std::string expected = std::string("[\n") +
        "  {\n"
        "    \"task\": \"sign-kmods\",\n"
        "    \"category\": \"managed\",\n"
        "    \"definition_path\": \"tasks/managed/sign-kmods/sign-kmods.yaml\",\n"
        "    \"pipelines\": [\n"
        "      \"push-disk-images-to-cdn\"\n"
        "    ],\n"
        "    \"pipeline_count\": 1,\n"
        "    \"commits\": [\n"
        "      \"" + std::string(40, 'b') + "\"\n"
        "    ]\n"
        "  }\n"
        "]\n";
    CHECK(impact_to_json(matrix) == expected);

    // And it parses back to the same content.
    auto parsed = nlohmann::json::parse(impact_to_json(matrix));
    REQUIRE(parsed.is_array());
    CHECK(parsed[0]["pipeline_count"] == 1);
}

TEST_CASE("compute_impact agrees with the brute-force oracle on random corpora") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto scenario = testsupport::random_impact_case(seed);
        auto actual = compute_impact(scenario.tasks, scenario.pipelines, scenario.self_urls);
        auto expected = testsupport::brute_force_impact(scenario.tasks, scenario.pipelines,
                                                        scenario.self_urls);
        CAPTURE(seed);
        CAPTURE(testsupport::describe(actual));
        CAPTURE(testsupport::describe(expected));
        CHECK(testsupport::same_matrix(actual, expected));
    }
}

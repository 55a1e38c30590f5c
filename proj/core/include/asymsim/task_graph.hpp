#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace asymsim {

enum class TaskKind { Potrf, Trsm, Syrk, Gemm, Generic };

std::string_view to_string(TaskKind kind);
TaskKind task_kind_from_string(std::string_view name);

using TaskId = std::int64_t;

struct Task {
    TaskId id = 0;
    TaskKind kind = TaskKind::Generic;
    double flops = 0.0;
    std::string label;
};

// Directed acyclic graph of tasks. Tasks keep insertion order, which the
// simulator uses as the canonical order for readying same-instant tasks.
// Edges are deduplicated; endpoints must exist when the edge is added.
class TaskGraph {
public:
    TaskId add_task(TaskKind kind, double flops, std::string label = {});
    void add_task(Task task);
    void add_edge(TaskId producer, TaskId consumer);

    std::size_t task_count() const { return tasks_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<Task>& tasks() const { return tasks_; }
    bool has_task(TaskId id) const { return index_.count(id) != 0; }
    const Task& task(TaskId id) const;
    std::size_t position(TaskId id) const;

    std::span<const TaskId> successors(TaskId id) const;
    std::span<const TaskId> predecessors(TaskId id) const;
    std::size_t in_degree(TaskId id) const { return predecessors(id).size(); }
    std::size_t out_degree(TaskId id) const { return successors(id).size(); }

    // Edges sorted by (producer, consumer), for serialization and equality.
    std::vector<std::pair<TaskId, TaskId>> sorted_edges() const;

    // Kahn's algorithm. Throws ParseError naming the stuck tasks on a cycle.
    std::vector<TaskId> topological_order() const;

    // Structural checks beyond what add_* already enforces: acyclicity,
    // finite non-negative flops.
    void validate() const;

    double total_flops() const;

    bool operator==(const TaskGraph& other) const;

private:
    std::size_t index_of(TaskId id, const char* what) const;

    std::vector<Task> tasks_;
    std::unordered_map<TaskId, std::size_t> index_;
    std::vector<std::vector<TaskId>> succ_;
    std::vector<std::vector<TaskId>> pred_;
    std::size_t edge_count_ = 0;
    TaskId next_id_ = 0;
};

// JSON interchange:
//   {"tasks": [{"id":0,"kind":"POTRF","flops":1.0,"label":"0,0"}, ...],
//    "edges": [[0,1], ...]}
TaskGraph dag_from_json_string(std::string_view text);
std::string dag_to_json_string(const TaskGraph& graph);
TaskGraph load_dag(const std::filesystem::path& file);
void save_dag(const TaskGraph& graph, const std::filesystem::path& file);

} // namespace asymsim

#include "asymsim/task_graph.hpp"

#include "asymsim/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace asymsim {

std::string_view to_string(TaskKind kind) {
    switch (kind) {
    case TaskKind::Potrf: return "POTRF";
    case TaskKind::Trsm: return "TRSM";
    case TaskKind::Syrk: return "SYRK";
    case TaskKind::Gemm: return "GEMM";
    case TaskKind::Generic: return "GENERIC";
    }
    throw ConfigError("invalid task kind value");
}

TaskKind task_kind_from_string(std::string_view name) {
    if (name == "POTRF") return TaskKind::Potrf;
    if (name == "TRSM") return TaskKind::Trsm;
    if (name == "SYRK") return TaskKind::Syrk;
    if (name == "GEMM") return TaskKind::Gemm;
    if (name == "GENERIC") return TaskKind::Generic;
    throw ParseError("unknown task kind \"" + std::string(name) + "\"");
}

std::size_t TaskGraph::index_of(TaskId id, const char* what) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw ParseError(std::string(what) + ": unknown task id " + std::to_string(id));
    return it->second;
}

TaskId TaskGraph::add_task(TaskKind kind, double flops, std::string label) {
    Task t;
    t.id = next_id_;
    t.kind = kind;
    t.flops = flops;
    t.label = std::move(label);
    add_task(std::move(t));
    return tasks_.back().id;
}

void TaskGraph::add_task(Task task) {
    if (index_.count(task.id))
        throw ParseError("duplicate task id " + std::to_string(task.id));
    if (!std::isfinite(task.flops) || task.flops < 0.0)
        throw ParseError("task " + std::to_string(task.id) + ": flops must be finite and non-negative");
    index_.emplace(task.id, tasks_.size());
    next_id_ = std::max(next_id_, task.id + 1);
    tasks_.push_back(std::move(task));
    succ_.emplace_back();
    pred_.emplace_back();
}

void TaskGraph::add_edge(TaskId producer, TaskId consumer) {
    std::size_t p = index_of(producer, "edge");
    std::size_t c = index_of(consumer, "edge");
    if (producer == consumer)
        throw ParseError("cycle detected: task " + std::to_string(producer) + " depends on itself");
    auto& out = succ_[p];
    if (std::find(out.begin(), out.end(), consumer) != out.end())
        return;
    out.push_back(consumer);
    pred_[c].push_back(producer);
    ++edge_count_;
}

const Task& TaskGraph::task(TaskId id) const {
    return tasks_[index_of(id, "lookup")];
}

std::size_t TaskGraph::position(TaskId id) const {
    return index_of(id, "lookup");
}

std::span<const TaskId> TaskGraph::successors(TaskId id) const {
    return succ_[index_of(id, "lookup")];
}

std::span<const TaskId> TaskGraph::predecessors(TaskId id) const {
    return pred_[index_of(id, "lookup")];
}

std::vector<std::pair<TaskId, TaskId>> TaskGraph::sorted_edges() const {
    std::vector<std::pair<TaskId, TaskId>> edges;
    edges.reserve(edge_count_);
    for (std::size_t i = 0; i < tasks_.size(); ++i)
        for (TaskId consumer : succ_[i])
            edges.emplace_back(tasks_[i].id, consumer);
    std::sort(edges.begin(), edges.end());
    return edges;
}

std::vector<TaskId> TaskGraph::topological_order() const {
    std::vector<std::size_t> in_deg(tasks_.size());
    for (std::size_t i = 0; i < tasks_.size(); ++i)
        in_deg[i] = pred_[i].size();

    std::vector<TaskId> order;
    order.reserve(tasks_.size());
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < tasks_.size(); ++i)
        if (in_deg[i] == 0)
            frontier.push_back(i);

    // Insertion-order frontier keeps the result stable across runs.
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        std::size_t i = frontier[head];
        order.push_back(tasks_[i].id);
        for (TaskId consumer : succ_[i]) {
            std::size_t c = index_.at(consumer);
            if (--in_deg[c] == 0)
                frontier.push_back(c);
        }
    }

    if (order.size() != tasks_.size()) {
        std::ostringstream msg;
        msg << "cycle detected: tasks";
        for (std::size_t i = 0; i < tasks_.size(); ++i)
            if (in_deg[i] != 0)
                msg << ' ' << tasks_[i].id;
        msg << " never become ready";
        throw ParseError(msg.str());
    }
    return order;
}

void TaskGraph::validate() const {
    (void)topological_order();
}

double TaskGraph::total_flops() const {
    double sum = 0.0;
    for (const Task& t : tasks_)
        sum += t.flops;
    return sum;
}

bool TaskGraph::operator==(const TaskGraph& other) const {
    if (tasks_.size() != other.tasks_.size() || edge_count_ != other.edge_count_)
        return false;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        const Task& a = tasks_[i];
        const Task& b = other.tasks_[i];
        if (a.id != b.id || a.kind != b.kind || a.flops != b.flops || a.label != b.label)
            return false;
    }
    return sorted_edges() == other.sorted_edges();
}

namespace {

TaskGraph dag_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("tasks") || !j["tasks"].is_array())
        throw ParseError("dag file: expected an object with a \"tasks\" array");
    TaskGraph g;
    for (const auto& jt : j["tasks"]) {
        Task t;
        if (!jt.contains("id") || !jt["id"].is_number_integer())
            throw ParseError("dag file: task without an integer \"id\"");
        t.id = jt["id"].get<TaskId>();
        if (!jt.contains("kind") || !jt["kind"].is_string())
            throw ParseError("dag file: task " + std::to_string(t.id) + " has no \"kind\"");
        t.kind = task_kind_from_string(jt["kind"].get<std::string>());
        if (!jt.contains("flops") || !jt["flops"].is_number())
            throw ParseError("dag file: task " + std::to_string(t.id) + " has no numeric \"flops\"");
        t.flops = jt["flops"].get<double>();
        if (jt.contains("label"))
            t.label = jt["label"].get<std::string>();
        g.add_task(std::move(t));
    }
    if (j.contains("edges")) {
        if (!j["edges"].is_array())
            throw ParseError("dag file: \"edges\" must be an array of [producer, consumer] pairs");
        for (const auto& je : j["edges"]) {
            if (!je.is_array() || je.size() != 2)
                throw ParseError("dag file: \"edges\" must be an array of [producer, consumer] pairs");
            g.add_edge(je[0].get<TaskId>(), je[1].get<TaskId>());
        }
    }
    g.validate();
    return g;
}

} // namespace

TaskGraph dag_from_json_string(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ParseError("dag file: not valid JSON");
    return dag_from_json(j);
}

std::string dag_to_json_string(const TaskGraph& graph) {
    nlohmann::ordered_json j;
    j["tasks"] = nlohmann::ordered_json::array();
    for (const Task& t : graph.tasks()) {
        nlohmann::ordered_json jt;
        jt["id"] = t.id;
        jt["kind"] = to_string(t.kind);
        jt["flops"] = t.flops;
        jt["label"] = t.label;
        j["tasks"].push_back(std::move(jt));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [p, c] : graph.sorted_edges())
        j["edges"].push_back({p, c});
    return j.dump(2) + "\n";
}

TaskGraph load_dag(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ParseError("cannot open dag file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return dag_from_json_string(buf.str());
}

void save_dag(const TaskGraph& graph, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out)
        throw SimulationError("cannot write dag file " + file.string());
    out << dag_to_json_string(graph);
    if (!out)
        throw SimulationError("failed writing dag file " + file.string());
}

} // namespace asymsim

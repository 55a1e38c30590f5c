#include "asymsim/cholesky.hpp"

#include "asymsim/errors.hpp"

#include <map>
#include <string>
#include <vector>

namespace asymsim {

void CholeskySpec::validate() const {
    if (matrix_dim <= 0)
        throw ConfigError("m must be positive");
    if (block_dim <= 0)
        throw ConfigError("b must be positive");
    if (matrix_dim % block_dim != 0)
        throw ConfigError("b must divide m (m=" + std::to_string(matrix_dim) +
                          ", b=" + std::to_string(block_dim) + ")");
}

double task_flops(TaskKind kind, int block_dim, FlopAccounting accounting) {
    if (block_dim <= 0)
        throw ConfigError("b must be positive");
    const double b = block_dim;
    const bool exact = accounting == FlopAccounting::Exact;
    switch (kind) {
    case TaskKind::Potrf:
        return exact ? b * b * b / 3.0 + b * b / 2.0 + b / 6.0 : b * b * b / 3.0;
    case TaskKind::Trsm:
        return b * b * b;
    case TaskKind::Syrk:
        return exact ? b * b * b + b * b : b * b * b;
    case TaskKind::Gemm:
        return 2.0 * b * b * b;
    case TaskKind::Generic:
        break;
    }
    throw ConfigError("no flop formula for GENERIC tasks; set flops explicitly");
}

namespace {

struct BlockAccess {
    TaskId task;
    bool write;
};

class ConflictTracker {
public:
    // Records one task touching a set of blocks and returns edges from every
    // earlier task whose access to a shared block conflicts (either side writes).
    void record(TaskGraph& g, TaskId task,
                const std::vector<std::pair<std::pair<int, int>, bool>>& accesses) {
        for (const auto& [block, write] : accesses) {
            auto& hist = history_[block];
            for (const BlockAccess& prev : hist)
                if (prev.write || write)
                    g.add_edge(prev.task, task);
            hist.push_back({task, write});
        }
    }

private:
    std::map<std::pair<int, int>, std::vector<BlockAccess>> history_;
};

std::string block_label(int row, int col) {
    return std::to_string(row) + "," + std::to_string(col);
}

} // namespace

TaskGraph generate_cholesky(const CholeskySpec& spec, FlopAccounting accounting) {
    spec.validate();
    const int s = spec.blocks();
    const int b = spec.block_dim;

    TaskGraph g;
    ConflictTracker deps;
    auto emit = [&](TaskKind kind, std::string label,
                    std::vector<std::pair<std::pair<int, int>, bool>> accesses) {
        TaskId id = g.add_task(kind, task_flops(kind, b, accounting), std::move(label));
        deps.record(g, id, accesses);
    };

    for (int k = 0; k < s; ++k) {
        emit(TaskKind::Potrf, block_label(k, k), {{{k, k}, true}});
        for (int j = k + 1; j < s; ++j)
            emit(TaskKind::Trsm, block_label(k, j), {{{k, k}, false}, {{k, j}, true}});
        for (int j = k + 1; j < s; ++j) {
            for (int i = k + 1; i < j; ++i)
                emit(TaskKind::Gemm, block_label(i, j),
                     {{{k, i}, false}, {{k, j}, false}, {{i, j}, true}});
            emit(TaskKind::Syrk, block_label(j, j), {{{k, j}, false}, {{j, j}, true}});
        }
    }
    return g;
}

} // namespace asymsim

#pragma once

#include "asymsim/task_graph.hpp"

namespace asymsim {

// Right-looking blocked Cholesky on an m x m matrix tiled into b x b blocks.
struct CholeskySpec {
    int matrix_dim = 0; // m, in elements
    int block_dim = 0;  // b, in elements

    int blocks() const { return matrix_dim / block_dim; }
    void validate() const; // throws ConfigError ("b must divide m", ...)
};

enum class FlopAccounting {
    LeadingOrder, // POTRF b^3/3, TRSM b^3, SYRK b^3, GEMM 2b^3
    Exact         // adds the lower-order terms of the factor kernels
};

// Flop cost of one kernel invocation on a b x b block.
// TaskKind::Generic has no closed form and is rejected.
double task_flops(TaskKind kind, int block_dim,
                  FlopAccounting accounting = FlopAccounting::LeadingOrder);

// Builds the task DAG in program order:
//   for k: POTRF(k,k); for j>k: TRSM(k,j); for j>k: { GEMMs(k,*,j); SYRK(k,j) }
// Dependences come from block access conflicts (read/write and write/write),
// kept as the full conflict relation; transitive edges never change longest
// paths through the graph. Labels name the updated block, "i,j".
TaskGraph generate_cholesky(const CholeskySpec& spec,
                            FlopAccounting accounting = FlopAccounting::LeadingOrder);

} // namespace asymsim

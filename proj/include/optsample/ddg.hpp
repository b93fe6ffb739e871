#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "optsample/bigfloat.hpp"
#include "optsample/numsys.hpp"
#include "optsample/optimize.hpp"

namespace optsample {

// A structurally invalid matrix/tree/encoding (sums, ranges, dangling cells).
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when some M_i == Z: the sampler is a constant and bypasses tree
// construction entirely (see degenerate_encoding).
struct DegenerateDistribution : std::domain_error {
  DegenerateDistribution(const std::string& what, size_t index_in)
      : std::domain_error(what), index(index_in) {}
  size_t index;
};

// Row r holds the k expansion bits (prefix then suffix, MSB first) of M_r/Z:
// bit (r, c) set means outcome r owns a leaf at tree level c+1.
struct ProbabilityMatrix {
  size_t n = 0;
  uint32_t k = 1;
  uint32_t l = 1;
  std::vector<uint8_t> bits;  // row-major, n*k entries in {0,1}

  uint8_t at(size_t r, uint32_t c) const { return bits[r * k + c]; }
};

// Requires sum(M) == Z_kl; throws DegenerateDistribution when an entry owns
// all the mass.
ProbabilityMatrix build_matrix(const Assignment& a, const PrecisionSpec& spec);

struct TreeNode {
  int64_t label = 0;    // > 0: leaf carrying this 1-based outcome label
  uint32_t level = 0;
  TreeNode* left = nullptr;
  TreeNode* right = nullptr;
  int64_t loc = -1;     // cell offset assigned during packing
  bool is_leaf() const { return label > 0; }
};

struct DdgTree {
  std::deque<TreeNode> arena;  // stable addresses; nodes reference each other
  TreeNode* root = nullptr;
  size_t n = 0;
  uint32_t k = 1;
  uint32_t l = 1;
  size_t back_edge_count = 0;
};

// Entropy-optimal pseudotree of the matrix: leaves at level j exactly where
// column j-1 has ones (filled right to left, labels increasing), back edges
// from level k-1 to the level-l ancestors in FIFO order.
DdgTree make_tree(const ProbabilityMatrix& pm);

// Pointer-machine layout of the pseudotree: a branch at cell c stores its
// children's cells at c and c+1, a leaf at cell c stores -label. At most 3nk
// cells.
struct LinearEncoding {
  std::vector<int64_t> enc;
  size_t n = 0;
  uint32_t k = 1;
  uint32_t l = 1;
};

LinearEncoding pack_tree(const DdgTree& tree);

// One-cell encoding [-label] for a distribution with all mass on one outcome;
// sampling it consumes zero bits.
LinearEncoding degenerate_encoding(size_t n, size_t index, const PrecisionSpec& spec);

// matrix -> tree -> packed cells, with the degenerate bypass.
LinearEncoding build_encoding(const Assignment& a, const PrecisionSpec& spec);

// Validates cell ranges: every reachable branch has both child cells inside
// the array, every leaf label is in [1, n]. Throws StructuralError.
void validate_encoding(const LinearEncoding& e);

struct AnalysisReport {
  std::vector<Rational> output_distribution;
  Rational expected_bits;
  BigFloat entropy;  // Shannon entropy (bits) of the output distribution
};

// Exact absorbing-chain analysis of an encoding: expected visits solve
// (I - Q^T) nu = e_start by sparse rational elimination in reachability order
// (unknowns only at cells targeted by non-forward edges), absorption mass per
// outcome is the half-weighted visit mass over leaf edges, expected flips are
// sum(nu). Throws StructuralError when the chain does not absorb.
AnalysisReport analyze_encoding(const LinearEncoding& e);

std::vector<Rational> exact_output_distribution(const LinearEncoding& e);
Rational expected_bits(const LinearEncoding& e);

// sum p_i log2(1/p_i) over positive entries, at the given mantissa width.
BigFloat shannon_entropy(const std::vector<Rational>& dist, long prec = 128);

}  // namespace optsample

#include "optsample/ddg.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>

namespace optsample {

namespace {

// Leaves at tree level c+1 are the ascending set rows of matrix column c;
// within a level they fill positions right to left, so offset t (counted from
// the rightmost real node) carries the (t+1)-th set row.
struct LevelIndex {
  std::vector<std::vector<size_t>> set_rows;  // per column, ascending rows
  size_t leaves_at(uint32_t level) const {
    return level == 0 ? 0 : set_rows[level - 1].size();
  }
  // 1-based label at (level, offset-from-right), or 0 when not a leaf.
  int64_t leaf_label(uint32_t level, size_t t) const {
    if (level == 0 || t >= set_rows[level - 1].size()) return 0;
    return static_cast<int64_t>(set_rows[level - 1][t]) + 1;
  }
};

LevelIndex index_levels(const ProbabilityMatrix& pm) {
  LevelIndex idx;
  idx.set_rows.resize(pm.k);
  for (uint32_t c = 0; c < pm.k; ++c) {
    for (size_t r = 0; r < pm.n; ++r) {
      if (pm.at(r, c)) idx.set_rows[c].push_back(r);
    }
  }
  return idx;
}

struct BuildTask {
  uint32_t level;
  size_t t;  // offset among real nodes, from the right
  TreeNode* parent;
  bool to_right;
};

void attach(TreeNode* parent, bool to_right, TreeNode* child, DdgTree& tree) {
  if (parent == nullptr) {
    tree.root = child;
  } else if (to_right) {
    parent->right = child;
  } else {
    parent->left = child;
  }
}

int64_t pack_node(TreeNode* node, std::vector<int64_t>& enc, int64_t v,
                  int64_t cap) {
  if (v + (node->is_leaf() ? 1 : 2) > cap) {
    throw StructuralError("packed encoding exceeds the 3nk cell bound");
  }
  node->loc = v;
  if (static_cast<size_t>(v) + 2 > enc.size()) {
    enc.resize(node->is_leaf() ? v + 1 : v + 2, 0);
  }
  if (node->is_leaf()) {
    enc[v] = -node->label;
    return v + 1;
  }
  int64_t w = v + 2;
  if (node->left->loc < 0) {
    enc[v] = v + 2;
    w = pack_node(node->left, enc, v + 2, cap);
  } else {
    enc[v] = node->left->loc;
  }
  if (node->right->loc < 0) {
    enc[v + 1] = w;
    w = pack_node(node->right, enc, w, cap);
  } else {
    enc[v + 1] = node->right->loc;
  }
  return w;
}

// Affine form c0 + sum(c_j * x_j) over the unknown visit counts x_j.
using Affine = std::vector<Rational>;

void add_scaled(Affine& dst, const Affine& src, const Rational& scale) {
  for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] * scale;
}

// Solves (I - T) x = b exactly; throws StructuralError when singular.
std::vector<Rational> solve_closure(std::vector<Affine> rows) {
  const size_t m = rows.size();
  // rows[j] = [b_j, T_j1, ..., T_jm]; rearrange to augmented (I - T | b).
  std::vector<std::vector<Rational>> aug(m);
  for (size_t j = 0; j < m; ++j) {
    aug[j].assign(m + 1, Rational(0));
    for (size_t i = 0; i < m; ++i) {
      aug[j][i] = -rows[j][1 + i];
      if (i == j) aug[j][i] += Rational(1);
    }
    aug[j][m] = rows[j][0];
  }
  for (size_t col = 0; col < m; ++col) {
    size_t pivot = col;
    while (pivot < m && aug[pivot][col].is_zero()) ++pivot;
    if (pivot == m) {
      throw StructuralError(
          "encoding is not absorbing: visit-count system is singular");
    }
    std::swap(aug[pivot], aug[col]);
    const Rational inv = Rational(1) / aug[col][col];
    for (size_t i = col; i <= m; ++i) aug[col][i] = aug[col][i] * inv;
    for (size_t r = 0; r < m; ++r) {
      if (r == col || aug[r][col].is_zero()) continue;
      const Rational f = aug[r][col];
      for (size_t i = col; i <= m; ++i) aug[r][i] -= f * aug[col][i];
    }
  }
  std::vector<Rational> x(m);
  for (size_t j = 0; j < m; ++j) x[j] = aug[j][m];
  return x;
}

}  // namespace

ProbabilityMatrix build_matrix(const Assignment& a, const PrecisionSpec& spec) {
  const mpz_class z = z_kl(spec);
  if (a.z != z) {
    throw StructuralError("assignment total does not match the number system");
  }
  if (a.m.empty()) throw StructuralError("assignment has no outcomes");
  mpz_class sum = 0;
  for (size_t i = 0; i < a.m.size(); ++i) {
    if (a.m[i] < 0) throw StructuralError("negative assignment entry");
    if (a.m[i] == z) {
      throw DegenerateDistribution(
          "all probability mass on one outcome; use the one-cell encoding",
          i);
    }
    sum += a.m[i];
  }
  if (sum != z) {
    throw StructuralError("assignment entries do not sum to the total");
  }

  ProbabilityMatrix pm;
  pm.n = a.m.size();
  pm.k = spec.k;
  pm.l = spec.l;
  pm.bits.assign(pm.n * static_cast<size_t>(pm.k), 0);
  for (size_t r = 0; r < pm.n; ++r) {
    const BinaryExpansion e = encode_numsys(a.m[r], spec);
    for (uint32_t c = 0; c < spec.l; ++c) pm.bits[r * pm.k + c] = e.prefix[c];
    for (uint32_t c = spec.l; c < spec.k; ++c) {
      pm.bits[r * pm.k + c] = e.suffix[c - spec.l];
    }
  }
  return pm;
}

DdgTree make_tree(const ProbabilityMatrix& pm) {
  if (pm.n == 0 || pm.k == 0 || pm.l > pm.k) {
    throw StructuralError("malformed probability matrix shape");
  }
  if (pm.bits.size() != pm.n * static_cast<size_t>(pm.k)) {
    throw StructuralError("probability matrix bit count mismatch");
  }
  for (uint8_t b : pm.bits) {
    if (b > 1) throw StructuralError("probability matrix entry outside {0,1}");
  }

  const LevelIndex idx = index_levels(pm);
  const size_t node_cap = 2 * pm.n * static_cast<size_t>(pm.k) + 2;

  DdgTree tree;
  tree.n = pm.n;
  tree.k = pm.k;
  tree.l = pm.l;

  std::deque<TreeNode*> ancestors;                       // level-l branches, FIFO
  std::vector<std::pair<TreeNode*, bool>> back_requests;  // (node, to_right)

  auto new_node = [&](uint32_t level, int64_t label) -> TreeNode* {
    if (tree.arena.size() >= node_cap) {
      throw StructuralError("pseudotree exceeds the node bound; matrix is malformed");
    }
    tree.arena.push_back(TreeNode{});
    TreeNode* node = &tree.arena.back();
    node->level = level;
    node->label = label;
    return node;
  };

  std::vector<BuildTask> stack;
  stack.push_back(BuildTask{0, 0, nullptr, false});
  while (!stack.empty()) {
    const BuildTask task = stack.back();
    stack.pop_back();
    const int64_t label = idx.leaf_label(task.level, task.t);
    TreeNode* node = new_node(task.level, label);
    attach(task.parent, task.to_right, node, tree);
    if (label > 0) continue;
    if (task.level >= pm.k) {
      throw StructuralError("branch below the deepest level; matrix is malformed");
    }
    if (task.level == pm.l) ancestors.push_back(node);
    const size_t leaves_here = idx.leaves_at(task.level);
    if (task.t < leaves_here) {
      throw StructuralError("leaf offset treated as branch; matrix is malformed");
    }
    const size_t right_t = 2 * (task.t - leaves_here);
    const size_t left_t = right_t + 1;
    if (task.level == pm.k - 1) {
      // Children live at the deepest level: leaves are materialized, anything
      // else continues at a level-l ancestor (FIFO order of creation).
      for (const auto& [to_right, t] :
           {std::pair<bool, size_t>{true, right_t}, {false, left_t}}) {
        const int64_t child_label = idx.leaf_label(pm.k, t);
        if (child_label > 0) {
          attach(node, to_right, new_node(pm.k, child_label), tree);
        } else {
          back_requests.emplace_back(node, to_right);
        }
      }
    } else {
      stack.push_back(BuildTask{task.level + 1, left_t, node, false});
      stack.push_back(BuildTask{task.level + 1, right_t, node, true});
    }
  }

  if (back_requests.size() > ancestors.size()) {
    throw StructuralError(
        "more recurring branches than candidate ancestors; matrix is malformed");
  }
  for (size_t i = 0; i < back_requests.size(); ++i) {
    attach(back_requests[i].first, back_requests[i].second, ancestors[i], tree);
  }
  tree.back_edge_count = back_requests.size();

  for (const TreeNode& node : tree.arena) {
    if (!node.is_leaf() && (node.left == nullptr || node.right == nullptr)) {
      throw StructuralError("branch with a missing child; matrix is malformed");
    }
  }
  return tree;
}

LinearEncoding pack_tree(const DdgTree& tree) {
  if (tree.root == nullptr) throw StructuralError("empty pseudotree");
  for (const TreeNode& node : tree.arena) {
    if (node.loc >= 0) throw StructuralError("pseudotree was already packed");
  }
  LinearEncoding out;
  out.n = tree.n;
  out.k = tree.k;
  out.l = tree.l;
  const int64_t cap = 3 * static_cast<int64_t>(tree.n) * tree.k;
  out.enc.reserve(tree.arena.size());
  pack_node(tree.root, out.enc, 0, std::max<int64_t>(cap, 4));
  return out;
}

LinearEncoding degenerate_encoding(size_t n, size_t index,
                                   const PrecisionSpec& spec) {
  if (index >= n) throw StructuralError("degenerate outcome index out of range");
  LinearEncoding out;
  out.n = n;
  out.k = spec.k;
  out.l = spec.l;
  out.enc = {-(static_cast<int64_t>(index) + 1)};
  return out;
}

LinearEncoding build_encoding(const Assignment& a, const PrecisionSpec& spec) {
  try {
    const ProbabilityMatrix pm = build_matrix(a, spec);
    return pack_tree(make_tree(pm));
  } catch (const DegenerateDistribution& d) {
    return degenerate_encoding(a.m.size(), d.index, spec);
  }
}

void validate_encoding(const LinearEncoding& e) {
  const int64_t size = static_cast<int64_t>(e.enc.size());
  if (size == 0) throw StructuralError("encoding has no cells");
  if (e.n == 0) throw StructuralError("encoding has no outcomes");
  std::vector<int64_t> frontier = {0};
  std::vector<uint8_t> seen(e.enc.size(), 0);
  seen[0] = 1;
  while (!frontier.empty()) {
    const int64_t c = frontier.back();
    frontier.pop_back();
    if (e.enc[c] < 0) {
      const int64_t label = -e.enc[c];
      if (label < 1 || static_cast<size_t>(label) > e.n) {
        throw StructuralError("leaf label out of range");
      }
      continue;
    }
    if (c + 1 >= size) {
      throw StructuralError("branch cell at the end of the encoding");
    }
    for (int64_t child : {e.enc[c], e.enc[c + 1]}) {
      if (child < 0 || child >= size) {
        throw StructuralError("branch child cell out of range");
      }
      if (!seen[child]) {
        seen[child] = 1;
        frontier.push_back(child);
      }
    }
  }
}

AnalysisReport analyze_encoding(const LinearEncoding& e) {
  validate_encoding(e);
  AnalysisReport report;
  report.output_distribution.assign(e.n, Rational(0));
  report.expected_bits = Rational(0);

  if (e.enc[0] < 0) {
    report.output_distribution[static_cast<size_t>(-e.enc[0]) - 1] = Rational(1);
    report.entropy = shannon_entropy(report.output_distribution);
    return report;
  }

  // Branch states in breadth-first order from the start cell.
  std::vector<int64_t> order;
  std::unordered_map<int64_t, size_t> pos;
  {
    std::deque<int64_t> queue = {0};
    pos[0] = 0;
    while (!queue.empty()) {
      const int64_t c = queue.front();
      queue.pop_front();
      order.push_back(c);
      for (int64_t child : {e.enc[c], e.enc[c + 1]}) {
        if (e.enc[child] < 0) continue;
        if (pos.emplace(child, pos.size()).second) queue.push_back(child);
      }
    }
    for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  }

  // A state hit by an edge from a state at the same or later position cannot
  // be accumulated in one forward pass; its visit count becomes an unknown.
  std::unordered_map<int64_t, size_t> cut;  // cell -> unknown index
  for (const int64_t c : order) {
    for (int64_t child : {e.enc[c], e.enc[c + 1]}) {
      if (e.enc[child] < 0) continue;
      if (pos[child] <= pos[c]) cut.emplace(child, cut.size());
    }
  }

  const size_t width = 1 + cut.size();
  const Rational half(1, 2);
  std::unordered_map<int64_t, Affine> accum;
  for (const int64_t c : order) accum.emplace(c, Affine(width, Rational(0)));
  std::vector<Affine> leaf_mass(e.n, Affine(width, Rational(0)));
  std::vector<Affine> exprs(order.size(), Affine(width, Rational(0)));
  Affine total_visits(width, Rational(0));

  for (size_t i = 0; i < order.size(); ++i) {
    const int64_t c = order[i];
    auto cut_it = cut.find(c);
    if (cut_it != cut.end()) {
      exprs[i][1 + cut_it->second] = Rational(1);
    } else {
      exprs[i] = accum[c];
      if (c == 0) exprs[i][0] += Rational(1);
    }
    add_scaled(total_visits, exprs[i], Rational(1));
    for (int64_t child : {e.enc[c], e.enc[c + 1]}) {
      if (e.enc[child] < 0) {
        add_scaled(leaf_mass[static_cast<size_t>(-e.enc[child]) - 1], exprs[i],
                   half);
      } else {
        add_scaled(accum[child], exprs[i], half);
      }
    }
  }

  std::vector<Affine> closure(cut.size(), Affine(width, Rational(0)));
  for (const auto& [cell, j] : cut) {
    closure[j] = accum[cell];
    if (cell == 0) closure[j][0] += Rational(1);
  }
  const std::vector<Rational> x = solve_closure(std::move(closure));

  auto eval = [&](const Affine& a) {
    Rational v = a[0];
    for (size_t j = 0; j < x.size(); ++j) v += a[1 + j] * x[j];
    return v;
  };

  Rational mass_total(0);
  for (size_t i = 0; i < e.n; ++i) {
    report.output_distribution[i] = eval(leaf_mass[i]);
    if (report.output_distribution[i].sign() < 0) {
      throw StructuralError("encoding is not absorbing: negative leaf mass");
    }
    mass_total += report.output_distribution[i];
  }
  if (!(mass_total == Rational(1))) {
    throw StructuralError("encoding is not absorbing: leaf masses do not sum to 1");
  }
  report.expected_bits = eval(total_visits);
  report.entropy = shannon_entropy(report.output_distribution);
  return report;
}

std::vector<Rational> exact_output_distribution(const LinearEncoding& e) {
  return analyze_encoding(e).output_distribution;
}

Rational expected_bits(const LinearEncoding& e) {
  return analyze_encoding(e).expected_bits;
}

BigFloat shannon_entropy(const std::vector<Rational>& dist, long prec) {
  BigFloat h = BigFloat::from_long(0, prec);
  for (const Rational& p : dist) {
    if (p.sign() <= 0) continue;
    const BigFloat pf = BigFloat::from_rational(p, prec);
    h = h - pf * pf.log2();
  }
  return h;
}

}  // namespace optsample

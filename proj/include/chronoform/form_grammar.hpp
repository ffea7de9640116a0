#pragma once

// Left-replication grammar over form trees.
//
// A form tree is a leaf (one uppercase letter) or a node with at least two
// children. The single rewrite rule duplicates the first child of a node in
// place:  Node(c1, c2, ..., cn) -> Node(c1, c1, c2, ..., cn),  so the flat
// seed AB grows into AAB, AAAB, ...  A mirrored right-replication rule is
// provided only so the two languages can be compared.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "chronoform/error.hpp"
#include "chronoform/rational.hpp"

namespace chronoform {

/// Derivation searches stop here and report kBoundExceeded.
inline constexpr std::size_t kMaxDerivationSteps = 32;

struct FormTree {
  char label = 0;                  // leaves only
  std::vector<FormTree> children;  // nodes only, size >= 2

  static FormTree leaf(char c) { return FormTree{c, {}}; }
  static FormTree node(std::vector<FormTree> kids) {
    if (kids.size() < 2) throw PreconditionError("a form node needs at least two children");
    return FormTree{0, std::move(kids)};
  }

  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const FormTree& a, const FormTree& b) {
    return a.label == b.label && a.children == b.children;
  }
  friend bool operator<(const FormTree& a, const FormTree& b) {
    if (a.label != b.label) return a.label < b.label;
    return std::lexicographical_compare(a.children.begin(), a.children.end(), b.children.begin(),
                                        b.children.end());
  }
};

/// Child indices from the root; empty addresses the root.
using NodePath = std::vector<std::size_t>;

inline std::string flatten(const FormTree& t) {
  if (t.is_leaf()) return std::string(1, t.label);
  std::string s;
  for (const auto& c : t.children) s += flatten(c);
  return s;
}

/// Nested-parentheses form, e.g. "((A A B) A)".
inline std::string to_string(const FormTree& t) {
  if (t.is_leaf()) return std::string(1, t.label);
  std::string s = "(";
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (i) s += ' ';
    s += to_string(t.children[i]);
  }
  return s + ")";
}

inline std::string path_string(const NodePath& path) {
  std::string s = "/";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(path[i]);
  }
  return s;
}

/// Throws ParseError unless `form` is a nonempty run of uppercase ASCII letters.
inline void check_form_string(std::string_view form) {
  if (form.empty()) throw ParseError("empty form string");
  for (char c : form) {
    if (c < 'A' || c > 'Z') {
      throw ParseError("form strings are uppercase letters only, got '" + std::string(form) + "'");
    }
  }
}

/// "AB" -> Node(A, B); "A" -> Leaf(A).
inline FormTree flat_tree(std::string_view form) {
  check_form_string(form);
  if (form.size() == 1) return FormTree::leaf(form[0]);
  std::vector<FormTree> kids;
  for (char c : form) kids.push_back(FormTree::leaf(c));
  return FormTree::node(std::move(kids));
}

namespace detail {

inline FormTree parse_tree_at(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && s[pos] == ' ') ++pos;
  if (pos >= s.size()) throw ParseError("form tree: unexpected end");
  const char c = s[pos];
  if (c >= 'A' && c <= 'Z') {
    ++pos;
    return FormTree::leaf(c);
  }
  if (c != '(') throw ParseError(std::string("form tree: unexpected '") + c + "'");
  ++pos;
  std::vector<FormTree> kids;
  for (;;) {
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos >= s.size()) throw ParseError("form tree: missing ')'");
    if (s[pos] == ')') {
      ++pos;
      break;
    }
    kids.push_back(parse_tree_at(s, pos));
  }
  if (kids.size() < 2) throw ParseError("form tree: a group needs at least two members");
  return FormTree::node(std::move(kids));
}

}  // namespace detail

/// Accepts a flat letter string ("AAB") or the parenthesized tree form.
inline FormTree parse_form_tree(std::string_view text) {
  if (text.find('(') == std::string_view::npos) return flat_tree(text);
  std::size_t pos = 0;
  FormTree t = detail::parse_tree_at(text, pos);
  while (pos < text.size() && text[pos] == ' ') ++pos;
  if (pos != text.size()) throw ParseError("form tree: trailing characters");
  return t;
}

namespace detail {

inline FormTree* node_at(FormTree& t, const NodePath& path) {
  FormTree* cur = &t;
  for (std::size_t i : path) {
    if (cur->is_leaf() || i >= cur->children.size()) return nullptr;
    cur = &cur->children[i];
  }
  return cur->is_leaf() ? nullptr : cur;
}

inline void collect_paths(const FormTree& t, NodePath& prefix, std::vector<NodePath>& out) {
  if (t.is_leaf()) return;
  out.push_back(prefix);
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    prefix.push_back(i);
    collect_paths(t.children[i], prefix, out);
    prefix.pop_back();
  }
}

}  // namespace detail

/// Paths of every node (not leaf), preorder.
inline std::vector<NodePath> node_paths(const FormTree& t) {
  std::vector<NodePath> out;
  NodePath prefix;
  detail::collect_paths(t, prefix, out);
  return out;
}

/// AB -> AAB at the node addressed by `path`.
inline FormTree left_replicate(FormTree tree, const NodePath& path) {
  FormTree* node = detail::node_at(tree, path);
  if (!node) throw PreconditionError("path " + path_string(path) + " does not address a node");
  FormTree head = node->children.front();
  node->children.insert(node->children.begin(), std::move(head));
  return tree;
}

/// Mirror rule AB -> ABB, for comparison only.
inline FormTree right_replicate(FormTree tree, const NodePath& path) {
  FormTree* node = detail::node_at(tree, path);
  if (!node) throw PreconditionError("path " + path_string(path) + " does not address a node");
  node->children.push_back(node->children.back());
  return tree;
}

enum class Rule { kLeft, kRight };

struct Derivation {
  FormTree seed;
  std::vector<NodePath> steps;
  FormTree result;
};

inline FormTree replay(const FormTree& seed, const std::vector<NodePath>& steps,
                       Rule rule = Rule::kLeft) {
  FormTree t = seed;
  for (const auto& p : steps) t = rule == Rule::kLeft ? left_replicate(t, p) : right_replicate(t, p);
  return t;
}

/// Every tree reachable from `seed` in at most `max_steps` rewrites at any
/// node, each with one shortest derivation. Breadth-first.
inline std::map<FormTree, Derivation> enumerate_derivations(const FormTree& seed,
                                                            std::size_t max_steps,
                                                            Rule rule = Rule::kLeft) {
  std::map<FormTree, Derivation> seen;
  seen.emplace(seed, Derivation{seed, {}, seed});
  std::vector<FormTree> frontier{seed};
  for (std::size_t depth = 0; depth < max_steps && !frontier.empty(); ++depth) {
    std::vector<FormTree> next;
    for (const auto& t : frontier) {
      const auto& base = seen.at(t);
      for (const auto& p : node_paths(t)) {
        FormTree grown = rule == Rule::kLeft ? left_replicate(t, p) : right_replicate(t, p);
        if (seen.count(grown)) continue;
        Derivation d{seed, base.steps, grown};
        d.steps.push_back(p);
        seen.emplace(grown, std::move(d));
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

inline std::set<FormTree> generate(const FormTree& seed, std::size_t max_steps,
                                   Rule rule = Rule::kLeft) {
  std::set<FormTree> out;
  for (auto& [tree, d] : enumerate_derivations(seed, max_steps, rule)) out.insert(tree);
  return out;
}

/// Flattened strings of generate(), deduplicated, sorted by length then lexicographically.
inline std::vector<std::string> generate_strings(const FormTree& seed, std::size_t max_steps,
                                                 Rule rule = Rule::kLeft) {
  std::set<std::string> uniq;
  for (const auto& t : generate(seed, max_steps, rule)) uniq.insert(flatten(t));
  std::vector<std::string> out(uniq.begin(), uniq.end());
  std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

enum class RecognitionMode { kFlat, kHierarchical };

struct Recognition {
  enum class Status { kDerivable, kNotDerivable, kBoundExceeded };

  Status status = Status::kNotDerivable;
  std::size_t steps = 0;
  std::optional<Derivation> derivation;

  bool derivable() const { return status == Status::kDerivable; }
};

namespace detail {

// Flat mode: only the root rewrites, so the root's first child never changes
// and a form is derivable iff it is head^k followed by the seed. Inverse
// rewriting strips one leading copy of the head at a time.
inline Recognition recognize_flat(std::string_view form, const FormTree& seed) {
  Recognition r;
  const std::string target = flatten(seed);
  if (seed.is_leaf()) {
    if (form == target) r.status = Recognition::Status::kDerivable;
    if (r.derivable()) r.derivation = Derivation{seed, {}, seed};
    return r;
  }
  const std::string head = flatten(seed.children.front());
  std::string current(form);
  std::unordered_set<std::string> visited;
  std::size_t steps = 0;
  while (current != target) {
    if (!visited.insert(current).second) return r;
    if (current.size() < 2 * head.size() ||
        current.compare(0, head.size(), head) != 0 ||
        current.compare(head.size(), head.size(), head) != 0) {
      return r;
    }
    current.erase(0, head.size());
    ++steps;
  }
  if (steps > kMaxDerivationSteps) {
    r.status = Recognition::Status::kBoundExceeded;
    return r;
  }
  r.status = Recognition::Status::kDerivable;
  r.steps = steps;
  Derivation d{seed, std::vector<NodePath>(steps), seed};
  d.result = replay(seed, d.steps);
  r.derivation = std::move(d);
  return r;
}

// Hierarchical mode: breadth-first growth at every node, pruned by length
// (each rewrite lengthens the flattened form by at least one letter).
inline Recognition recognize_hierarchical(std::string_view form, const FormTree& seed) {
  Recognition r;
  const std::size_t seed_len = flatten(seed).size();
  if (form.size() < seed_len) return r;
  if (form.size() - seed_len > kMaxDerivationSteps) {
    r.status = Recognition::Status::kBoundExceeded;
    return r;
  }
  std::map<FormTree, std::vector<NodePath>> seen{{seed, {}}};
  std::vector<FormTree> frontier{seed};
  for (std::size_t depth = 0;; ++depth) {
    for (const auto& t : frontier) {
      if (flatten(t) == form) {
        r.status = Recognition::Status::kDerivable;
        r.steps = depth;
        r.derivation = Derivation{seed, seen.at(t), t};
        return r;
      }
    }
    if (frontier.empty()) return r;
    std::vector<FormTree> next;
    for (const auto& t : frontier) {
      for (const auto& p : node_paths(t)) {
        FormTree grown = left_replicate(t, p);
        const std::string flat = flatten(grown);
        if (flat.size() > form.size() || flat.back() != form.back() || seen.count(grown)) continue;
        auto steps = seen.at(t);
        steps.push_back(p);
        seen.emplace(grown, std::move(steps));
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
}

}  // namespace detail

/// Minimal number of left-replications turning `seed` into a tree whose
/// flattening is `form`. Flat mode rewrites the root only.
inline Recognition recognize(std::string_view form, const FormTree& seed,
                             RecognitionMode mode = RecognitionMode::kFlat) {
  check_form_string(form);
  return mode == RecognitionMode::kFlat ? detail::recognize_flat(form, seed)
                                        : detail::recognize_hierarchical(form, seed);
}

/// Structural recognition: collapses duplicated leading children anywhere in
/// `target` until `seed` is reached. Memoized breadth-first search.
inline Recognition recognize_tree(const FormTree& target, const FormTree& seed) {
  Recognition r;
  std::map<FormTree, std::vector<NodePath>> seen{{target, {}}};
  std::deque<FormTree> queue{target};
  while (!queue.empty()) {
    FormTree t = std::move(queue.front());
    queue.pop_front();
    const auto undone = seen.at(t);
    if (t == seed) {
      r.status = Recognition::Status::kDerivable;
      r.steps = undone.size();
      r.derivation = Derivation{seed, {undone.rbegin(), undone.rend()}, target};
      return r;
    }
    if (undone.size() == kMaxDerivationSteps) {
      r.status = Recognition::Status::kBoundExceeded;
      continue;
    }
    for (const auto& p : node_paths(t)) {
      FormTree shrunk = t;
      FormTree* node = detail::node_at(shrunk, p);
      if (node->children.size() < 3 || !(node->children[0] == node->children[1])) continue;
      node->children.erase(node->children.begin());
      if (seen.count(shrunk)) continue;
      auto steps = undone;
      steps.push_back(p);
      seen.emplace(shrunk, std::move(steps));
      queue.push_back(std::move(shrunk));
    }
  }
  return r;
}

/// Normalized onset of B once A has been laid down `copies` times:
/// copies*len_a / (copies*len_a + len_b).
inline Rational predicted_climax_position(int copies, Rational len_a, Rational len_b) {
  if (copies < 1) throw PreconditionError("copies must be at least 1");
  if (len_a <= 0 || len_b <= 0) throw PreconditionError("segment lengths must be positive");
  return copies * len_a / (copies * len_a + len_b);
}

/// Short-short-long phrase proportions, 1:1:2 within `tolerance`.
inline bool sentence_check(Rational d1, Rational d2, Rational d3, double tolerance) {
  if (d1 <= 0 || d2 <= 0 || d3 <= 0) throw PreconditionError("sentence durations must be positive");
  if (tolerance < 0) throw PreconditionError("tolerance must be non-negative");
  const Rational first = d1 / d2 - 1;
  const Rational last = d3 / (d1 + d2) - 1;
  return to_double(abs(first)) <= tolerance && to_double(abs(last)) <= tolerance;
}

inline std::string time_reverse(std::string_view form) { return {form.rbegin(), form.rend()}; }

enum class SonataReading {
  kInterruptionAtRecapitulation,  // the received reading
  kInterruptionAtRepeat,          // exposition repeat counted as form: AABA
};

struct AlignmentRow {
  std::string section;
  std::string letters;
  std::string ursatz;
  bool interruption_before = false;
};

struct SonataAlignment {
  SonataReading reading = SonataReading::kInterruptionAtRepeat;
  std::vector<AlignmentRow> rows;

  std::string form() const {
    std::string s;
    for (const auto& r : rows) s += r.letters;
    return s;
  }
};

/// Fixed sonata-form / fundamental-structure schema. Ursatz cells are opaque labels.
inline SonataAlignment sonata_alignment(SonataReading reading = SonataReading::kInterruptionAtRepeat) {
  const std::string kHead = "3̂/I 2̂/V";
  SonataAlignment a;
  a.reading = reading;
  if (reading == SonataReading::kInterruptionAtRepeat) {
    a.rows = {{"exposition", "A", kHead, false},
              {"exposition-repeat", "A", kHead, true},
              {"development", "B", "—", false},
              {"recapitulation", "A", "1̂/I", false}};
  } else {
    a.rows = {{"exposition+development", "AB", kHead, false},
              {"recapitulation", "A", "3̂/I 2̂/V 1̂/I", true}};
  }
  return a;
}

}  // namespace chronoform

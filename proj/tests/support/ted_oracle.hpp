#pragma once

// Exhaustive edit-script search for ordered labeled forests. Every state
// reachable by single insert / delete / relabel operations with at most
// `max_nodes` nodes is a graph vertex; breadth-first search gives exact unit
// cost distances. Optimal scripts can always be ordered deletions first,
// insertions last, so bounding the intermediate size by the larger input
// loses nothing.

#include <cstddef>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamarck/analysis.hpp"

namespace ted_oracle {

struct Node {
  int label = 0;
  std::vector<Node> kids;
};
using Forest = std::vector<Node>;

inline std::size_t count(const Forest& f) {
  std::size_t n = 0;
  for (const auto& t : f) n += 1 + count(t.kids);
  return n;
}

inline void encode(const Forest& f, std::string& out) {
  for (const auto& t : f) {
    out += '(';
    out += static_cast<char>('a' + t.label);
    encode(t.kids, out);
    out += ')';
  }
}

inline std::string encode(const Forest& f) {
  std::string s;
  encode(f, s);
  return s;
}

inline Forest decode(const std::string& s, std::size_t& pos) {
  Forest f;
  while (pos < s.size() && s[pos] == '(') {
    Node n;
    n.label = s[pos + 1] - 'a';
    pos += 2;
    n.kids = decode(s, pos);
    ++pos;  // ')'
    f.push_back(std::move(n));
  }
  return f;
}

inline Forest decode(const std::string& s) {
  std::size_t pos = 0;
  return decode(s, pos);
}

// All forests one operation away.
inline void neighbors(const Forest& f, int labels, std::vector<Forest>& out) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    Forest del(f.begin(), f.begin() + i);
    del.insert(del.end(), f[i].kids.begin(), f[i].kids.end());
    del.insert(del.end(), f.begin() + i + 1, f.end());
    out.push_back(std::move(del));

    for (int l = 0; l < labels; ++l) {
      if (l == f[i].label) continue;
      Forest rel = f;
      rel[i].label = l;
      out.push_back(std::move(rel));
    }

    std::vector<Forest> sub;
    neighbors(f[i].kids, labels, sub);
    for (auto& k : sub) {
      Forest deeper = f;
      deeper[i].kids = std::move(k);
      out.push_back(std::move(deeper));
    }
  }
  for (std::size_t i = 0; i <= f.size(); ++i) {
    for (std::size_t j = i; j <= f.size(); ++j) {
      for (int l = 0; l < labels; ++l) {
        Node n{l, Forest(f.begin() + i, f.begin() + j)};
        Forest ins(f.begin(), f.begin() + i);
        ins.push_back(std::move(n));
        ins.insert(ins.end(), f.begin() + j, f.end());
        out.push_back(std::move(ins));
      }
    }
  }
}

/// All ordered trees with 1..max_nodes nodes over `labels` labels.
inline std::vector<Forest> all_trees(std::size_t max_nodes, int labels) {
  // Forests of exactly n nodes, built as (first tree) + (rest forest).
  std::vector<std::vector<Forest>> forests(max_nodes + 1);
  forests[0].push_back({});
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    for (std::size_t first = 1; first <= n; ++first) {
      for (const auto& kids : forests[first - 1]) {
        for (const auto& rest : forests[n - first]) {
          for (int l = 0; l < labels; ++l) {
            Forest f{Node{l, kids}};
            f.insert(f.end(), rest.begin(), rest.end());
            forests[n].push_back(std::move(f));
          }
        }
      }
    }
  }
  std::vector<Forest> trees;
  for (std::size_t n = 1; n <= max_nodes; ++n)
    for (const auto& f : forests[n])
      if (f.size() == 1) trees.push_back(f);
  return trees;
}

/// Distance table over every forest with at most max_nodes nodes.
class Oracle {
 public:
  Oracle(std::size_t max_nodes, int labels) {
    std::deque<std::string> todo{std::string()};
    id_[""] = 0;
    states_.push_back("");
    while (!todo.empty()) {
      const std::string s = todo.front();
      todo.pop_front();
      const std::size_t from = id_.at(s);
      std::vector<Forest> next;
      neighbors(decode(s), labels, next);
      for (const auto& f : next) {
        if (count(f) > max_nodes) continue;
        const std::string key = encode(f);
        auto [it, fresh] = id_.try_emplace(key, states_.size());
        if (fresh) {
          states_.push_back(key);
          todo.push_back(key);
        }
        if (adj_.size() <= from) adj_.resize(from + 1);
        adj_[from].push_back(it->second);
      }
    }
    adj_.resize(states_.size());
  }

  std::size_t states() const { return states_.size(); }

  /// Distances from `source` to every state.
  std::vector<int> distances_from(const Forest& source) const {
    std::vector<int> d(states_.size(), -1);
    const std::size_t s = id_.at(encode(source));
    d[s] = 0;
    std::deque<std::size_t> q{s};
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      for (std::size_t v : adj_[u]) {
        if (d[v] >= 0) continue;
        d[v] = d[u] + 1;
        q.push_back(v);
      }
    }
    return d;
  }

  std::size_t index(const Forest& f) const { return id_.at(encode(f)); }

 private:
  std::unordered_map<std::string, std::size_t> id_;
  std::vector<std::string> states_;
  std::vector<std::vector<std::size_t>> adj_;
};

inline void flatten(const Node& n, lamarck::analysis::LabeledTree& t) {
  const std::size_t me = t.labels.size();
  t.labels.push_back(n.label);
  t.children.emplace_back();
  for (const auto& k : n.kids) {
    const std::size_t child = t.labels.size();
    flatten(k, t);
    t.children[me].push_back(child);
  }
}

inline lamarck::analysis::LabeledTree to_labeled(const Forest& single_tree) {
  lamarck::analysis::LabeledTree t;
  flatten(single_tree.front(), t);
  return t;
}

}  // namespace ted_oracle

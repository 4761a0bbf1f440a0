#pragma once

#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "folgrade/syntax.hpp"

namespace folgrade {

/// Congruence closure over ground terms. Small and copyable: tableau
/// branches each carry their own instance.
class CongruenceClosure {
 public:
  /// Registers `t` and its subterms; returns the node id of `t`.
  std::size_t add(const Term& t) {
    if (!t.isGround()) throw std::invalid_argument("congruence closure only holds ground terms");
    if (auto it = index_.find(t); it != index_.end()) return it->second;
    std::vector<std::size_t> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) args.push_back(add(a));
    const std::size_t id = terms_.size();
    terms_.push_back(t);
    args_.push_back(std::move(args));
    parent_.push_back(id);
    index_.emplace(t, id);
    if (t.isApplication()) dirty_ = true;
    return id;
  }

  void merge(const Term& a, const Term& b) {
    unite(add(a), add(b));
    dirty_ = true;
  }

  bool equivalent(const Term& a, const Term& b) {
    const std::size_t x = add(a);
    const std::size_t y = add(b);
    close();
    return find(x) == find(y);
  }

  /// Representative node id of the class of `t`.
  std::size_t classOf(const Term& t) {
    const std::size_t id = add(t);
    close();
    return find(id);
  }

  std::size_t find(std::size_t id) {
    while (parent_[id] != id) {
      parent_[id] = parent_[parent_[id]];
      id = parent_[id];
    }
    return id;
  }

  /// Registered terms in registration order.
  const std::vector<Term>& terms() const { return terms_; }

  /// Propagates congruence until fixpoint.
  void close() {
    while (dirty_) {
      dirty_ = false;
      std::map<std::pair<std::string, std::vector<std::size_t>>, std::size_t> signatures;
      for (std::size_t id = 0; id < terms_.size(); ++id) {
        if (!terms_[id].isApplication()) continue;
        std::vector<std::size_t> key;
        key.reserve(args_[id].size());
        for (std::size_t a : args_[id]) key.push_back(find(a));
        auto [it, inserted] = signatures.try_emplace({terms_[id].name(), std::move(key)}, id);
        if (!inserted && find(it->second) != find(id)) {
          unite(it->second, id);
          dirty_ = true;
        }
      }
    }
  }

 private:
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // The older node stays representative, which keeps naming stable.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

  std::vector<Term> terms_;
  std::vector<std::vector<std::size_t>> args_;
  std::vector<std::size_t> parent_;
  std::unordered_map<Term, std::size_t, TermHash> index_;
  bool dirty_ = false;
};

}  // namespace folgrade

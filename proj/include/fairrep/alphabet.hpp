#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairrep/common.hpp"

namespace fairrep {

/// A named finite alphabet: an ordered list of distinct symbol labels.
class Alphabet {
 public:
  Alphabet(std::string name, std::vector<std::string> symbols)
      : name_(std::move(name)), symbols_(std::move(symbols)) {
    if (symbols_.empty()) {
      throw std::invalid_argument("alphabet '" + name_ + "' has no symbols");
    }
    std::unordered_set<std::string> seen;
    for (const auto& s : symbols_) {
      if (!seen.insert(s).second) {
        throw std::invalid_argument("alphabet '" + name_ +
                                    "' has duplicate symbol '" + s + "'");
      }
    }
  }

  /// Alphabet with symbols "0", "1", ..., "n-1".
  static Alphabet indexed(std::string name, std::size_t n) {
    std::vector<std::string> syms;
    syms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) syms.push_back(std::to_string(i));
    return Alphabet(std::move(name), std::move(syms));
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }

  bool operator==(const Alphabet& other) const {
    return name_ == other.name_ && symbols_ == other.symbols_;
  }

 private:
  std::string name_;
  std::vector<std::string> symbols_;
};

/// A named random variable together with its alphabet.
struct Variable {
  std::string name;
  Alphabet alphabet;

  bool operator==(const Variable& other) const {
    return name == other.name && alphabet == other.alphabet;
  }
};

}  // namespace fairrep

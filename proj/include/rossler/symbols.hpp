#pragma once

// Words over the alphabet {1,2}: finite, or eventually periodic via an
// optional (tail_start, period) marker.  Itineraries, kneading invariants
// and the signed-lexicographic (unimodal) order live here.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rossler/core.hpp"

namespace rossler {

class SymbolSequence {
 public:
  SymbolSequence() = default;

  // Finite word.
  explicit SymbolSequence(std::vector<uint8_t> word);

  // Eventually periodic: word[tail_start..] repeats forever.
  SymbolSequence(std::vector<uint8_t> word, std::size_t tail_start);

  // Purely periodic repetition of `period_word`.
  static SymbolSequence periodic(std::vector<uint8_t> period_word);

  // Parse "122", "1,2,2" or "(122)" as a purely periodic word.
  static SymbolSequence parse_periodic(const std::string& text);

  bool is_infinite() const { return tail_.has_value(); }
  bool is_periodic() const { return tail_ && tail_->first == 0; }
  std::size_t explicit_size() const { return word_.size(); }

  // Period of the repeating tail (0 for finite words).
  std::size_t tail_period() const { return tail_ ? tail_->second : 0; }
  std::size_t tail_start() const { return tail_ ? tail_->first : word_.size(); }

  // Number of leading symbols that are defined (SIZE_MAX when infinite).
  std::size_t available_depth() const;

  // Symbol at position i (0-based); i must be < available_depth().
  uint8_t at(std::size_t i) const;

  // Minimal period of the repeating part (periodic sequences only).
  std::size_t minimal_period() const;

  // sigma^k: drop the first k symbols.
  SymbolSequence shift(std::size_t k = 1) const;

  // For a purely periodic word: all rotations of the period (deduplicated).
  std::vector<SymbolSequence> rotations() const;

  // Reduce a purely periodic word to its minimal period.
  SymbolSequence canonical_periodic() const;

  bool identical(const SymbolSequence& o) const;

  std::vector<uint8_t> prefix(std::size_t n) const;

  std::string to_string() const;  // e.g. "1,2,2" or "1,2,(1,1)"

 private:
  std::vector<uint8_t> word_;
  std::optional<std::pair<std::size_t, std::size_t>> tail_;
};

enum class Ordering { Less, Equal, Greater };

// Signed-lexicographic comparison.  Scan to the first disagreement; the
// comparison at that position uses the base order 2 < 1 and flips for
// every symbol 2 in the common prefix (symbol 2 marks the
// orientation-reversing branch).  The convention is frozen by the
// realization oracle: larger sequences correspond to larger points.
// Throws IncomparableDepth when the available depth is exhausted without
// a decision and the sequences are not provably equal.
Ordering unimodal_compare(const SymbolSequence& s, const SymbolSequence& t);

inline bool unimodal_leq(const SymbolSequence& s, const SymbolSequence& t) {
  return unimodal_compare(s, t) != Ordering::Greater;
}

}  // namespace rossler

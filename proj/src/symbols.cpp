#include "rossler/symbols.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace rossler {

namespace {

void validate(const std::vector<uint8_t>& w) {
  for (uint8_t s : w)
    if (s != 1 && s != 2) throw DomainError("SymbolSequence: alphabet is {1,2}");
}

}  // namespace

SymbolSequence::SymbolSequence(std::vector<uint8_t> word) : word_(std::move(word)) {
  validate(word_);
}

SymbolSequence::SymbolSequence(std::vector<uint8_t> word, std::size_t tail_start)
    : word_(std::move(word)) {
  validate(word_);
  if (tail_start >= word_.size())
    throw DomainError("SymbolSequence: tail_start beyond word");
  tail_ = {tail_start, word_.size() - tail_start};
}

SymbolSequence SymbolSequence::periodic(std::vector<uint8_t> period_word) {
  if (period_word.empty()) throw DomainError("SymbolSequence: empty period");
  return SymbolSequence(std::move(period_word), 0);
}

SymbolSequence SymbolSequence::parse_periodic(const std::string& text) {
  std::vector<uint8_t> w;
  for (char ch : text) {
    if (ch == '1')
      w.push_back(1);
    else if (ch == '2')
      w.push_back(2);
    else if (ch == '(' || ch == ')' || ch == ',' || ch == ' ')
      continue;
    else
      throw DomainError(std::string("cannot parse symbol '") + ch + "'");
  }
  if (w.empty()) throw DomainError("empty symbol word");
  return periodic(std::move(w));
}

std::size_t SymbolSequence::available_depth() const {
  return tail_ ? std::numeric_limits<std::size_t>::max() : word_.size();
}

uint8_t SymbolSequence::at(std::size_t i) const {
  if (i < word_.size()) return word_[i];
  if (!tail_) throw DomainError("SymbolSequence: index past finite word");
  const auto [start, period] = *tail_;
  return word_[start + (i - start) % period];
}

std::size_t SymbolSequence::minimal_period() const {
  if (!is_periodic()) throw DomainError("minimal_period: not purely periodic");
  const std::size_t n = word_.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = word_[i] == word_[i - p];
    if (ok) return p;
  }
  return n;
}

SymbolSequence SymbolSequence::shift(std::size_t k) const {
  if (!tail_) {
    std::vector<uint8_t> w(word_.begin() + std::min(k, word_.size()), word_.end());
    return SymbolSequence(std::move(w));
  }
  const auto [start, period] = *tail_;
  if (k <= start) {
    std::vector<uint8_t> w(word_.begin() + k, word_.end());
    return SymbolSequence(std::move(w), start - k);
  }
  // Shift lands inside the periodic tail: rotate the period.
  const std::size_t r = (k - start) % period;
  std::vector<uint8_t> w;
  w.reserve(period);
  for (std::size_t i = 0; i < period; ++i) w.push_back(word_[start + (r + i) % period]);
  return periodic(std::move(w));
}

std::vector<SymbolSequence> SymbolSequence::rotations() const {
  const SymbolSequence base = canonical_periodic();
  const std::size_t p = base.word_.size();
  std::vector<SymbolSequence> out;
  for (std::size_t r = 0; r < p; ++r) {
    std::vector<uint8_t> w;
    w.reserve(p);
    for (std::size_t i = 0; i < p; ++i) w.push_back(base.word_[(r + i) % p]);
    SymbolSequence cand = periodic(std::move(w));
    bool dup = false;
    for (const auto& existing : out)
      if (existing.word_ == cand.word_) dup = true;
    if (!dup) out.push_back(std::move(cand));
  }
  return out;
}

SymbolSequence SymbolSequence::canonical_periodic() const {
  if (!is_periodic()) throw DomainError("canonical_periodic: not purely periodic");
  const std::size_t p = minimal_period();
  return periodic(std::vector<uint8_t>(word_.begin(), word_.begin() + p));
}

bool SymbolSequence::identical(const SymbolSequence& o) const {
  const bool inf_a = is_infinite(), inf_b = o.is_infinite();
  if (inf_a != inf_b) return false;
  if (!inf_a) return word_ == o.word_;
  // Both eventually periodic: agree up to preperiod + lcm of periods.
  const std::size_t pa = tail_->second, pb = o.tail_->second;
  const std::size_t pre = std::max(tail_->first, o.tail_->first);
  const std::size_t depth = pre + std::lcm(pa, pb);
  for (std::size_t i = 0; i < depth; ++i)
    if (at(i) != o.at(i)) return false;
  return true;
}

std::vector<uint8_t> SymbolSequence::prefix(std::size_t n) const {
  std::vector<uint8_t> out;
  out.reserve(n);
  const std::size_t avail = available_depth();
  for (std::size_t i = 0; i < n && i < avail; ++i) out.push_back(at(i));
  return out;
}

std::string SymbolSequence::to_string() const {
  std::ostringstream os;
  const std::size_t head = tail_ ? tail_->first : word_.size();
  for (std::size_t i = 0; i < head; ++i) {
    if (i) os << ',';
    os << int(word_[i]);
  }
  if (tail_) {
    if (head) os << ',';
    os << '(';
    for (std::size_t i = head; i < word_.size(); ++i) {
      if (i > head) os << ',';
      os << int(word_[i]);
    }
    os << ')';
  }
  return os.str();
}

Ordering unimodal_compare(const SymbolSequence& s, const SymbolSequence& t) {
  if (s.identical(t)) return Ordering::Equal;

  std::size_t depth;
  if (s.is_infinite() && t.is_infinite()) {
    // identical() above would have caught equality; a disagreement must
    // show up within the combined preperiod + lcm window.
    const std::size_t pa = s.tail_period(), pb = t.tail_period();
    depth = std::max(s.tail_start(), t.tail_start()) + std::lcm(pa, pb) + 1;
  } else {
    depth = std::min(s.available_depth(), t.available_depth());
  }

  int parity = 1;  // +1: base order (2 < 1); -1: reversed
  for (std::size_t i = 0; i < depth; ++i) {
    const uint8_t a = s.at(i), b = t.at(i);
    if (a != b) {
      const bool s_greater_base = (a == 1);  // base order: 1 > 2
      const bool s_greater = (parity > 0) ? s_greater_base : !s_greater_base;
      return s_greater ? Ordering::Greater : Ordering::Less;
    }
    if (a == 2) parity = -parity;
  }
  if (!s.is_infinite() && !t.is_infinite() && s.explicit_size() == t.explicit_size())
    return Ordering::Equal;
  throw IncomparableDepth("unimodal_compare: no disagreement within available depth");
}

}  // namespace rossler

#ifndef TAXALIGN_CELL_SET_HPP_
#define TAXALIGN_CELL_SET_HPP_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace taxalign {

// Fixed-width bitset over region-grid cells. The solver's inner loop is a
// handful of fused and/andnot/any scans over these, so they are spelled out
// rather than going through temporaries.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }

  void set(std::size_t i) { words_[i / 64] |= bit(i); }
  void reset(std::size_t i) { words_[i / 64] &= ~bit(i); }
  bool test(std::size_t i) const { return (words_[i / 64] & bit(i)) != 0; }

  void set_all() {
    for (auto& w : words_) w = ~std::uint64_t{0};
    trim();
  }

  bool any() const {
    for (auto w : words_)
      if (w != 0) return true;
    return false;
  }
  bool none() const { return !any(); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // true iff every element of *this is also in `other`
  bool is_subset_of(const CellSet& other) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if ((words_[k] & ~other.words_[k]) != 0) return false;
    return true;
  }

  bool intersects(const CellSet& other) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if ((words_[k] & other.words_[k]) != 0) return true;
    return false;
  }

  // (a & b & c) != 0
  static bool any_and(const CellSet& a, const CellSet& b, const CellSet& c) {
    for (std::size_t k = 0; k < a.words_.size(); ++k)
      if ((a.words_[k] & b.words_[k] & c.words_[k]) != 0) return true;
    return false;
  }
  // (a & ~b & c) != 0
  static bool any_andnot(const CellSet& a, const CellSet& b, const CellSet& c) {
    for (std::size_t k = 0; k < a.words_.size(); ++k)
      if ((a.words_[k] & ~b.words_[k] & c.words_[k]) != 0) return true;
    return false;
  }

  CellSet& operator|=(const CellSet& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  CellSet& operator&=(const CellSet& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  // *this = *this & ~o
  CellSet& subtract(const CellSet& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
    return *this;
  }
  CellSet complement() const {
    CellSet out(*this);
    for (auto& w : out.words_) w = ~w;
    out.trim();
    return out;
  }

  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  friend CellSet operator-(CellSet a, const CellSet& b) { return a.subtract(b); }

  std::vector<std::size_t> elements() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < words_.size(); ++k) {
      for (std::uint64_t w = words_[k]; w != 0; w &= w - 1)
        out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
    }
    return out;
  }

  bool operator==(const CellSet&) const = default;

 private:
  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << (i % 64); }
  void trim() {
    if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace taxalign

#endif  // TAXALIGN_CELL_SET_HPP_

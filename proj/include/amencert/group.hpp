#pragma once

// Words, Cayley balls and finitely supported kernels for free groups F_k and
// free abelian groups Z^d with their standard symmetric generating sets.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace amencert {

enum class Family { Free, FreeAbelian };

/// Letter index in the generating set: 2*i is generator i, 2*i+1 its inverse.
using Letter = int;

constexpr Letter inverse_letter(Letter s) { return s ^ 1; }

/// Group family plus rank. Generators are listed as a, A, b, B, ... (capital = inverse).
struct GroupSpec {
  Family family = Family::Free;
  int rank = 2;

  int num_generators() const { return 2 * rank; }
  std::vector<Letter> generators() const;
  bool is_amenable() const { return family == Family::FreeAbelian || rank == 1; }
  std::string describe() const;

  auto operator<=>(const GroupSpec&) const = default;
  bool operator==(const GroupSpec&) const = default;
};

/// Validated constructors; rank must lie in [1, 26].
GroupSpec free_group(int rank);
GroupSpec free_abelian_group(int rank);

char letter_symbol(Letter s);
Letter letter_from_symbol(const GroupSpec& spec, char c);

/// Reduced word. Free: no adjacent s s^-1. FreeAbelian: letters sorted by
/// generator, each generator with a single sign. Equality is structural.
class Word {
 public:
  Word() = default;
  explicit Word(GroupSpec spec) : spec_(spec) {}

  const GroupSpec& spec() const { return spec_; }
  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }

  std::string to_string() const;

  /// Shortlex within a spec.
  std::strong_ordering operator<=>(const Word& other) const;
  bool operator==(const Word& other) const = default;

 private:
  friend Word reduce(const GroupSpec& spec, const std::vector<Letter>& letters);
  GroupSpec spec_;
  std::vector<Letter> letters_;
};

Word identity(const GroupSpec& spec);
Word generator_word(const GroupSpec& spec, Letter s);

/// Canonical reduced form of an arbitrary letter sequence.
Word reduce(const GroupSpec& spec, const std::vector<Letter>& letters);
/// Parses "aBb" style strings; "" and "e" denote the identity.
Word parse_word(const GroupSpec& spec, std::string_view text);

Word mul(const Word& g, const Word& h);
Word inv(const Word& g);
/// Word-length distance |g^-1 h|.
std::size_t word_distance(const Word& g, const Word& h);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

inline constexpr std::size_t kDefaultBallCap = 1'000'000;

/// Exact number of elements with |g| <= radius, saturating at SIZE_MAX.
std::size_t ball_size(const GroupSpec& spec, int radius);
std::size_t sphere_size(const GroupSpec& spec, int radius);

/// All words of length <= radius in breadth-first order (generators in listed
/// order), identity at index 0.
class CayleyBall {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const GroupSpec& spec() const { return spec_; }
  int radius() const { return radius_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Word>& elements() const { return elements_; }
  const Word& operator[](std::size_t i) const { return elements_[i]; }

  std::size_t index_of(const Word& w) const;
  bool contains(const Word& w) const { return index_of(w) != npos; }

  /// table[i * #S + s] = index of s * elements[i], or npos outside the ball.
  std::vector<std::size_t> left_neighbor_table() const;

 private:
  friend CayleyBall ball(const GroupSpec&, int, std::size_t);
  GroupSpec spec_;
  int radius_ = 0;
  std::vector<Word> elements_;
  std::unordered_map<Word, std::size_t, WordHash> index_;
};

CayleyBall ball(const GroupSpec& spec, int radius, std::size_t cap = kDefaultBallCap);

/// Finitely supported real function on the group; entries that are exactly
/// zero are not stored.
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(GroupSpec spec) : spec_(spec) {}

  static Kernel delta(const Word& g, double value = 1.0);

  const GroupSpec& spec() const { return spec_; }
  const std::map<Word, double>& values() const { return values_; }
  std::size_t support_size() const { return values_.size(); }

  double operator()(const Word& g) const;
  void set(const Word& g, double value);
  void add(const Word& g, double value);

  double norm_squared() const;
  /// (s . f)(g) = f(s^-1 g)
  Kernel translate(const Word& s) const;
  double dot(const Kernel& other) const;

  bool operator==(const Kernel&) const = default;

 private:
  GroupSpec spec_;
  std::map<Word, double> values_;
};

Kernel operator+(const Kernel& p, const Kernel& q);

/// (p * q)(g) = sum_h p(h) q(h^-1 g)
Kernel convolve(const Kernel& p, const Kernel& q);

}  // namespace amencert

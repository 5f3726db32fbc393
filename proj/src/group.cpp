#include "amencert/group.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "amencert/errors.hpp"

namespace amencert {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t sat_add(std::size_t a, std::size_t b) {
  return (a > kSaturated - b) ? kSaturated : a + b;
}

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  return (a > kSaturated / b) ? kSaturated : a * b;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step
    const std::size_t num = sat_mul(r, n - k + i);
    if (num == kSaturated) return kSaturated;
    r = num / i;
  }
  return r;
}

void check_spec(const GroupSpec& spec) {
  if (spec.rank < 1 || spec.rank > 26) {
    throw InputError("group rank must be in [1, 26], got " + std::to_string(spec.rank));
  }
}

}  // namespace

GroupSpec free_group(int rank) {
  GroupSpec s{Family::Free, rank};
  check_spec(s);
  return s;
}

GroupSpec free_abelian_group(int rank) {
  GroupSpec s{Family::FreeAbelian, rank};
  check_spec(s);
  return s;
}

std::vector<Letter> GroupSpec::generators() const {
  std::vector<Letter> out(static_cast<std::size_t>(num_generators()));
  for (int i = 0; i < num_generators(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

std::string GroupSpec::describe() const {
  return (family == Family::Free ? "F" : "Z^") + std::to_string(rank);
}

char letter_symbol(Letter s) {
  const char base = (s & 1) ? 'A' : 'a';
  return static_cast<char>(base + s / 2);
}

Letter letter_from_symbol(const GroupSpec& spec, char c) {
  int g = -1;
  Letter s = -1;
  if (c >= 'a' && c <= 'z') {
    g = c - 'a';
    s = 2 * g;
  } else if (c >= 'A' && c <= 'Z') {
    g = c - 'A';
    s = 2 * g + 1;
  }
  if (g < 0 || g >= spec.rank) {
    throw InputError(std::string("unknown generator symbol '") + c + "' for " + spec.describe());
  }
  return s;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "e";
  std::string out;
  out.reserve(letters_.size());
  for (Letter s : letters_) out.push_back(letter_symbol(s));
  return out;
}

std::strong_ordering Word::operator<=>(const Word& other) const {
  if (auto c = spec_ <=> other.spec_; c != 0) return c;
  if (auto c = letters_.size() <=> other.letters_.size(); c != 0) return c;
  return letters_ <=> other.letters_;
}

Word identity(const GroupSpec& spec) { return Word(spec); }

Word generator_word(const GroupSpec& spec, Letter s) { return reduce(spec, {s}); }

Word reduce(const GroupSpec& spec, const std::vector<Letter>& letters) {
  check_spec(spec);
  const int ns = spec.num_generators();
  for (Letter s : letters) {
    if (s < 0 || s >= ns) {
      throw InputError("letter index " + std::to_string(s) + " outside generating set of " +
                       spec.describe());
    }
  }
  Word w(spec);
  if (spec.family == Family::Free) {
    auto& out = w.letters_;
    out.reserve(letters.size());
    for (Letter s : letters) {
      if (!out.empty() && out.back() == inverse_letter(s)) {
        out.pop_back();
      } else {
        out.push_back(s);
      }
    }
  } else {
    std::vector<long> exponent(static_cast<std::size_t>(spec.rank), 0);
    for (Letter s : letters) exponent[static_cast<std::size_t>(s / 2)] += (s & 1) ? -1 : 1;
    for (int i = 0; i < spec.rank; ++i) {
      const long e = exponent[static_cast<std::size_t>(i)];
      const Letter s = e >= 0 ? 2 * i : 2 * i + 1;
      w.letters_.insert(w.letters_.end(), static_cast<std::size_t>(e >= 0 ? e : -e), s);
    }
  }
  return w;
}

Word parse_word(const GroupSpec& spec, std::string_view text) {
  if (text == "e") return identity(spec);
  std::vector<Letter> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(letter_from_symbol(spec, c));
  return reduce(spec, letters);
}

Word mul(const Word& g, const Word& h) {
  if (g.spec() != h.spec()) {
    throw InputError("cannot multiply words of " + g.spec().describe() + " and " +
                     h.spec().describe());
  }
  std::vector<Letter> letters = g.letters();
  letters.insert(letters.end(), h.letters().begin(), h.letters().end());
  return reduce(g.spec(), letters);
}

Word inv(const Word& g) {
  std::vector<Letter> letters(g.letters().rbegin(), g.letters().rend());
  for (Letter& s : letters) s = inverse_letter(s);
  return reduce(g.spec(), letters);
}

std::size_t word_distance(const Word& g, const Word& h) { return mul(inv(g), h).length(); }

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = static_cast<std::size_t>(w.spec().rank) * 2 +
                  (w.spec().family == Family::Free ? 0 : 1);
  for (Letter s : w.letters()) h = h * 1000003u ^ static_cast<std::size_t>(s + 1);
  return h;
}

std::size_t sphere_size(const GroupSpec& spec, int radius) {
  if (radius < 0) return 0;
  if (radius == 0) return 1;
  const auto r = static_cast<std::size_t>(radius);
  if (spec.family == Family::Free) {
    // 2k (2k-1)^(r-1)
    std::size_t n = static_cast<std::size_t>(spec.num_generators());
    const std::size_t q = n - 1;
    for (std::size_t i = 1; i < r; ++i) n = sat_mul(n, q);
    return n;
  }
  // Lattice points with |x|_1 = r in Z^d: sum_i 2^i C(d,i) C(r-1,i-1).
  std::size_t total = 0;
  const auto d = static_cast<std::size_t>(spec.rank);
  for (std::size_t i = 1; i <= std::min(d, r); ++i) {
    const std::size_t term =
        sat_mul(sat_mul(std::size_t{1} << i, binomial(d, i)), binomial(r - 1, i - 1));
    total = sat_add(total, term);
  }
  return total;
}

std::size_t ball_size(const GroupSpec& spec, int radius) {
  std::size_t total = 0;
  for (int r = 0; r <= radius; ++r) {
    total = sat_add(total, sphere_size(spec, r));
    if (total == kSaturated) break;
  }
  return total;
}

std::size_t CayleyBall::index_of(const Word& w) const {
  const auto it = index_.find(w);
  return it == index_.end() ? npos : it->second;
}

std::vector<std::size_t> CayleyBall::left_neighbor_table() const {
  const auto ns = static_cast<std::size_t>(spec_.num_generators());
  std::vector<std::size_t> table(elements_.size() * ns, npos);
  std::vector<Word> gens;
  for (Letter s = 0; s < spec_.num_generators(); ++s) gens.push_back(generator_word(spec_, s));
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    for (std::size_t s = 0; s < ns; ++s) table[i * ns + s] = index_of(mul(gens[s], elements_[i]));
  }
  return table;
}

CayleyBall ball(const GroupSpec& spec, int radius, std::size_t cap) {
  check_spec(spec);
  if (radius < 0) throw InputError("ball radius must be nonnegative");
  const std::size_t expected = ball_size(spec, radius);
  if (expected > cap) {
    throw ResourceError("ball of radius " + std::to_string(radius) + " in " + spec.describe() +
                        " has " + (expected == kSaturated ? "overflowing" : std::to_string(expected)) +
                        " elements, cap is " + std::to_string(cap));
  }
  CayleyBall b;
  b.spec_ = spec;
  b.radius_ = radius;
  b.elements_.reserve(expected);
  b.index_.reserve(expected);
  b.elements_.push_back(identity(spec));
  b.index_.emplace(b.elements_.front(), 0);

  std::size_t level_begin = 0;
  for (int r = 0; r < radius; ++r) {
    const std::size_t level_end = b.elements_.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (Letter s = 0; s < spec.num_generators(); ++s) {
        // copy: push_back below may reallocate
        std::vector<Letter> letters = b.elements_[i].letters();
        letters.push_back(s);
        Word w = reduce(spec, letters);
        if (w.length() != static_cast<std::size_t>(r + 1)) continue;
        if (b.index_.contains(w)) continue;
        b.index_.emplace(w, b.elements_.size());
        b.elements_.push_back(std::move(w));
      }
    }
    level_begin = level_end;
  }
  if (b.elements_.size() != expected) {
    throw NumericError("ball enumeration produced " + std::to_string(b.elements_.size()) +
                       " elements, expected " + std::to_string(expected));
  }
  return b;
}

Kernel Kernel::delta(const Word& g, double value) {
  Kernel k(g.spec());
  k.set(g, value);
  return k;
}

double Kernel::operator()(const Word& g) const {
  const auto it = values_.find(g);
  return it == values_.end() ? 0.0 : it->second;
}

void Kernel::set(const Word& g, double value) {
  if (g.spec() != spec_) throw InputError("kernel and word belong to different groups");
  if (value == 0.0) {
    values_.erase(g);
  } else {
    values_[g] = value;
  }
}

void Kernel::add(const Word& g, double value) { set(g, (*this)(g) + value); }

double Kernel::norm_squared() const {
  double s = 0.0;
  for (const auto& [w, v] : values_) s += v * v;
  return s;
}

Kernel Kernel::translate(const Word& s) const {
  Kernel out(spec_);
  for (const auto& [w, v] : values_) out.values_.emplace(mul(s, w), v);
  return out;
}

double Kernel::dot(const Kernel& other) const {
  if (other.spec_ != spec_) throw InputError("kernels belong to different groups");
  double s = 0.0;
  for (const auto& [w, v] : values_) s += v * other(w);
  return s;
}

Kernel operator+(const Kernel& p, const Kernel& q) {
  if (p.spec() != q.spec()) throw InputError("kernels belong to different groups");
  Kernel out = p;
  for (const auto& [w, v] : q.values()) out.add(w, v);
  return out;
}

Kernel convolve(const Kernel& p, const Kernel& q) {
  if (p.spec() != q.spec()) throw InputError("kernels belong to different groups");
  // (p*q)(g) = sum_h p(h) q(h^-1 g); substituting k = h^-1 g gives g = h k.
  std::map<Word, double> acc;
  for (const auto& [h, ph] : p.values()) {
    for (const auto& [k, qk] : q.values()) acc[mul(h, k)] += ph * qk;
  }
  Kernel out(p.spec());
  for (const auto& [w, v] : acc) out.set(w, v);
  return out;
}

}  // namespace amencert

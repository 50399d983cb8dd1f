#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "teachkit/errors.hpp"
#include "teachkit/rational.hpp"

namespace teachkit {

// Concepts over a domain of at most 63 instances are stored as bit masks;
// instance j corresponds to bit j.
using Mask = std::uint64_t;

inline constexpr std::size_t kMaxDomainSize = 63;
inline constexpr std::size_t kMaxPowersetDomain = 20;

inline int popcount(Mask m) { return std::popcount(m); }

inline Mask full_mask(std::size_t m) {
  return (m >= 64) ? ~Mask{0} : ((Mask{1} << m) - 1);
}

struct Domain {
  std::size_t size = 0;
  std::vector<std::string> labels;  // optional display names, empty = none

  static Domain of(std::size_t m) {
    if (m < 1 || m > kMaxDomainSize)
      throw InvalidArgument("domain size must be in [1, 63], got " +
                            std::to_string(m));
    return Domain{m, {}};
  }

  static Domain named(std::vector<std::string> names) {
    Domain d = of(names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j])
          throw InvalidArgument("duplicate instance label '" + names[i] + "'");
    d.labels = std::move(names);
    return d;
  }

  std::string label(std::size_t i) const {
    if (i < labels.size()) return labels[i];
    return "x" + std::to_string(i);
  }
};

struct LabeledExample {
  std::size_t instance = 0;
  bool label = false;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
  friend auto operator<=>(const LabeledExample&, const LabeledExample&) = default;
};

// A set of labelled examples with at most one label per instance.
class Sample {
 public:
  Sample() = default;

  static Sample of(std::initializer_list<LabeledExample> xs) {
    Sample s;
    for (const auto& x : xs) s.add(x.instance, x.label);
    return s;
  }

  static Sample from_masks(Mask instances, Mask positives) {
    if ((positives & ~instances) != 0)
      throw InvalidArgument("positive labels outside the sample's instances");
    Sample s;
    s.instances_ = instances;
    s.positives_ = positives;
    return s;
  }

  // All instances of `concept_mask` restricted to `instances`, labelled as in
  // the concept. This is the only consistent sample on that instance set.
  static Sample restriction(Mask concept_mask, Mask instances) {
    return from_masks(instances, concept_mask & instances);
  }

  void add(std::size_t instance, bool label) {
    if (instance >= kMaxDomainSize + 1)
      throw IndexOutOfRange("instance index " + std::to_string(instance) +
                            " out of range");
    Mask bit = Mask{1} << instance;
    if (instances_ & bit) {
      bool existing = (positives_ & bit) != 0;
      if (existing != label)
        throw InvalidArgument("contradictory labels for instance " +
                              std::to_string(instance));
      return;
    }
    instances_ |= bit;
    if (label) positives_ |= bit;
  }

  Mask instances() const { return instances_; }
  Mask positives() const { return positives_; }
  std::size_t size() const { return static_cast<std::size_t>(popcount(instances_)); }
  bool empty() const { return instances_ == 0; }
  bool positive_only() const { return positives_ == instances_; }

  bool mentions(std::size_t instance) const {
    return (instances_ >> instance) & 1;
  }
  bool label_of(std::size_t instance) const {
    return (positives_ >> instance) & 1;
  }

  bool consistent_with(Mask concept_mask) const {
    return (concept_mask & instances_) == positives_;
  }

  // True if every labelled example of this sample occurs in `other`.
  bool subset_of(const Sample& other) const {
    return (instances_ & other.instances_) == instances_ &&
           (other.positives_ & instances_) == positives_;
  }

  Sample united_with(const Sample& other) const {
    Mask both = instances_ & other.instances_;
    if ((positives_ & both) != (other.positives_ & both))
      throw InvalidArgument("samples disagree on a shared instance");
    return from_masks(instances_ | other.instances_,
                      positives_ | other.positives_);
  }

  std::vector<LabeledExample> examples() const {
    std::vector<LabeledExample> out;
    for (Mask rest = instances_; rest;) {
      std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
      out.push_back({i, label_of(i)});
      rest &= rest - 1;
    }
    return out;
  }

  // "(0,1),(4,0)"; empty sample prints as "-".
  std::string to_string() const {
    if (empty()) return "-";
    std::string out;
    for (const auto& [i, l] : examples()) {
      if (!out.empty()) out += ",";
      out += "(" + std::to_string(i) + "," + (l ? "1" : "0") + ")";
    }
    return out;
  }

  static Sample parse(const std::string& text, std::size_t line = 0);

  friend bool operator==(const Sample&, const Sample&) = default;
  friend auto operator<=>(const Sample& a, const Sample& b) {
    return std::pair(a.instances_, a.positives_) <=>
           std::pair(b.instances_, b.positives_);
  }

 private:
  Mask instances_ = 0;
  Mask positives_ = 0;
};

// A concept paired with its domain size, for API boundaries; solver internals
// work on raw masks.
struct Concept {
  Mask bits = 0;
  std::size_t domain_size = 0;

  bool contains(std::size_t instance) const { return (bits >> instance) & 1; }
  std::size_t cardinality() const { return static_cast<std::size_t>(popcount(bits)); }
};

inline bool is_consistent(const Concept& c, const Sample& s) {
  if (s.instances() & ~full_mask(c.domain_size))
    throw DimensionMismatch("sample mentions instances outside the domain");
  return s.consistent_with(c.bits);
}

// A duplicate-free set of concepts in canonical (ascending mask) order.
// Canonical order makes every downstream tie-break reproducible.
class ConceptClass {
 public:
  static ConceptClass create(Domain domain, std::vector<Mask> concepts) {
    if (concepts.empty())
      throw InvalidArgument("a concept class must contain at least one concept");
    Mask valid = full_mask(domain.size);
    for (Mask c : concepts)
      if (c & ~valid)
        throw InvalidArgument("concept mentions instances outside the domain");
    std::sort(concepts.begin(), concepts.end());
    if (std::adjacent_find(concepts.begin(), concepts.end()) != concepts.end())
      throw InvalidArgument("duplicate concept in class");
    return ConceptClass(std::move(domain), std::move(concepts));
  }

  const Domain& domain() const { return domain_; }
  std::size_t domain_size() const { return domain_.size; }
  std::size_t size() const { return concepts_.size(); }
  const std::vector<Mask>& concepts() const { return concepts_; }

  Mask mask(std::size_t i) const {
    check_index(i);
    return concepts_[i];
  }
  Concept concept_at(std::size_t i) const { return {mask(i), domain_.size}; }

  bool contains(Mask c) const {
    return std::binary_search(concepts_.begin(), concepts_.end(), c);
  }
  // Index of `c`, or size() when absent.
  std::size_t index_of(Mask c) const {
    auto it = std::lower_bound(concepts_.begin(), concepts_.end(), c);
    if (it == concepts_.end() || *it != c) return concepts_.size();
    return static_cast<std::size_t>(it - concepts_.begin());
  }

  std::string row_string(std::size_t i) const {
    check_index(i);
    std::string row(domain_.size, '0');
    for (std::size_t j = 0; j < domain_.size; ++j)
      if ((concepts_[i] >> j) & 1) row[j] = '1';
    return row;
  }

  std::size_t index_of_row(const std::string& row) const {
    return index_of(mask_from_row(row, domain_.size));
  }

  static Mask mask_from_row(const std::string& row, std::size_t m) {
    if (row.size() != m)
      throw InvalidArgument("concept row has length " +
                            std::to_string(row.size()) + ", expected " +
                            std::to_string(m));
    Mask c = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (row[j] == '1')
        c |= Mask{1} << j;
      else if (row[j] != '0')
        throw InvalidArgument("concept row must consist of 0/1 characters");
    }
    return c;
  }

  friend bool operator==(const ConceptClass& a, const ConceptClass& b) {
    return a.domain_.size == b.domain_.size && a.concepts_ == b.concepts_;
  }

 private:
  ConceptClass(Domain domain, std::vector<Mask> concepts)
      : domain_(std::move(domain)), concepts_(std::move(concepts)) {}

  void check_index(std::size_t i) const {
    if (i >= concepts_.size())
      throw IndexOutOfRange("concept index " + std::to_string(i) +
                            " out of range (class size " +
                            std::to_string(concepts_.size()) + ")");
  }

  Domain domain_;
  std::vector<Mask> concepts_;
};

// ---------------------------------------------------------------------------
// Structural measures

inline std::vector<std::size_t> neighbors(const ConceptClass& cc, std::size_t i) {
  Mask ci = cc.mask(i);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < cc.size(); ++j)
    if (j != i && popcount(ci ^ cc.mask(j)) == 1) out.push_back(j);
  return out;
}

inline std::size_t degree(const ConceptClass& cc, std::size_t i) {
  return neighbors(cc, i).size();
}

inline Rational deg_avg(const ConceptClass& cc) {
  long long total = 0;
  for (std::size_t i = 0; i < cc.size(); ++i)
    total += static_cast<long long>(degree(cc, i));
  return Rational(total, static_cast<long long>(cc.size()));
}

// Number of neighbors with exactly one fewer member.
inline std::size_t dominance(const ConceptClass& cc, std::size_t i) {
  Mask ci = cc.mask(i);
  std::size_t count = 0;
  for (Mask rest = ci; rest;) {
    Mask bit = rest & (0 - rest);
    if (cc.contains(ci ^ bit)) ++count;
    rest &= rest - 1;
  }
  return count;
}

namespace detail {

// Visits every instance subset of size k in lexicographic order of index sets.
template <typename F>
void for_each_subset_of_size(std::size_t m, std::size_t k, F&& f) {
  if (k > m) return;
  if (k == 0) {
    f(Mask{0});
    return;
  }
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    Mask s = 0;
    for (std::size_t i : idx) s |= Mask{1} << i;
    f(s);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == m - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

inline bool shatters(const ConceptClass& cc, Mask subset, std::size_t k) {
  std::vector<char> seen(std::size_t{1} << k, 0);
  std::size_t distinct = 0;
  // Compress the projection onto `subset` into a k-bit pattern.
  std::vector<std::size_t> bits;
  for (Mask rest = subset; rest;) {
    bits.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
    rest &= rest - 1;
  }
  for (Mask c : cc.concepts()) {
    std::size_t pattern = 0;
    for (std::size_t b = 0; b < bits.size(); ++b)
      if ((c >> bits[b]) & 1) pattern |= std::size_t{1} << b;
    if (!seen[pattern]) {
      seen[pattern] = 1;
      if (++distinct == (std::size_t{1} << k)) return true;
    }
  }
  return false;
}

}  // namespace detail

inline std::size_t vc_dimension(const ConceptClass& cc) {
  std::size_t m = cc.domain_size();
  std::size_t d = 0;
  // Shattering is downward closed, so grow the target size one at a time.
  while (d < m) {
    std::size_t k = d + 1;
    if ((std::size_t{1} << k) > cc.size()) break;
    bool found = false;
    detail::for_each_subset_of_size(m, k, [&](Mask s) {
      if (!found && detail::shatters(cc, s, k)) found = true;
    });
    if (!found) break;
    d = k;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Class constructors

inline ConceptClass free_combination(const ConceptClass& a, const ConceptClass& b) {
  std::size_t m1 = a.domain_size(), m2 = b.domain_size();
  if (m1 + m2 > kMaxDomainSize)
    throw InvalidArgument("combined domain exceeds 63 instances");
  std::vector<Mask> out;
  out.reserve(a.size() * b.size());
  for (Mask c1 : a.concepts())
    for (Mask c2 : b.concepts()) out.push_back(c1 | (c2 << m1));
  return ConceptClass::create(Domain::of(m1 + m2), std::move(out));
}

inline ConceptClass k_power(const ConceptClass& cc, std::size_t k) {
  if (k < 1) throw InvalidArgument("k_power requires k >= 1");
  ConceptClass out = cc;
  for (std::size_t i = 1; i < k; ++i) out = free_combination(out, cc);
  return out;
}

inline ConceptClass powerset(std::size_t m) {
  if (m < 1 || m > kMaxPowersetDomain)
    throw InvalidArgument("powerset supports domain sizes 1..20, got " +
                          std::to_string(m));
  std::vector<Mask> concepts(std::size_t{1} << m);
  for (std::size_t c = 0; c < concepts.size(); ++c) concepts[c] = c;
  return ConceptClass::create(Domain::of(m), std::move(concepts));
}

// The ten concepts of Warmuth's class over {x0,...,x4}: the smallest class
// whose preference-based teaching dimension exceeds its VC-dimension.
inline ConceptClass warmuth_class() {
  static const char* rows[] = {"10001", "11000", "01100", "00110", "00011",
                               "10101", "11010", "01101", "10110", "01011"};
  std::vector<Mask> concepts;
  for (const char* r : rows) concepts.push_back(ConceptClass::mask_from_row(r, 5));
  return ConceptClass::create(
      Domain::named({"x1", "x2", "x3", "x4", "x5"}), std::move(concepts));
}

// Four concepts {i, (i+1) mod 4} on a 4-element domain; a single positive
// example per concept teaches it without clashes.
inline ConceptClass intro_cycle_class() {
  std::vector<Mask> concepts;
  for (std::size_t i = 0; i < 4; ++i)
    concepts.push_back((Mask{1} << i) | (Mask{1} << ((i + 1) % 4)));
  return ConceptClass::create(Domain::of(4), std::move(concepts));
}

inline ConceptClass singletons_plus_empty(std::size_t m) {
  Domain d = Domain::of(m);
  std::vector<Mask> concepts{0};
  for (std::size_t i = 0; i < m; ++i) concepts.push_back(Mask{1} << i);
  return ConceptClass::create(std::move(d), std::move(concepts));
}

inline ConceptClass remove_empty(const ConceptClass& cc) {
  if (!cc.contains(0)) return cc;
  if (cc.size() == 1)
    throw InvalidArgument("cannot remove the empty concept from {empty}");
  std::vector<Mask> rest;
  for (Mask c : cc.concepts())
    if (c != 0) rest.push_back(c);
  return ConceptClass::create(cc.domain(), std::move(rest));
}

// Restriction to a subset of concept indices (original domain retained).
inline ConceptClass subclass(const ConceptClass& cc,
                             const std::vector<std::size_t>& indices) {
  std::vector<Mask> sub;
  sub.reserve(indices.size());
  for (std::size_t i : indices) sub.push_back(cc.mask(i));
  return ConceptClass::create(cc.domain(), std::move(sub));
}

// ---------------------------------------------------------------------------
// Text format: line 1 "domain <m>", then one 0/1 row per concept.
// '#'-prefixed lines are comments. Writers emit canonical order.

inline ConceptClass parse_concept_class(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t m = 0;
  bool have_domain = false;
  std::vector<Mask> concepts;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::string tok = line.substr(start);
    if (!have_domain) {
      std::istringstream ss(tok);
      std::string kw;
      long long size = -1;
      ss >> kw >> size;
      if (kw != "domain" || size < 1)
        throw ParseError(lineno, start + 1, "expected 'domain <m>' header");
      if (size > static_cast<long long>(kMaxDomainSize))
        throw ParseError(lineno, start + 1, "domain size exceeds 63");
      m = static_cast<std::size_t>(size);
      have_domain = true;
      continue;
    }
    if (tok.size() != m)
      throw ParseError(lineno, start + 1,
                       "concept row has length " + std::to_string(tok.size()) +
                           ", expected " + std::to_string(m));
    for (std::size_t j = 0; j < tok.size(); ++j)
      if (tok[j] != '0' && tok[j] != '1')
        throw ParseError(lineno, start + j + 1, "expected '0' or '1'");
    concepts.push_back(ConceptClass::mask_from_row(tok, m));
  }
  if (!have_domain) throw ParseError(1, 1, "missing 'domain <m>' header");
  if (concepts.empty()) throw ParseError(lineno + 1, 1, "class has no concepts");
  std::sort(concepts.begin(), concepts.end());
  auto dup = std::adjacent_find(concepts.begin(), concepts.end());
  if (dup != concepts.end()) throw ParseError(lineno + 1, 1, "duplicate concept row");
  return ConceptClass::create(Domain::of(m), std::move(concepts));
}

inline ConceptClass parse_concept_class(const std::string& text) {
  std::istringstream in(text);
  return parse_concept_class(in);
}

inline void write_concept_class(std::ostream& out, const ConceptClass& cc) {
  out << "domain " << cc.domain_size() << "\n";
  for (std::size_t i = 0; i < cc.size(); ++i) out << cc.row_string(i) << "\n";
}

inline std::string format_concept_class(const ConceptClass& cc) {
  std::ostringstream out;
  write_concept_class(out, cc);
  return out.str();
}

inline Sample Sample::parse(const std::string& text, std::size_t line) {
  Sample s;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip_ws();
  if (i < text.size() && text[i] == '-' ) {
    ++i;
    skip_ws();
    if (i == text.size()) return s;
    throw ParseError(line, i + 1, "unexpected text after empty sample '-'");
  }
  while (i < text.size()) {
    skip_ws();
    if (i >= text.size()) break;
    if (text[i] != '(') throw ParseError(line, i + 1, "expected '('");
    ++i;
    std::size_t start = i;
    while (i < text.size() && text[i] != ',') ++i;
    if (i >= text.size()) throw ParseError(line, i + 1, "expected ','");
    std::size_t instance;
    try {
      instance = std::stoul(text.substr(start, i - start));
    } catch (const std::exception&) {
      throw ParseError(line, start + 1, "expected instance index");
    }
    ++i;
    if (i >= text.size() || (text[i] != '0' && text[i] != '1'))
      throw ParseError(line, i + 1, "expected label 0 or 1");
    bool label = text[i] == '1';
    ++i;
    if (i >= text.size() || text[i] != ')')
      throw ParseError(line, i + 1, "expected ')'");
    ++i;
    skip_ws();
    if (i < text.size()) {
      if (text[i] != ',') throw ParseError(line, i + 1, "expected ','");
      ++i;
    }
    try {
      s.add(instance, label);
    } catch (const Error& e) {
      throw ParseError(line, start, e.what());
    }
  }
  return s;
}

}  // namespace teachkit

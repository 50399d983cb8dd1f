#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace teachkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Raised when a concept has no teaching set made of positive examples only
// (some other concept contains it).
struct NoPositiveTeachingSet : Error {
  using Error::Error;
};

struct ParseError : Error {
  std::size_t line = 0;
  std::size_t column = 0;
  ParseError(std::size_t line_, std::size_t column_, const std::string& msg)
      : Error("parse error at line " + std::to_string(line_) + ", column " +
              std::to_string(column_) + ": " + msg),
        line(line_),
        column(column_) {}
};

// The decision problems behind the solvers are NP-hard, so every search is
// bounded. On exhaustion the solver reports the bracket it has proven:
// the answer lies in [proven_lower, known_upper] (known_upper < 0 when no
// feasible solution has been seen yet).
struct SearchBudgetExceeded : Error {
  long long proven_lower = 0;
  long long known_upper = -1;
  SearchBudgetExceeded(const std::string& what, long long lo, long long hi)
      : Error(what), proven_lower(lo), known_upper(hi) {}
};

// Node counter with an optional wall-clock deadline. tick() returns false
// once the budget is spent; solvers translate that into
// SearchBudgetExceeded with whatever bracket they have proven.
class Budget {
 public:
  Budget() = default;
  explicit Budget(std::uint64_t max_nodes, double max_seconds = 0.0)
      : max_nodes_(max_nodes) {
    if (max_seconds > 0.0) {
      deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(max_seconds));
      has_deadline_ = true;
    }
  }

  bool tick() {
    ++nodes_;
    if (max_nodes_ != 0 && nodes_ > max_nodes_) return false;
    if (has_deadline_ && (nodes_ & 0xFFF) == 0 && Clock::now() > deadline_)
      return false;
    return true;
  }

  std::uint64_t nodes_used() const { return nodes_; }

 private:
  using Clock = std::chrono::steady_clock;
  std::uint64_t max_nodes_ = 0;  // 0 = unlimited
  std::uint64_t nodes_ = 0;
  Clock::time_point deadline_{};
  bool has_deadline_ = false;
};

}  // namespace teachkit

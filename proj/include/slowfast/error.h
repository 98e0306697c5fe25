#ifndef SLOWFAST_ERROR_H_
#define SLOWFAST_ERROR_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace slowfast {

enum class ErrorKind {
  kInvalidInput,
  kInvalidConfig,
  kBudgetTooSmall,
  kInfeasibleMixture,
  kOversizeItem,
  kParse,
};

// Base for every error raised by the library. The kind decides the CLI exit
// code (see exit_code_for).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what)
      : Error(ErrorKind::kInvalidInput, what) {}
};

class InvalidConfigError : public Error {
 public:
  explicit InvalidConfigError(const std::string& what)
      : Error(ErrorKind::kInvalidConfig, what) {}
};

// Raised when even the smallest per-frame allocation exceeds the budget.
class BudgetTooSmallError : public Error {
 public:
  BudgetTooSmallError(std::int64_t min_total, std::int64_t budget);

  std::int64_t min_total() const { return min_total_; }
  std::int64_t budget() const { return budget_; }

 private:
  std::int64_t min_total_;
  std::int64_t budget_;
};

class InfeasibleMixtureError : public Error {
 public:
  InfeasibleMixtureError(std::int64_t achievable, std::int64_t budget);

  std::int64_t achievable() const { return achievable_; }

 private:
  std::int64_t achievable_;
};

class OversizeItemError : public Error {
 public:
  OversizeItemError(std::string id, std::int64_t length, std::int64_t capacity);

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Grounding markup error with the byte offset where parsing failed.
class GroundingParseError : public Error {
 public:
  GroundingParseError(std::size_t offset, std::string reason);

  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

// 2 input error, 3 infeasible budget/mixture, 4 parse error.
int exit_code_for(const Error& error);

}  // namespace slowfast

#endif  // SLOWFAST_ERROR_H_

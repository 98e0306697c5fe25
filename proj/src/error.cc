#include "slowfast/error.h"

#include <utility>

namespace slowfast {

BudgetTooSmallError::BudgetTooSmallError(std::int64_t min_total,
                                         std::int64_t budget)
    : Error(ErrorKind::kBudgetTooSmall,
            "token budget too small: minimum achievable total is " +
                std::to_string(min_total) + " tokens, budget is " +
                std::to_string(budget)),
      min_total_(min_total),
      budget_(budget) {}

InfeasibleMixtureError::InfeasibleMixtureError(std::int64_t achievable,
                                               std::int64_t budget)
    : Error(ErrorKind::kInfeasibleMixture,
            "infeasible mixture: only " + std::to_string(achievable) +
                " tokens available for a window budget of " +
                std::to_string(budget)),
      achievable_(achievable) {}

OversizeItemError::OversizeItemError(std::string id, std::int64_t length,
                                     std::int64_t capacity)
    : Error(ErrorKind::kOversizeItem,
            "item '" + id + "' has " + std::to_string(length) +
                " tokens, exceeding window capacity " +
                std::to_string(capacity)),
      id_(std::move(id)) {}

GroundingParseError::GroundingParseError(std::size_t offset, std::string reason)
    : Error(ErrorKind::kParse,
            "grounding parse error at byte " + std::to_string(offset) + ": " +
                reason),
      offset_(offset),
      reason_(std::move(reason)) {}

int exit_code_for(const Error& error) {
  switch (error.kind()) {
    case ErrorKind::kBudgetTooSmall:
    case ErrorKind::kInfeasibleMixture:
      return 3;
    case ErrorKind::kParse:
      return 4;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kInvalidConfig:
    case ErrorKind::kOversizeItem:
      return 2;
  }
  return 2;
}

}  // namespace slowfast

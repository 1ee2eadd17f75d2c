#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dimlab {

enum class ErrorCode {
  InvalidWord,
  InvalidArgument,
  OutOfRange,
  BudgetExceeded,
  UndefinedDimension,
  InsufficientData,
  DepthMismatch,
  ParameterError,
  UnsupportedLaw,
  Validation,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when an operation would materialise more words than allowed.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::uint64_t required, std::uint64_t budget)
      : Error(ErrorCode::BudgetExceeded,
              "word budget exceeded: need " + std::to_string(required) +
                  ", budget " + std::to_string(budget)),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

// Default cap on the number of cylinders a single operation may enumerate.
inline constexpr std::uint64_t kDefaultWordBudget = 5'000'000;

}  // namespace dimlab

#pragma once

#include <stdexcept>
#include <string>

namespace eagi {

// A physics input outside its domain. `quantity` names the offending input.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string quantity, const std::string& what)
      : std::domain_error(quantity + ": " + what), quantity_(std::move(quantity)) {}

  const std::string& quantity() const noexcept { return quantity_; }

 private:
  std::string quantity_;
};

// Bank or instance document rejected at load. line is 1-based, 0 when unknown.
class BankError : public std::runtime_error {
 public:
  BankError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Agent transport failed after all retries.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eagi

#pragma once

#include <stdexcept>
#include <string>

namespace fedgame {

// Every error carries a short machine-readable kind; the CLI prints it as the
// first field of its single-line error report.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error("numerical_failure", what) {}
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& what) : Error("rank_deficient", what) {}
};

class NoEquilibrium : public Error {
 public:
  explicit NoEquilibrium(const std::string& what) : Error("no_equilibrium", what) {}
};

class ModelRegimeError : public Error {
 public:
  explicit ModelRegimeError(const std::string& what) : Error("model_regime", what) {}
};

class ContributionDiscarded : public Error {
 public:
  explicit ContributionDiscarded(const std::string& what)
      : Error("contribution_discarded", what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("parse_error", what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace fedgame

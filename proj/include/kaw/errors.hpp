#pragma once

#include <stdexcept>
#include <string>

namespace kaw {

/// Invalid parameters, configuration values or preconditions.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A certificate required by an operation does not hold.
class CertificateError : public std::runtime_error {
public:
  CertificateError(std::string condition, const std::string& what)
      : std::runtime_error(what), condition_(std::move(condition)) {}
  const std::string& condition() const { return condition_; }

private:
  std::string condition_;
};

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_tolerance() const { return achieved_; }

private:
  double achieved_;
};

/// Time stepping failed (singular solve or non-finite state).
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, long step, double t)
      : std::runtime_error(what), step_(step), t_(t) {}
  long step() const { return step_; }
  double time() const { return t_; }

private:
  long step_;
  double t_;
};

/// History lookups outside the stored span.
class HistoryError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

}  // namespace kaw

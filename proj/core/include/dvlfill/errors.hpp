#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dvlfill {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. pitch >= 90 deg).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Fewer than three beams available; the velocity vector is unobservable.
class InsufficientBeams : public Error {
 public:
  using Error::Error;
};

/// Beam matrix is numerically rank deficient.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV input. `line()` is 1-based and counts the header.
class CsvError : public Error {
 public:
  CsvError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Training produced a non-finite loss.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t batch, double param_norm, const std::string& what)
      : Error(what), epoch_(epoch), batch_(batch), param_norm_(param_norm) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }
  double param_norm() const noexcept { return param_norm_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
  double param_norm_;
};

}  // namespace dvlfill

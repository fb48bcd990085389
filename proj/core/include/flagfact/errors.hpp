#pragma once

#include <complex>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace flagfact {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands belong to different algebra instances.
class InstanceMismatch : public Error {
 public:
  using Error::Error;
};

/// Smallest relative singular value fell below the invertibility threshold.
class NotInvertible : public Error {
 public:
  NotInvertible(const std::string& what, double sigma_min,
                std::optional<std::size_t> sample = std::nullopt)
      : Error(what), sigma_min_(sigma_min), sample_(sample) {}

  double sigma_min() const noexcept { return sigma_min_; }
  /// Worst grid index for loop-valued elements.
  std::optional<std::size_t> sample() const noexcept { return sample_; }

 private:
  double sigma_min_;
  std::optional<std::size_t> sample_;
};

class NotInCorner : public Error {
 public:
  using Error::Error;
};

class NotIdempotent : public Error {
 public:
  using Error::Error;
};

class NotEquivalent : public Error {
 public:
  using Error::Error;
};

class BadPartition : public Error {
 public:
  using Error::Error;
};

class BadWitness : public Error {
 public:
  using Error::Error;
};

class OutOfChart : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// The compression p_j g p_j is not invertible in the corner algebra p_j A p_j.
class CornerNotInvertible : public Error {
 public:
  CornerNotInvertible(std::size_t corner, double condition)
      : Error(message(corner, condition)),
        corner_(corner),
        condition_(condition) {}

  std::size_t corner() const noexcept { return corner_; }
  double condition() const noexcept { return condition_; }

 private:
  static std::string message(std::size_t corner, double condition) {
    std::ostringstream os;
    os << "corner " << corner << " is not invertible (relative sigma_min "
       << std::setprecision(3) << condition << ")";
    return os.str();
  }

  std::size_t corner_;
  double condition_;
};

class NotPositive : public Error {
 public:
  NotPositive(const std::string& what, std::vector<std::complex<double>> points)
      : Error(what), points_(std::move(points)) {}

  const std::vector<std::complex<double>>& points() const noexcept {
    return points_;
  }

 private:
  std::vector<std::complex<double>> points_;
};

}  // namespace flagfact

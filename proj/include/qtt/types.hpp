#ifndef QTT_TYPES_HPP_
#define QTT_TYPES_HPP_

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qtt {

using Complex = std::complex<double>;
using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// hbar = 1 throughout; only the mass is adjustable.
struct Units {
  double mass = 1.0;
};

// Base for all recoverable numerical-laboratory failures.  The category is
// stable and maps onto the CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { kSchema, kNumericalDomain, kPostSelection };

  Error(Category c, const std::string& msg) : std::runtime_error(msg), category_(c) {}
  Category category() const { return category_; }

 private:
  Category category_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& msg) : Error(Category::kSchema, msg) {}
};

class NumericalDomainError : public Error {
 public:
  explicit NumericalDomainError(const std::string& msg)
      : Error(Category::kNumericalDomain, msg) {}
};

// Thrown when a requested post-selection has (numerically) zero probability.
class PostSelectionError : public Error {
 public:
  explicit PostSelectionError(const std::string& msg)
      : Error(Category::kPostSelection, msg) {}
};

}  // namespace qtt

#endif  // QTT_TYPES_HPP_

#ifndef GAP_PREDICT_ERROR_HPP
#define GAP_PREDICT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gap_predict {

// Invalid arguments or a specification that violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not deliver a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(const std::string& what, long rank, long columns)
      : NumericalError(what), rank_(rank), columns_(columns) {}
  long rank() const { return rank_; }
  long columns() const { return columns_; }

 private:
  long rank_;
  long columns_;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double achieved)
      : NumericalError(what + " (achieved error estimate " +
                       std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace gap_predict

#endif  // GAP_PREDICT_ERROR_HPP

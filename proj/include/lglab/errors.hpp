#pragma once

#include <stdexcept>
#include <string>

namespace lglab {

/// Invalid model parameters or malformed/contradictory configuration.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed to reach its accuracy target.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Inverse-CDF sampling ran past the search horizon (p below resolvable floor).
class horizon_error : public std::runtime_error {
 public:
  horizon_error(const std::string& what, double t_max)
      : std::runtime_error(what), t_max_(t_max) {}
  double t_max() const { return t_max_; }

 private:
  double t_max_;
};

/// A probability rule was applied to a model that does not satisfy its premise
/// (e.g. the classical table on a non-monotone survival law).
class ontology_error : public std::runtime_error {
 public:
  explicit ontology_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lglab

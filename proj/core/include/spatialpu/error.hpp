#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace spu {

// Rejected input. `subject` names the offending node id, feature, file or
// filter when there is one, so the CLI can emit it in its error record.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what, std::string subject = {})
      : std::invalid_argument(what), subject_(std::move(subject)) {}

  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string subject_;
};

// A numerical or model-level failure that is not the caller's fault per se
// (singular kernel matrix, non-integrable pooled density, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spu

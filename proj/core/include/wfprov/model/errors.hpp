#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wfprov {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value or request failed validation (bad identifier, bad parameter, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A referenced entity does not exist. Distinct from an empty result.
class NotFoundError : public Error {
 public:
  NotFoundError(std::string kind, std::string id)
      : Error(kind + " not found: " + id), kind_(std::move(kind)), id_(std::move(id)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& id() const noexcept { return id_; }

 private:
  std::string kind_;
  std::string id_;
};

/// Insert of an id that already exists with a different value.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// A mutation or spec would introduce a dependency cycle.
class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> cycle);

  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

/// A federated backend could not be reached or returned garbage.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace wfprov

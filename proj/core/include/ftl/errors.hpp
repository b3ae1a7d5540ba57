#pragma once

#include <stdexcept>
#include <string>

namespace ftl {

/// Malformed configuration, or a learner paired with a feedback model it
/// cannot run under.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An environment, learner or suite id that does not name anything registered.
class IdResolutionError : public std::runtime_error {
 public:
  IdResolutionError(const std::string& kind, const std::string& id)
      : std::runtime_error("unknown " + kind + " id '" + id + "'"), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

}  // namespace ftl

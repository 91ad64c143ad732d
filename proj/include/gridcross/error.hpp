#pragma once

#include <stdexcept>
#include <string>

namespace gridcross {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value is outside its domain. `key()` names the offending entry.
class InvalidConfiguration : public Error {
 public:
  InvalidConfiguration(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class NotOnPath : public Error {
 public:
  using Error::Error;
};

/// Auction message or list shape violated the protocol contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridcross

#ifndef KHAYAL_ERROR_HPP
#define KHAYAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace khayal {

/// Broad failure classes. The CLI maps each class to its own exit code.
enum class ErrorClass {
  domain,        ///< input outside an operation's mathematical domain
  validation,    ///< malformed or inconsistent data files
  configuration, ///< parameter values outside their valid ranges
  io,            ///< missing or unreadable files
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorClass::domain, w) {}
};
struct OutOfRangeError : Error {
  explicit OutOfRangeError(const std::string& w) : Error(ErrorClass::domain, w) {}
};
struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& w) : Error(ErrorClass::domain, w) {}
};
/// Caller broke an operation's contract (e.g. comparing strings of different syllables).
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error(ErrorClass::domain, w) {}
};
/// Values that are individually well formed but do not make sense together.
struct DataError : Error {
  explicit DataError(const std::string& w) : Error(ErrorClass::validation, w) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorClass::validation, w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorClass::validation, w) {}
};
struct NotFoundError : Error {
  explicit NotFoundError(const std::string& w) : Error(ErrorClass::validation, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorClass::configuration, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorClass::io, w) {}
};

}  // namespace khayal

#endif  // KHAYAL_ERROR_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace emotutor {

// Every failure the library reports derives from Error so callers can map
// the concrete kind onto an HTTP status or a CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EMOTUTOR_ERROR(Name)                  \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  };

EMOTUTOR_ERROR(EmptyTrace)
EMOTUTOR_ERROR(DomainError)
EMOTUTOR_ERROR(ClockSkew)
EMOTUTOR_ERROR(InputError)
EMOTUTOR_ERROR(ConfigError)
EMOTUTOR_ERROR(StateError)
EMOTUTOR_ERROR(ClassifierUnavailable)
EMOTUTOR_ERROR(NotFound)
EMOTUTOR_ERROR(Busy)
EMOTUTOR_ERROR(BackendUnavailable)
EMOTUTOR_ERROR(NotImplemented)
EMOTUTOR_ERROR(MetricUndefined)
EMOTUTOR_ERROR(LoadError)
EMOTUTOR_ERROR(RunFailed)

#undef EMOTUTOR_ERROR

/// Raised when a judge's raw output cannot be turned into a complete verdict.
/// `fragment()` holds the piece of text that failed (a key, a label, or the
/// unparseable body).
class VerdictParseError : public Error {
 public:
  VerdictParseError(const std::string& what, std::string fragment)
      : Error(what + ": " + fragment), fragment_(std::move(fragment)) {}

  const std::string& fragment() const noexcept { return fragment_; }

 private:
  std::string fragment_;
};

}  // namespace emotutor

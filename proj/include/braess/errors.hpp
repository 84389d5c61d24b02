#pragma once

#include <stdexcept>
#include <string>

namespace braess {

// Error taxonomy shared by the library and the CLI exit-code contract.
enum class ErrorKind {
  Usage,             // bad arguments / unrecognized command        (exit 2)
  Capacity,          // enumeration bound exceeded                  (exit 3)
  Feasibility,       // infeasible flow, no candidate solution      (exit 4)
  UnsupportedModel,  // operation requires a latency class          (exit 4)
  Structure,         // no s-t path, degenerate instance            (exit 4)
  Domain,            // parameter out of range                      (exit 2)
  Parse,             // named parse errors, code prefix in message  (exit 2)
  SearchFailure,     // sampling budget exhausted                   (exit 4)
  Internal,          // invariant broken inside the library         (exit 1)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace braess

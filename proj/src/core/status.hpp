//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_STATUS_HPP
#define IDWS_CORE_STATUS_HPP

#include <stdexcept>
#include <string>

namespace idws {

// Internal error taxonomy; the C layer maps these 1:1 onto idws_status codes.
enum class Status {
  Ok = 0,
  InvalidArgument,
  State,       // operation illegal in the current lifecycle state
  Unsupported, // requested mode not available on this platform/build
  Io,
  BodyFailed, // a loop body raised; surfaced after the team quiesced
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(Status status, const std::string &what)
      : std::runtime_error(what), status_(status) {}
  Status status() const { return status_; }

private:
  Status status_;
};

} // namespace idws

#endif // IDWS_CORE_STATUS_HPP

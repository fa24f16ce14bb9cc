#ifndef LEGALATTR_ERROR_H_
#define LEGALATTR_ERROR_H_

#include <stdexcept>
#include <string>

namespace legalattr {

// Broad failure classes. The command-line front end maps kNumerical to exit
// code 3 and every other kind to exit code 2.
enum class ErrorKind {
  kInvalidInput,  // malformed or inconsistent user data
  kFormat,        // a binary or text file is not in the expected format
  kVersion,       // a file was written by an unsupported format version
  kChecksum,      // stored and recomputed checksums disagree
  kTruncated,     // a file ends before its declared payload
  kNumerical,     // a non-finite value appeared during computation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char *ErrorKindName(ErrorKind kind);

}  // namespace legalattr

#endif  // LEGALATTR_ERROR_H_

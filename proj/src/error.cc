#include "legalattr/error.h"

namespace legalattr {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kVersion: return "version error";
    case ErrorKind::kChecksum: return "checksum error";
    case ErrorKind::kTruncated: return "truncated data";
    case ErrorKind::kNumerical: return "numerical error";
  }
  return "error";
}

}  // namespace legalattr

#include "hopp/error.hpp"

namespace hopp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid dimension";
    case ErrorKind::InvalidIndex: return "invalid index";
    case ErrorKind::NumericOverflow: return "numeric overflow";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::InvalidView: return "invalid view";
    case ErrorKind::InvalidBoundary: return "invalid boundary";
    case ErrorKind::LogDomain: return "log domain";
  }
  return "error";
}

}  // namespace hopp

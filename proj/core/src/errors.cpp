#include "ideoemb/errors.hpp"

namespace ideoemb {

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& message)
    : ValidationError(path + ":" + std::to_string(line) + ": " + message), path_(path), line_(line) {}

}  // namespace ideoemb

#ifndef HAARDY_ERR_HPP
#define HAARDY_ERR_HPP

#include <stdexcept>
#include <string>

namespace haardy {

// Domain violations: arguments outside an operation's mathematical domain
// (predecessor of the root, non-tiling generation, sigma >= 1, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Resolution/depth violations: a request that cannot be represented on the
// working grid (haar level >= depth, shift without headroom, budget overflow).
struct ResolutionError : std::runtime_error {
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

// Structural validation failures on otherwise well-formed inputs.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed JSON, carrying the parse location.
struct JsonError : std::runtime_error {
  std::string location;
  JsonError(const std::string& what, std::string loc)
      : std::runtime_error(what), location(std::move(loc)) {}
};

}  // namespace haardy

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace alertforge {

struct EmptyDatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EncodingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A required output of an earlier pipeline stage is absent or unreadable.
struct MissingArtifactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace alertforge

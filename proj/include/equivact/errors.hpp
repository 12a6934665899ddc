#pragma once

#include <stdexcept>

namespace equivact {

struct DegenerateRot6d : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoseFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionNotMultipleOf4 : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BehindCamera : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconclusiveClassification : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace equivact

#pragma once

#include <stdexcept>
#include <string>

namespace puorl {

// Dimension/shape disagreements between tensors, datasets, or files.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed on-disk artifacts: bad magic, truncation, unknown version.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (ratios, weights, degenerate setups).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad runtime data: empty batches, undersized datasets, empty splits.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training diverged or became degenerate (non-finite values, empty keep set).
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mixture-proportion estimation could not produce a value.
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Classifier input mode incompatible with the data it is applied to.
struct ModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simulation produced or received invalid states/actions.
struct EnvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace puorl

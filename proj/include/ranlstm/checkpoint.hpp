#pragma once

// Binary model checkpoints. Layout:
//   bytes 0-3   magic "RNLS"
//   bytes 4-5   format version (u16, little-endian), currently 1
//   bytes 6-9   spec block length (u32)
//   ...         textual spec block (name, dims, features, window, seed, epochs)
//   8 bytes     declared parameter count (u64)
//   ...         parameters as little-endian f64 in flat-buffer order:
//               per layer input/forget/output/candidate gate (W, U, b each),
//               then head weights, head bias.

#include <string>

#include "ranlstm/lstm.hpp"

namespace ranlstm {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad magic, unsupported version, or trailing bytes after the payload.
class CheckpointFormatError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

/// Spec block inconsistent (unparseable, invalid, or the declared parameter
/// count does not match the spec).
class CheckpointSpecError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

/// File ends before the declared payload does.
class CheckpointTruncatedError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

void save_checkpoint(const LstmModel& model, const std::string& path);
LstmModel load_checkpoint(const std::string& path);

}  // namespace ranlstm
